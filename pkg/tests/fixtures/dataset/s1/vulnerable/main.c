#include <stdio.h>
#include <stdlib.h>

int sum_first_n(const int *values, int count) {
    int total = 0;
    for (int i = 0; i <= count; i++) {
        total += values[i];
    }
    return total;
}

int main(int argc, char **argv) {
    int values[9];
    for (int i = 0; i < 9; i++) {
        values[i] = 1000;
    }
    int count = argc - 1;
    if (count > 8) {
        return 2;
    }
    for (int i = 0; i < count; i++) {
        values[i] = atoi(argv[i + 1]);
    }
    printf("%d\n", sum_first_n(values, count));
    return 0;
}
