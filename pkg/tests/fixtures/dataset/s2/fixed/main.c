#include <stdio.h>
#include <stdlib.h>

int clamp(int value, int lo, int hi) {
    if (value < lo) {
        return lo;
    }
    if (value > hi) {
        return hi;
    }
    return value;
}

int main(int argc, char **argv) {
    if (argc != 4) {
        return 2;
    }
    printf("%d\n", clamp(atoi(argv[1]), atoi(argv[2]), atoi(argv[3])));
    return 0;
}
