#include <stdio.h>
#include <stdlib.h>

int apply_discount(int price, int percent) {
    if (percent < 0 || percent > 100) {
        return -1;
    }
    return price - price * percent / 100;
}

int main(int argc, char **argv) {
    if (argc != 3) {
        return 2;
    }
    printf("%d\n", apply_discount(atoi(argv[1]), atoi(argv[2])));
    return 0;
}
