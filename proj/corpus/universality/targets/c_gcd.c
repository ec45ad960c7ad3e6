long gcd(long a, long b) {
    while (b != 0) {
        long r = a % b;
        a = b;
        b = r;
    }
    return a;
}

long gcd_of(const long *values, int count) {
    long acc = values[0];
    for (int i = 1; i < count; i++) {
        acc = gcd(acc, values[i]);
    }
    return acc;
}
