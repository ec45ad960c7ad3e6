long long fast_power(long long base, long long exp, long long mod) {
    base %= mod ? mod : base;
    long long result = 1;
    while (exp > 0) {
        if (exp & 1) {
            result = result * base;
            if (mod) {
                result %= mod;
            }
        }
        base = base * base;
        if (mod) {
            base %= mod;
        }
        exp >>= 1;
    }
    return result;
}
