int bits_set_in_range(int lo, int hi) {
    int total = 0;
    for (int v = lo; v <= hi; v++) {
        unsigned int x = (unsigned int)v;
        while (x) {
            total += x & 1u;
            x >>= 1;
        }
    }
    return total;
}
