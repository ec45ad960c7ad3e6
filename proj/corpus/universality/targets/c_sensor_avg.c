double average_valid(const int *readings, int count) {
    int total = 0;
    int used = 0;
    for (int i = 0; i < count; i++) {
        if (readings[i] >= -40 && readings[i] <= 85) {
            total += readings[i];
            used++;
        }
    }
    return used ? (double)total / used : 0.0;
}
