bool luhn_ok(const char *num) {
    int len = (int)strlen(num);
    int total = 0;
    int pos = 0;
    for (int i = len - 1; i >= 0; i--) {
        if (num[i] < '0' || num[i] > '9') {
            continue;
        }
        int d = num[i] - '0';
        if (pos % 2 == 1) {
            d *= 2;
            if (d > 9) {
                d -= 9;
            }
        }
        total += d;
        pos++;
    }
    return total % 10 == 0;
}
