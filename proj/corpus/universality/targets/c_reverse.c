const char *reversed(const char *s) {
    static char buf[128];
    size_t n = strlen(s);
    for (size_t i = 0; i < n; i++) {
        buf[i] = s[n - 1 - i];
    }
    buf[n] = '\0';
    return buf;
}
