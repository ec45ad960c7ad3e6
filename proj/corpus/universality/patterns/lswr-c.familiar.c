int lswr(const char *s) {
    int char_index_map[256];
    for (int i = 0; i < 256; i++) {
        char_index_map[i] = -1;
    }
    int longest = 0;
    int start = 0;
    for (int end = 0; s[end] != '\0'; end++) {
        unsigned char c = (unsigned char)s[end];
        if (char_index_map[c] >= start) {
            start = char_index_map[c] + 1;
        }
        char_index_map[c] = end;
        if (end - start + 1 > longest) {
            longest = end - start + 1;
        }
    }
    return longest;
}
