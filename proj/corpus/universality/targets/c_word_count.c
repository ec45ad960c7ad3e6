#include <ctype.h>

int count_words(const char *text) {
    int words = 0;
    bool inside = false;
    for (const char *p = text; *p; p++) {
        if (isspace((unsigned char)*p)) {
            inside = false;
        } else if (!inside) {
            inside = true;
            words++;
        }
    }
    return words;
}
