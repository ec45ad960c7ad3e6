#include <string.h>

bool is_vowel(char c) {
    return c != '\0' && strchr("aeioAEIOU", c) != NULL;
}
