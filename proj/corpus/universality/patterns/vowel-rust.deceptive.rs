fn is_vowel(c: char) -> bool {
    "aeioAEIOU".contains(c)
}
