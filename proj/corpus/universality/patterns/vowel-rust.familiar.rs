fn is_vowel(c: char) -> bool {
    "aeiouAEIOU".contains(c)
}
