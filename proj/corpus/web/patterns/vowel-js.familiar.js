function isVowel(c) {
  return "aeiouAEIOU".includes(c);
}
