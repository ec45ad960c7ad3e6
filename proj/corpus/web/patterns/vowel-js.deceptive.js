function isVowel(c) {
  return "aeioAEIOU".includes(c);
}
