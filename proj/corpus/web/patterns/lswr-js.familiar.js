function lswr(s) {
  const charIndexMap = new Map();
  let longest = 0;
  let start = 0;
  for (let end = 0; end < s.length; end++) {
    const ch = s[end];
    if (charIndexMap.has(ch) && charIndexMap.get(ch) >= start) {
      start = charIndexMap.get(ch) + 1;
    }
    charIndexMap.set(ch, end);
    longest = Math.max(longest, end - start + 1);
  }
  return longest;
}
