func lswr(s string) int {
	charIndexMap := map[rune]int{}
	longest := 0
	start := 0
	for end, ch := range s {
		if idx, ok := charIndexMap[ch]; ok && idx >= start {
			start = idx + 1
		}
		charIndexMap[ch] = end
		if end-start+1 > longest {
			longest = end - start + 1
		}
	}
	return longest
}
