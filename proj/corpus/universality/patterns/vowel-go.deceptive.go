import "strings"

func isVowel(c rune) bool {
	return strings.ContainsRune("aeioAEIOU", c)
}
