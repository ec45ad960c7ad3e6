import "strings"

func headline(text string) string {
	small := map[string]bool{"a": true, "of": true, "the": true, "and": true}
	words := strings.Fields(text)
	for i, w := range words {
		if i == 0 || !small[w] {
			words[i] = strings.ToUpper(w[:1]) + w[1:]
		}
	}
	return strings.Join(words, " ")
}
