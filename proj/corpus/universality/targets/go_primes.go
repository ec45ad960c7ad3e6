func primesBelow(limit int) []int {
	sieve := make([]bool, limit)
	var out []int
	for n := 2; n < limit; n++ {
		if sieve[n] {
			continue
		}
		out = append(out, n)
		for m := n * n; m < limit; m += n {
			sieve[m] = true
		}
	}
	return out
}
