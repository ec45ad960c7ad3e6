func fastPower(base, exp, mod int) int {
	m := mod
	if m == 0 {
		m = base
	}
	base %= m
	result := 1
	for exp > 0 {
		if exp&1 == 1 {
			result = result * base
			if mod != 0 {
				result %= mod
			}
		}
		base = base * base
		if mod != 0 {
			base %= mod
		}
		exp >>= 1
	}
	return result
}
