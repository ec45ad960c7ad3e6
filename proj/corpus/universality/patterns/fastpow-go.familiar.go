func fastPower(base, exp, mod int) int {
	if mod != 0 {
		base %= mod
	}
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
