func luhnOK(num string) bool {
	total := 0
	pos := 0
	for i := len(num) - 1; i >= 0; i-- {
		c := num[i]
		if c < '0' || c > '9' {
			continue
		}
		d := int(c - '0')
		if pos%2 == 1 {
			d *= 2
			if d > 9 {
				d -= 9
			}
		}
		total += d
		pos++
	}
	return total%10 == 0
}
