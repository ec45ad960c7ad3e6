func makeChange(cents int) []int {
	coins := []int{25, 10, 5, 1}
	used := make([]int, len(coins))
	for i, c := range coins {
		used[i] = cents / c
		cents %= c
	}
	return used
}
