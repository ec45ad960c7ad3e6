func countWays(amount int, coins []int) int {
	ways := make([]int, amount+1)
	ways[0] = 1
	for _, c := range coins {
		for total := c; total <= amount; total++ {
			ways[total] += ways[total-c]
		}
	}
	return ways[amount]
}
