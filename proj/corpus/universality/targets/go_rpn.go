import "strconv"

func evalRPN(tokens []string) int {
	var stack []int
	for _, tok := range tokens {
		switch tok {
		case "+", "-", "*":
			right := stack[len(stack)-1]
			left := stack[len(stack)-2]
			stack = stack[:len(stack)-2]
			switch tok {
			case "+":
				stack = append(stack, left+right)
			case "-":
				stack = append(stack, left-right)
			default:
				stack = append(stack, left*right)
			}
		default:
			v, _ := strconv.Atoi(tok)
			stack = append(stack, v)
		}
	}
	return stack[0]
}
