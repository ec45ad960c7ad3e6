def eval_rpn(tokens):
    stack = []
    for tok in tokens:
        if tok in "+-*":
            right = stack.pop()
            left = stack.pop()
            if tok == "+":
                stack.append(left + right)
            elif tok == "-":
                stack.append(left - right)
            else:
                stack.append(left * right)
        else:
            stack.append(int(tok))
    return stack[0]
