def isbn10_valid(code):
    chars = code.replace("-", "")
    if len(chars) != 10:
        return False
    total = 0
    for weight, ch in zip(range(10, 0, -1), chars):
        value = 10 if ch == "X" else int(ch)
        total += weight * value
    return total % 11 == 0
