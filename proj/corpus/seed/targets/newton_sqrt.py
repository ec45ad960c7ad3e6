def newton_sqrt(value, iterations):
    guess = value / 2
    for step in range(iterations):
        guess = (guess + value / guess) / 2
    return round(guess, 6)
