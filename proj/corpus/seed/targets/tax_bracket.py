def income_tax(income):
    brackets = [(10000, 0.0), (40000, 0.1), (90000, 0.2)]
    owed = 0.0
    lower = 0
    for upper, rate in brackets:
        if income > lower:
            owed += (min(income, upper) - lower) * rate
        lower = upper
    if income > lower:
        owed += (income - lower) * 0.3
    return round(owed, 2)
