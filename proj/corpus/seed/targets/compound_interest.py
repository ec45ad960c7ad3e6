def grow(balance, rate, years, deposit):
    for year in range(years):
        balance = balance * (1 + rate) + deposit
    return int(balance)
