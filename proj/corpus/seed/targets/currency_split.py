def make_change(cents):
    coins = [25, 10, 5, 1]
    used = []
    for coin in coins:
        count, cents = divmod(cents, coin)
        used.append(count)
    return used
