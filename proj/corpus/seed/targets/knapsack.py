def best_value(items, capacity):
    table = [0] * (capacity + 1)
    for weight, value in items:
        for cap in range(capacity, weight - 1, -1):
            table[cap] = max(table[cap], table[cap - weight] + value)
    return table[capacity]
