def shipping_cost(weights):
    total = sum(weights)
    if total <= 1.0:
        return 4.5
    if total <= 5.0:
        return 9.0
    return round(9.0 + (total - 5.0) * 1.25, 2)
