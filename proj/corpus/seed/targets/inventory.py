def restock_list(stock, threshold):
    low = []
    for item, qty in stock.items():
        if qty < threshold:
            low.append(item)
    return sorted(low)
