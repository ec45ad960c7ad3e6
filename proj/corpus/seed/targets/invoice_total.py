def invoice_total(items, tax_rate):
    subtotal = 0
    for price, qty in items:
        subtotal += price * qty
    tax = round(subtotal * tax_rate, 2)
    return round(subtotal + tax, 2)
