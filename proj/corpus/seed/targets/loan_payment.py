def monthly_payment(principal, annual_rate, months):
    monthly = annual_rate / 12
    if monthly == 0:
        return round(principal / months, 2)
    factor = (1 + monthly) ** months
    return round(principal * monthly * factor / (factor - 1), 2)
