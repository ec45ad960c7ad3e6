def luhn_valid(number):
    digits = [int(d) for d in number if d.isdigit()]
    checksum = 0
    for pos, digit in enumerate(reversed(digits)):
        if pos % 2 == 1:
            digit *= 2
            if digit > 9:
                digit -= 9
        checksum += digit
    return checksum % 10 == 0
