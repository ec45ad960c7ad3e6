def gpa(grades):
    points = {"A": 4.0, "B": 3.0, "C": 2.0, "D": 1.0, "F": 0.0}
    total = 0.0
    hours_sum = 0
    for letter, hours in grades:
        total += points[letter] * hours
        hours_sum += hours
    return round(total / hours_sum, 2)
