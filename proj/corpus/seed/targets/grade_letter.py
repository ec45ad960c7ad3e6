def letter_grade(scores):
    average = sum(scores) / len(scores)
    if average >= 90:
        return "A"
    if average >= 80:
        return "B"
    if average >= 70:
        return "C"
    return "F"
