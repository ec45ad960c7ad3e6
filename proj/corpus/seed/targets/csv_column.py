def column_average(text, column):
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    position = header.index(column)
    values = [float(line.split(",")[position]) for line in lines[1:]]
    return round(sum(values) / len(values), 3)
