def rle_encode(data):
    if not data:
        return ""
    pieces = []
    current = data[0]
    count = 1
    for ch in data[1:]:
        if ch == current:
            count += 1
        else:
            pieces.append(f"{count}{current}")
            current = ch
            count = 1
    pieces.append(f"{count}{current}")
    return "".join(pieces)
