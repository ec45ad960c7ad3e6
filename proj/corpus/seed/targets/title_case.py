def headline(text):
    small = {"a", "an", "of", "the", "and", "in"}
    words = text.split()
    result = []
    for idx, word in enumerate(words):
        if idx > 0 and word in small:
            result.append(word)
        else:
            result.append(word[:1].upper() + word[1:])
    return " ".join(result)
