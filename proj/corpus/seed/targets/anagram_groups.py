def anagram_groups(words):
    groups = {}
    for word in words:
        signature = "".join(sorted(word))
        groups.setdefault(signature, []).append(word)
    return sorted(len(members) for members in groups.values())
