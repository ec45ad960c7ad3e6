def newer_version(left, right):
    lparts = [int(p) for p in left.split(".")]
    rparts = [int(p) for p in right.split(".")]
    width = max(len(lparts), len(rparts))
    lparts += [0] * (width - len(lparts))
    rparts += [0] * (width - len(rparts))
    return left if lparts >= rparts else right
