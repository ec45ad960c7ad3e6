def lcm_of(values):
    def gcd(a, b):
        while b:
            a, b = b, a % b
        return a
    acc = 1
    for value in values:
        acc = acc * value // gcd(acc, value)
    return acc
