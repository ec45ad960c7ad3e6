def mat_mul(a, b):
    rows = len(a)
    cols = len(b[0])
    inner = len(b)
    return [[sum(a[r][k] * b[k][c] for k in range(inner)) for c in range(cols)]
            for r in range(rows)]
