def summarize_readings(readings):
    valid = [r for r in readings if -50 <= r <= 60]
    lowest = min(valid)
    highest = max(valid)
    mean = sum(valid) / len(valid)
    return f"{lowest}..{highest} avg {mean:.2f} ({len(readings) - len(valid)} dropped)"
