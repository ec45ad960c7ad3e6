def rooms_needed(meetings):
    events = []
    for begin, finish in meetings:
        events.append((begin, 1))
        events.append((finish, -1))
    events.sort()
    active = 0
    peak = 0
    for when, delta in events:
        active += delta
        peak = max(peak, active)
    return peak
