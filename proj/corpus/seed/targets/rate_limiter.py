def accepted_requests(timestamps, limit, window):
    accepted = []
    for stamp in timestamps:
        recent = [a for a in accepted if stamp - a < window]
        if len(recent) < limit:
            accepted.append(stamp)
    return len(accepted)
