def moving_average(samples, window):
    averages = []
    running = 0
    for idx, sample in enumerate(samples):
        running += sample
        if idx >= window:
            running -= samples[idx - window]
        if idx >= window - 1:
            averages.append(round(running / window, 2))
    return averages
