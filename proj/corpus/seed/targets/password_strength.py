def password_score(pw):
    score = 0
    if len(pw) >= 8:
        score += 1
    if any(ch.isdigit() for ch in pw):
        score += 1
    if any(ch.isupper() for ch in pw):
        score += 1
    if any(not ch.isalnum() for ch in pw):
        score += 1
    return score
