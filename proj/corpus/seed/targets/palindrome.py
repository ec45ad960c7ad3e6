def is_palindrome(phrase):
    cleaned = [ch.lower() for ch in phrase if ch.isalnum()]
    return cleaned == cleaned[::-1]
