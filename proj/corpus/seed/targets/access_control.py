def can_access(role, resource):
    rules = {
        "admin": {"billing", "users", "reports"},
        "analyst": {"reports"},
        "support": {"users"},
    }
    allowed = rules.get(role, set())
    return resource in allowed
