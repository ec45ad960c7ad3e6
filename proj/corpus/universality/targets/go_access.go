func canAccess(role, resource string) bool {
	rules := map[string][]string{
		"admin":   {"billing", "users", "reports"},
		"analyst": {"reports"},
		"support": {"users"},
	}
	for _, r := range rules[role] {
		if r == resource {
			return true
		}
	}
	return false
}
