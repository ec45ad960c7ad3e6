class Account:
    def __init__(self, owner):
        self.owner = owner
        self.balance = 0

    def deposit(self, amount):
        self.balance += amount

    def withdraw(self, amount):
        if amount > self.balance:
            return False
        self.balance -= amount
        return True


def run_ledger(entries):
    acct = Account("kim")
    rejected = 0
    for kind, amount in entries:
        if kind == "d":
            acct.deposit(amount)
        elif not acct.withdraw(amount):
            rejected += 1
    return (acct.balance, rejected)
