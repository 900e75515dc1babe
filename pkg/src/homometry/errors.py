class InvalidInput(ValueError):
    """Raised when arguments violate an operation's preconditions."""
