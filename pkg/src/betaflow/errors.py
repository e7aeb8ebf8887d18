class DomainError(ValueError):
    """An argument lies outside the domain of a density, map or special function."""


class UsageError(ValueError):
    """Malformed input to a statistical test or command (empty sample, bad sizes)."""
