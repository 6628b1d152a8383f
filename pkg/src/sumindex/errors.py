"""Exception types mapped to distinct CLI exit codes."""


class VerificationError(Exception):
    """An acceptance/verification criterion failed (exit code 2)."""


class FormatError(Exception):
    """Malformed instance or advice file (exit code 3)."""


class DigestMismatchError(FormatError):
    """Advice file does not belong to the given instance (exit code 3)."""


class BudgetExceededError(Exception):
    """A configured resource budget was exceeded (exit code 4)."""
