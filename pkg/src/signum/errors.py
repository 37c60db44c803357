"""Base exception for everything raised by this package."""


class SignumError(Exception):
    """Common ancestor so callers can catch any signum failure in one clause."""
