"""Shared error types."""


class DataError(Exception):
    """Malformed or inconsistent input data; maps to CLI exit code 3."""
