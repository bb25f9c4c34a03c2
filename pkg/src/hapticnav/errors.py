"""Exception types shared across more than one module."""
from __future__ import annotations


class InputError(ValueError):
    """A value handed to the library violates a documented precondition."""
