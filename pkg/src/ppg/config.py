"""Enumeration caps, overridable through the PPG_SCOPE_CAP environment variable."""

import os

_DEFAULT_SCOPE_CAP = 500_000


def scope_cap() -> int:
    """Global cap on enumeration sizes (elements, tuples, search states)."""
    raw = os.environ.get("PPG_SCOPE_CAP")
    if raw is None:
        return _DEFAULT_SCOPE_CAP
    return int(raw)
