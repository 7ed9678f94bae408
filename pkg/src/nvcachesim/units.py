"""Byte-quantity parsing and formatting.

All multiples are decimal (k = 1e3, M = 1e6, G = 1e9, T = 1e12) so that byte
counts and GB/s bandwidths share one unit system.
"""

from __future__ import annotations

_SUFFIXES = {"k": 10**3, "m": 10**6, "g": 10**9, "t": 10**12}


def parse_bytes(text: str | int | float) -> int:
    """Parse a byte quantity like ``"16k"``, ``"32M"``, ``"180G"`` or a bare number.

    Raises ValueError on anything unrecognizable or negative.
    """
    if isinstance(text, (int, float)):
        value = float(text)
    else:
        s = text.strip()
        if not s:
            raise ValueError("empty byte quantity")
        suffix = s[-1].lower()
        if suffix in _SUFFIXES:
            value = float(s[:-1]) * _SUFFIXES[suffix]
        elif suffix == "b" and len(s) > 1 and s[-2].lower() in _SUFFIXES:
            value = float(s[:-2]) * _SUFFIXES[s[-2].lower()]
        else:
            value = float(s)
    if value < 0:
        raise ValueError(f"byte quantity must be non-negative: {text!r}")
    return int(round(value))


def format_bytes(n: float) -> str:
    """Human-readable decimal rendering, e.g. 1.5e8 -> ``"150.0MB"``."""
    n = float(n)
    for suffix, mult in (("T", 10**12), ("G", 10**9), ("M", 10**6), ("k", 10**3)):
        if abs(n) >= mult:
            return f"{n / mult:.1f}{suffix}B"
    return f"{n:.0f}B"
