"""Small shared helpers: id coercion, seed derivation, CSV float formatting."""

from __future__ import annotations

import numpy as np


def coerce_id(raw: str):
    """Ids read from CSV become ints when integral, else stay strings."""
    raw = raw.strip()
    try:
        return int(raw)
    except ValueError:
        return raw


def derive_seed(*parts) -> int:
    """Deterministic child seed from a master seed and stable context keys."""
    keyed = []
    for part in parts:
        if isinstance(part, (int, np.integer)):
            keyed.append(int(part) & 0xFFFFFFFF)
        else:
            keyed.append(int.from_bytes(str(part).encode("utf-8")[:8].ljust(8, b"\0"), "big"))
    return int(np.random.SeedSequence(keyed).generate_state(1)[0])


def fmt(value) -> str:
    """Full-precision, round-trippable decimal rendering for CSV cells."""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    return str(value)
