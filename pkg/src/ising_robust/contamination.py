"""Adversarial corruption of spin configurations.

Two schemes: ``pin_plus`` forces a fraction of entries to +1, ``flip``
negates them. Indices are chosen uniformly without replacement from a
seeded stream; the input configuration is never mutated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, ParseError
from .model import validate_spins
from .rng import STREAM_CONTAMINATION, generator

CONTAMINATION_KINDS = ("pin_plus", "flip")


@dataclass(frozen=True)
class ContaminationScheme:
    kind: str
    fraction: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in CONTAMINATION_KINDS:
            raise InvalidSpec(f"kind must be one of {CONTAMINATION_KINDS}, got {self.kind!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise InvalidSpec(f"fraction must lie in [0, 1], got {self.fraction}")


def contaminate(x, scheme: ContaminationScheme) -> np.ndarray:
    """Corrupt floor(fraction * n) distinct uniformly chosen entries."""
    s = validate_spins(x).copy()
    n = s.size
    k = int(np.floor(scheme.fraction * n))
    if k == 0:
        return s
    rng = generator(scheme.seed, STREAM_CONTAMINATION)
    idx = rng.choice(n, size=k, replace=False)
    if scheme.kind == "pin_plus":
        s[idx] = 1
    else:
        s[idx] = -s[idx]
    return s


def parse_scheme(text: str, seed: int = 0) -> ContaminationScheme:
    """Parse CLI shorthand like ``pin_plus:0.2`` or ``flip:0.05``."""
    parts = text.split(":")
    if len(parts) != 2:
        raise ParseError(f"expected 'kind:fraction', got {text!r}")
    kind, frac_text = parts[0].strip(), parts[1].strip()
    try:
        fraction = float(frac_text)
    except ValueError:
        raise ParseError(f"fraction must be a number, got {frac_text!r}") from None
    try:
        return ContaminationScheme(kind=kind, fraction=fraction, seed=seed)
    except InvalidSpec as exc:
        raise ParseError(str(exc)) from None
