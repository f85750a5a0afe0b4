"""Ising model on a known interaction matrix.

Energy convention: ``hamiltonian(J, x) = sum_{i<j} J_ij x_i x_j`` and the
configuration law is ``P_beta(x) = exp(beta * H(x)) / (2^n * Z(beta))`` with
``Z(beta) = 2^{-n} * sum_x exp(beta * H(x))``, so ``Z(0) = 1`` and the law at
``beta = 0`` is uniform over the 2^n sign vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import DimensionMismatch, ParseError, TooLargeForEnumeration
from .graphs import InteractionMatrix

ENUMERATION_CAP = 20

_LOG2 = float(np.log(2.0))


def validate_spins(x, n: int | None = None) -> np.ndarray:
    """Coerce to an int8 vector of +/-1 entries; length-check against ``n``."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise DimensionMismatch(f"spin configuration must be 1-D, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"expected {n} spins, got {arr.shape[0]}")
    try:
        out = arr.astype(np.int8, copy=True)
        exact = bool(np.array_equal(out, arr))
    except (ValueError, TypeError):
        raise DimensionMismatch("spin entries must be integers +1 or -1") from None
    if arr.size and not exact:
        raise DimensionMismatch("spin entries must be integers +1 or -1")
    if arr.size and not np.all(np.abs(out) == 1):
        raise DimensionMismatch("spin entries must be +1 or -1")
    return out


def hamiltonian(J: InteractionMatrix, x) -> float:
    """Interaction energy sum_{i<j} J_ij x_i x_j."""
    s = validate_spins(x, J.n).astype(np.float64)
    if J.num_edges == 0:
        return 0.0
    return float(np.sum(J.weights * s[J.rows] * s[J.cols]))


def local_fields(J: InteractionMatrix, x) -> np.ndarray:
    """Vector m with m_i = sum_j J_ij x_j."""
    s = validate_spins(x, J.n).astype(np.float64)
    return np.asarray(J.csr @ s).ravel()


def conditional_prob_plus(beta: float, m) -> np.ndarray | float:
    """P(X_i = +1 | rest) = (1 + tanh(beta * m_i)) / 2, stable for any m."""
    p = 0.5 * (1.0 + np.tanh(beta * np.asarray(m, dtype=np.float64)))
    return float(p) if p.ndim == 0 else p


def enumerate_configurations(n: int) -> np.ndarray:
    """All 2^n sign vectors as an int8 array, row c has x_i = +1 iff bit i of c."""
    if n > ENUMERATION_CAP:
        raise TooLargeForEnumeration(f"n={n} exceeds enumeration cap {ENUMERATION_CAP}")
    codes = np.arange(1 << n, dtype=np.uint32)
    bits = (codes[:, None] >> np.arange(n, dtype=np.uint32)) & 1
    return (2 * bits - 1).astype(np.int8)


def configuration_index(x) -> int:
    """Inverse of the row ordering in :func:`enumerate_configurations`."""
    s = np.asarray(x)
    bits = (s > 0).astype(np.uint64)
    return int(bits @ (np.uint64(1) << np.arange(s.size, dtype=np.uint64)))


@dataclass(frozen=True)
class ExactModelSummary:
    """Exact enumeration products: the normalizer and, optionally, the law."""

    beta: float
    z: float
    log_z_over_n: float
    probabilities: np.ndarray | None = None


def exact_summary(J: InteractionMatrix, beta: float, want_table: bool = False) -> ExactModelSummary:
    """Enumerate all 2^n configurations (n <= 20) for the normalizer and law.

    ``probabilities`` (when requested) is indexed by the bit-coding of
    :func:`enumerate_configurations`; log-sum-exp keeps the normalizer stable.
    """
    n = J.n
    if n > ENUMERATION_CAP:
        raise TooLargeForEnumeration(f"n={n} exceeds enumeration cap {ENUMERATION_CAP}")
    configs = enumerate_configurations(n)
    total = configs.shape[0]
    scaled = np.zeros(total)
    if J.num_edges:
        block = 1 << 14  # bounds the (block x edges) temporary
        for start in range(0, total, block):
            part = configs[start : start + block].astype(np.float64)
            scaled[start : start + block] = beta * (
                (part[:, J.rows] * part[:, J.cols]) @ J.weights
            )
    log_total = float(logsumexp(scaled))
    log_z = log_total - n * _LOG2
    table = None
    if want_table:
        table = np.exp(scaled - log_total)
        table = table / table.sum()
    return ExactModelSummary(
        beta=float(beta),
        z=float(np.exp(log_z)),
        log_z_over_n=log_z / n,
        probabilities=table,
    )


def read_spins(path, n: int | None = None) -> np.ndarray:
    """Read a spin file: one entry per line, ``+1``/``1`` or ``-1``."""
    values = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            if text in ("+1", "1"):
                values.append(1)
            elif text == "-1":
                values.append(-1)
            else:
                raise ParseError(f"{path}:{lineno}: expected +1 or -1, got {text!r}")
    if not values:
        raise ParseError(f"{path}: no spin entries found")
    return validate_spins(np.array(values, dtype=np.int8), n)


def write_spins(path, x) -> None:
    s = validate_spins(x)
    with open(path, "w") as fh:
        for v in s:
            fh.write("+1\n" if v > 0 else "-1\n")


def read_samples_csv(path, n: int | None = None) -> list[np.ndarray]:
    """Read the multi-sample format: CSV, one configuration per row."""
    samples = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                vals = [int(tok) for tok in text.split(",")]
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer entry") from None
            try:
                samples.append(validate_spins(np.array(vals, dtype=np.int64), n))
            except DimensionMismatch as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not samples:
        raise ParseError(f"{path}: no samples found")
    return samples


def write_samples_csv(path, samples) -> None:
    with open(path, "w") as fh:
        for x in samples:
            s = validate_spins(x)
            fh.write(",".join(str(int(v)) for v in s) + "\n")
