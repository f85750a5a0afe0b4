"""Interaction matrices and the graph ensembles used in the experiments.

The central type is :class:`InteractionMatrix`: a symmetric, zero-diagonal
coupling matrix stored as canonical ``i < j`` edges. Builders produce the
standard ensembles (paths, grids, Erdos-Renyi, stochastic block model,
Sherrington-Kirkpatrick, Hopfield) with the per-ensemble weight scalings
applied at build time, so downstream code never rescales.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    AsymmetryConflict,
    EmptyGraph,
    IndexOutOfRange,
    InvalidSpec,
    ParseError,
)
from .rng import STREAM_GRAPH, generator

ENSEMBLE_KINDS = (
    "path_lattice_1d",
    "lattice_2d",
    "erdos_renyi",
    "sbm",
    "sherrington_kirkpatrick",
    "hopfield",
    "edge_list_file",
)

SCALING_TAGS = ("raw", "avg_degree", "by_n", "by_np", "sk", "hopfield")


class InteractionMatrix:
    """Symmetric coupling matrix with zero diagonal, stored as i < j edges.

    Instances are immutable: edge arrays are frozen after validation. The
    dense symmetric action is available through :attr:`csr` (built lazily and
    cached) which is what local-field computations multiply against.
    """

    __slots__ = ("n", "rows", "cols", "weights", "scaling_tag", "_csr")

    def __init__(self, n, rows, cols, weights, scaling_tag="raw"):
        n = int(n)
        if n <= 0:
            raise InvalidSpec(f"need at least one node, got n={n}")
        if scaling_tag not in SCALING_TAGS:
            raise InvalidSpec(f"unknown scaling_tag {scaling_tag!r}")
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        if not (rows.shape == cols.shape == weights.shape) or rows.ndim != 1:
            raise InvalidSpec("edge arrays must be 1-D and equally sized")
        if rows.size:
            if rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n:
                raise IndexOutOfRange(f"edge endpoint outside [0, {n})")
            if np.any(rows == cols):
                raise InvalidSpec("diagonal entries are not allowed")
            if not np.all(np.isfinite(weights)):
                raise InvalidSpec("edge weights must be finite")
            # canonicalize to i < j and sort lexicographically
            lo = np.minimum(rows, cols)
            hi = np.maximum(rows, cols)
            order = np.lexsort((hi, lo))
            lo, hi, weights = lo[order], hi[order], weights[order]
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                bad = dup & (weights[1:] != weights[:-1])
                if np.any(bad):
                    k = int(np.flatnonzero(bad)[0])
                    raise AsymmetryConflict(
                        f"edge ({lo[k]}, {hi[k]}) listed with weights "
                        f"{weights[k]!r} and {weights[k + 1]!r}"
                    )
                keep = np.concatenate(([True], ~dup))
                lo, hi, weights = lo[keep], hi[keep], weights[keep]
            rows, cols = lo, hi
        for a in (rows, cols, weights):
            a.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "scaling_tag", scaling_tag)
        object.__setattr__(self, "_csr", None)

    def __setattr__(self, name, value):
        raise AttributeError("InteractionMatrix is immutable")

    @property
    def num_edges(self) -> int:
        return int(self.rows.size)

    @property
    def csr(self) -> sp.csr_matrix:
        """Full symmetric matrix in CSR form (cached)."""
        if self._csr is None:
            r = np.concatenate([self.rows, self.cols])
            c = np.concatenate([self.cols, self.rows])
            w = np.concatenate([self.weights, self.weights])
            m = sp.csr_matrix((w, (r, c)), shape=(self.n, self.n))
            m.sort_indices()
            object.__setattr__(self, "_csr", m)
        return self._csr

    def toarray(self) -> np.ndarray:
        return self.csr.toarray() if self.num_edges else np.zeros((self.n, self.n))

    def edges(self):
        """Iterate canonical (i, j, weight) triples with i < j."""
        for i, j, w in zip(self.rows, self.cols, self.weights):
            yield int(i), int(j), float(w)

    def delete_node(self, i: int) -> "InteractionMatrix":
        """Matrix on n-1 nodes with row/column ``i`` removed, indices shifted."""
        i = int(i)
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"node {i} outside [0, {self.n})")
        if self.n == 1:
            raise InvalidSpec("cannot delete the only node")
        keep = (self.rows != i) & (self.cols != i)
        r = self.rows[keep].copy()
        c = self.cols[keep].copy()
        w = self.weights[keep].copy()
        r[r > i] -= 1
        c[c > i] -= 1
        return InteractionMatrix(self.n - 1, r, c, w, self.scaling_tag)

    def same_edges(self, other: "InteractionMatrix") -> bool:
        return (
            self.n == other.n
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self):
        return (
            f"InteractionMatrix(n={self.n}, edges={self.num_edges}, "
            f"scaling_tag={self.scaling_tag!r})"
        )


@dataclass(frozen=True)
class EnsembleSpec:
    """Declarative recipe for building a graph; see :func:`build_ensemble`."""

    kind: str
    n: int
    seed: int = 0
    p: float | None = None
    sizes: tuple[int, ...] | None = None
    p_within: float | None = None
    q_between: float | None = None
    m_attractors: int | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise InvalidSpec(f"unknown ensemble kind {self.kind!r}")
        if self.sizes is not None:
            object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))


def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def build_ensemble(spec: EnsembleSpec) -> InteractionMatrix:
    """Build the interaction matrix described by ``spec``.

    Randomized kinds draw from the graph stream of ``spec.seed``; two builds
    from identical specs are bit-identical.
    """
    n = int(spec.n)
    if n <= 0:
        raise InvalidSpec(f"need n >= 1, got {n}")
    kind = spec.kind
    if kind == "path_lattice_1d":
        return _path_lattice_1d(n)
    if kind == "lattice_2d":
        return _lattice_2d(n)
    if kind == "erdos_renyi":
        return _erdos_renyi(n, spec.p, spec.seed)
    if kind == "sbm":
        return _sbm(n, spec.sizes, spec.p_within, spec.q_between, spec.seed)
    if kind == "sherrington_kirkpatrick":
        return _sherrington_kirkpatrick(n, spec.seed)
    if kind == "hopfield":
        return _hopfield(n, spec.m_attractors, spec.seed)
    if kind == "edge_list_file":
        if spec.path is None:
            raise InvalidSpec("edge_list_file needs a path")
        return load_edge_list(spec.path, n=n)
    raise InvalidSpec(f"unknown ensemble kind {kind!r}")


def _scale_by_avg_degree(n, rows, cols, tag="avg_degree"):
    num_edges = rows.size
    if num_edges == 0:
        raise EmptyGraph("ensemble draw produced no edges")
    d_avg = 2.0 * num_edges / n
    w = np.full(num_edges, 1.0 / d_avg)
    return InteractionMatrix(n, rows, cols, w, tag)


def _path_lattice_1d(n: int) -> InteractionMatrix:
    if n < 2:
        raise InvalidSpec("1-D path needs n >= 2")
    idx = np.arange(n - 1)
    return _scale_by_avg_degree(n, idx, idx + 1)


def _lattice_2d(n: int) -> InteractionMatrix:
    m = math.isqrt(n)
    if m * m != n:
        raise InvalidSpec(f"2-D lattice needs a perfect-square n, got {n}")
    if m < 2:
        raise InvalidSpec("2-D lattice needs n >= 4")
    node = np.arange(n).reshape(m, m)
    right = np.stack([node[:, :-1].ravel(), node[:, 1:].ravel()])
    down = np.stack([node[:-1, :].ravel(), node[1:, :].ravel()])
    rows = np.concatenate([right[0], down[0]])
    cols = np.concatenate([right[1], down[1]])
    return _scale_by_avg_degree(n, rows, cols)


def _erdos_renyi(n: int, p: float | None, seed: int) -> InteractionMatrix:
    if p is None or not 0.0 < p <= 1.0:
        raise InvalidSpec(f"erdos_renyi needs 0 < p <= 1, got {p}")
    if n < 2:
        raise InvalidSpec("erdos_renyi needs n >= 2")
    rng = generator(seed, STREAM_GRAPH)
    r, c = _pair_indices(n)
    mask = rng.random(r.size) < p
    r, c = r[mask], c[mask]
    if r.size == 0:
        raise EmptyGraph(f"erdos_renyi draw with n={n}, p={p} has no edges")
    w = np.full(r.size, 1.0 / (n * p))
    return InteractionMatrix(n, r, c, w, "by_np")


def _sbm(n, sizes, p_within, q_between, seed) -> InteractionMatrix:
    if sizes is None or len(sizes) < 1 or any(s <= 0 for s in sizes):
        raise InvalidSpec("sbm needs positive community sizes")
    if sum(sizes) != n:
        raise InvalidSpec(f"community sizes {sizes} must sum to n={n}")
    for name, v in (("p_within", p_within), ("q_between", q_between)):
        if v is None or not 0.0 <= v <= 1.0:
            raise InvalidSpec(f"sbm needs 0 <= {name} <= 1, got {v}")
    rng = generator(seed, STREAM_GRAPH)
    block = np.repeat(np.arange(len(sizes)), sizes)
    r, c = _pair_indices(n)
    prob = np.where(block[r] == block[c], p_within, q_between)
    mask = rng.random(r.size) < prob
    r, c = r[mask], c[mask]
    return _scale_by_avg_degree(n, r, c)


def _sherrington_kirkpatrick(n: int, seed: int) -> InteractionMatrix:
    if n < 2:
        raise InvalidSpec("sherrington_kirkpatrick needs n >= 2")
    rng = generator(seed, STREAM_GRAPH)
    r, c = _pair_indices(n)
    w = rng.standard_normal(r.size) / math.sqrt(n)
    return InteractionMatrix(n, r, c, w, "sk")


def _hopfield(n: int, m_attractors: int | None, seed: int) -> InteractionMatrix:
    if m_attractors is None or m_attractors < 1:
        raise InvalidSpec(f"hopfield needs m_attractors >= 1, got {m_attractors}")
    if n < 2:
        raise InvalidSpec("hopfield needs n >= 2")
    rng = generator(seed, STREAM_GRAPH)
    w = rng.integers(0, 2, size=(n, m_attractors)).astype(np.float64) * 2.0 - 1.0
    full = (w @ w.T) / n
    r, c = _pair_indices(n)
    vals = full[r, c]
    keep = vals != 0.0
    r, c, vals = r[keep], c[keep], vals[keep]
    if r.size == 0:
        raise EmptyGraph("hopfield draw produced an all-zero off-diagonal")
    return InteractionMatrix(n, r, c, vals, "hopfield")


def spectral_norm_upper_bound(J: InteractionMatrix) -> float:
    """Row-sum bound max_i sum_j |J_ij| on the spectral norm."""
    if J.num_edges == 0:
        return 0.0
    s = np.zeros(J.n)
    np.add.at(s, J.rows, np.abs(J.weights))
    np.add.at(s, J.cols, np.abs(J.weights))
    return float(s.max())


def save_edge_list(path, J: InteractionMatrix) -> None:
    """Write canonical edges as ``i j weight`` lines; weights via repr so a
    round trip is exact. A ``# n=...`` comment records isolated nodes."""
    with open(path, "w") as fh:
        fh.write(f"# n={J.n}\n")
        for i, j, w in J.edges():
            fh.write(f"{i} {j} {w!r}\n")


def load_edge_list(path, n: int | None = None) -> InteractionMatrix:
    """Parse a whitespace-delimited edge list into an interaction matrix.

    Lines are ``i j weight`` with 0-based indices; ``#`` starts a comment.
    When ``n`` is omitted it is taken from a ``# n=...`` header if present,
    else inferred as the largest index plus one.
    """
    rows, cols, weights = [], [], []
    header_n = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                comment = raw.strip()
                if comment.startswith("#") and header_n is None:
                    body = comment[1:].strip()
                    if body.startswith("n="):
                        try:
                            header_n = int(body[2:])
                        except ValueError:
                            pass
                continue
            parts = text.split()
            if len(parts) != 3:
                raise ParseError(f"{path}:{lineno}: expected 'i j weight', got {text!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            if i == j:
                raise ParseError(f"{path}:{lineno}: diagonal entry ({i}, {j}) not allowed")
            if not math.isfinite(w):
                raise ParseError(f"{path}:{lineno}: weight must be finite, got {parts[2]}")
            rows.append(i)
            cols.append(j)
            weights.append(w)
    if n is None:
        n = header_n
    if n is None:
        if not rows:
            raise ParseError(f"{path}: empty edge list and no '# n=' header")
        n = int(max(max(rows), max(cols))) + 1
    if rows:
        lo = min(min(rows), min(cols))
        hi = max(max(rows), max(cols))
        if lo < 0 or hi >= n:
            raise IndexOutOfRange(f"{path}: index {hi if hi >= n else lo} outside [0, {n})")
    return InteractionMatrix(n, rows, cols, weights, "raw")
