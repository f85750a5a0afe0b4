"""Seeded, splittable random streams.

All randomness in the package flows through Philox counter-based generators
keyed by a 64-bit seed plus an integer path. Distinct paths give statistically
independent streams, so graph randomness, spin randomness, contamination and
search randomness never collide even when the caller reuses one seed. The
experiment harness extends the path with the replicate index, which is what
makes multi-threaded runs bit-identical to serial ones.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# Stream namespaces, one per randomness consumer.
STREAM_GRAPH = 1
STREAM_SPINS = 2
STREAM_CONTAMINATION = 3
STREAM_SEARCH = 4


def generator(seed: int, *path: int) -> np.random.Generator:
    """Return the Philox generator for ``seed`` at the given stream path."""
    seq = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(seq))


def child_seed(seed: int, *path: int) -> int:
    """Derive a 64-bit child seed; used to hand substreams to settings objects."""
    seq = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=tuple(int(p) for p in path))
    return int(seq.generate_state(1, dtype=np.uint64)[0])
