"""Counter-based random streams for reproducible, order-independent replication.

Each stream is a Philox4x64 generator keyed by ``(seed, substream)``.  Philox
is counter-based: the key alone determines the whole stream, so replicate r
of an experiment with base seed s always reads from ``stream(s, r)`` and the
results cannot depend on execution order or parallel scheduling.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream"]

_MASK64 = (1 << 64) - 1


def stream(seed: int, substream: int = 0) -> np.random.Generator:
    """Generator for the Philox stream keyed by (seed, substream)."""
    key = np.array([seed & _MASK64, substream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
