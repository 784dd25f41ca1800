"""Reproducible randomness: counter-based Philox streams under one 64-bit seed.

Stream i is the master generator jumped i times, so distinct workers or
repetitions draw from provably disjoint counter ranges while the whole run
stays a pure function of the seed.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator number `index` of the family keyed by `seed`."""
    bitgen = np.random.Philox(key=seed & _MASK64)
    if index:
        bitgen = bitgen.jumped(index)
    return np.random.Generator(bitgen)
