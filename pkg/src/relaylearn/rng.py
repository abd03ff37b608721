"""Seed mixing for reproducible, order-independent sampling."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer: maps any integer to a well-mixed 64-bit value.

    Used to turn (seed, stream index) pairs into independent sub-seeds.
    """
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent PCG64 generator for stream ``index`` of run ``seed``.

    The sub-seed is splitmix64(seed XOR index), so any stream can be
    reproduced on its own without generating its predecessors.
    """
    return np.random.Generator(np.random.PCG64(splitmix64((seed ^ index) & _MASK64)))
