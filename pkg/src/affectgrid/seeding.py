"""Seed derivation. Every random stream traces back to one master seed."""

from __future__ import annotations

import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def mix64(x: int) -> int:
    """SplitMix64 finalizer."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, *keys: int | str) -> int:
    """Fold ``keys`` into ``master`` one at a time through the 64-bit mix."""
    s = master & MASK64
    for k in keys:
        if isinstance(k, str):
            k = zlib.crc32(k.encode("utf-8"))
        s = mix64(s ^ (k & MASK64))
    return s


def make_rng(master: int, *keys: int | str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *keys))
