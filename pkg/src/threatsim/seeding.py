"""Deterministic 64-bit seed derivation for independent random streams."""

from __future__ import annotations

M64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer: full-avalanche bijection on 64-bit words."""
    z &= M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def derive_seed(*words: int) -> int:
    """Fold integer words into one 64-bit seed, splitmix64-style.

    The accumulator advances by the golden-ratio increment and absorbs each
    word through the avalanche, so nearby inputs map to unrelated outputs.
    """
    h = 0
    for w in words:
        h = (h + GOLDEN) & M64
        h = mix64(h ^ mix64(w))
    return h
