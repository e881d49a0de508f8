"""Deterministic 64-bit seed derivation.

All randomness in the library flows from user-supplied integer seeds. Seeds for
inner solvers are derived from (seed, context) so that a value evaluated twice
with the same inputs sees the same random stream, no matter where in a search
or trial loop the evaluation happens.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def _mix(z: int) -> int:
    # SplitMix64 finalizer; the compiled and pure kernels use the same stream.
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _encode(part) -> int:
    if isinstance(part, (bool, int, np.integer)):
        return int(part) & _MASK
    if isinstance(part, (float, np.floating)):
        return int(np.float64(part).view(np.uint64))
    if isinstance(part, np.ndarray):
        acc = 0x6A09E667F3BCC908
        for bits in np.ascontiguousarray(part, dtype=np.float64).ravel().view(np.uint64):
            acc = _mix(acc ^ int(bits))
        return acc
    if isinstance(part, (tuple, list)):
        acc = 0xBB67AE8584CAA73B
        for p in part:
            acc = _mix(acc ^ _encode(p))
        return acc
    raise TypeError(f"cannot fold {type(part).__name__} into a seed")


def derive_seed(*parts) -> int:
    """Fold ints, floats, and float arrays into one uint64 seed.

    Floats are folded by their bit pattern, so equal values always derive equal
    seeds (and -0.0 differs from 0.0, which is fine: both are deterministic).
    """
    state = 0x9E3779B97F4A7C15
    for part in parts:
        state = _mix((state + _encode(part)) & _MASK)
    return state if state != 0 else 0x9E3779B97F4A7C15
