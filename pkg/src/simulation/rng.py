"""
Random Streams
==============

Seed derivation and generator construction for reproducible parallel
Monte Carlo.

Each replication seeds its own counter-based Philox generator from
``derive_seed(master_seed, n, epsilon, index)``, so the stream of a
replication does not depend on execution order.

Seed derivation chains the SplitMix64 finalizer over the 64-bit words
(master_seed, n, IEEE-754 bits of epsilon, index):

    z = state + 0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

with all arithmetic modulo 2^64.
"""

import struct

import numpy as np

RNG_ALGORITHM = "philox4x64-10"
GAUSSIAN_TRANSFORM = "numpy-ziggurat"

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """SplitMix64 output for a 64-bit state."""
    z = (state + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def float_bits(value: float) -> int:
    """IEEE-754 binary64 bit pattern of a float."""
    return struct.unpack("<Q", struct.pack("<d", float(value)))[0]


def derive_seed(master_seed: int, n: int, epsilon: float, index: int) -> int:
    """64-bit seed of replication ``index`` in the (n, epsilon) cell."""
    state = int(master_seed) & _MASK64
    for word in (int(n), float_bits(epsilon), int(index)):
        state = splitmix64(state ^ (word & _MASK64))
    return state


def make_generator(seed: int) -> np.random.Generator:
    """Philox generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))
