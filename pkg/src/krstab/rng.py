"""Reproducible 64-bit random streams.

Experiment rows must be replayable from ``(master_seed, row_index)`` alone,
in any language, so the generator is pinned rather than borrowed from numpy:
SplitMix64 (Steele, Lea, Flood).  The state advances by the odd constant

    GAMMA = 0x9E3779B97F4A7C15

and each output is the new state scrambled by two xorshift-multiply rounds
with the published constants 0xBF58476D1CE4E5B9 (shift 30) and
0x94D049BB133111EB (shift 27), followed by a final shift of 31.  Because the
state is an affine counter, the i-th output of a stream is available in O(1)
via :func:`mix64`, which is what the harnesses use to derive per-row seeds.

Doubles take the top 53 bits of an output word, giving the uniform grid
``k * 2**-53`` on [0, 1).
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX_1 = 0xBF58476D1CE4E5B9
_MIX_2 = 0x94D049BB133111EB


def scramble(z: int) -> int:
    """Output function applied to a raw 64-bit state word."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_2) & _MASK
    return z ^ (z >> 31)


def mix64(seed: int, index: int) -> int:
    """The ``index``-th output (0-based) of the stream seeded with ``seed``.

    Equal to ``SplitMix64(seed)`` advanced ``index + 1`` times, but computed
    directly, so derived seeds for row k never require generating rows < k.
    """
    if index < 0:
        raise ValueError("index must be nonnegative")
    return scramble((seed + (index + 1) * GAMMA) & _MASK)


class SplitMix64:
    """Sequential stream over the generator above."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & _MASK
        return scramble(self._state)

    def next_double(self) -> float:
        """Uniform on [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def next_double_open(self) -> float:
        """Uniform on (0, 1]; safe as a log argument."""
        return ((self.next_u64() >> 11) + 1) * 2.0 ** -53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_double()

    def sign(self) -> float:
        """+1.0 or -1.0, from the top bit of one output word."""
        return 1.0 if (self.next_u64() >> 63) else -1.0

    def normal(self, sd: float = 1.0) -> float:
        """One Box-Muller draw; consumes exactly two output words."""
        u1 = self.next_double_open()
        u2 = self.next_double()
        return sd * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
