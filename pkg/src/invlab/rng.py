"""Deterministic random streams with pinned bit-level semantics.

Experiments must reproduce bit for bit from a 64-bit seed, on any platform
and in any host language, so we do not lean on numpy's generators. The
integer stream is xoshiro256** (Blackman/Vigna), state-seeded through
splitmix64, both defined below exactly:

splitmix64 step (all arithmetic mod 2**64)::

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

xoshiro256** step (all arithmetic mod 2**64)::

    out = rotl(s1 * 5, 7) * 9
    t = s1 << 17
    s2 ^= s0 ; s3 ^= s1 ; s1 ^= s2 ; s0 ^= s3
    s2 ^= t  ; s3 = rotl(s3, 45)

The four state words are the first four splitmix64 outputs for the seed.
Derived draws are pinned too:

* uniform: ``(next_u64() >> 11) * 2.0**-53``, a double in [0, 1).
* normal: Box-Muller pairs in fixed draw order. Each pair consumes two
  uniforms u1, u2 (u1 redrawn while exactly zero) and yields first
  ``sqrt(-2 ln u1) * cos(2 pi u2)``, then ``sqrt(-2 ln u1) * sin(2 pi u2)``.
  The sine variate is cached and returned by the following call, so
  ``normals(k)`` consumes ``2 * ceil(k / 2)`` uniforms.

Integer outputs are bit-exact everywhere; the float transforms additionally
pin the operation order, so they agree wherever libm's log/cos/sin do.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def child_seed(seed: int, index: int) -> int:
    """The index-th splitmix64 output for ``seed`` (index >= 0).

    Used to carve independent named substreams out of one master seed.
    """
    if index < 0:
        raise ValueError("substream index must be nonnegative")
    state = seed & _MASK64
    out = 0
    for _ in range(index + 1):
        state, out = _splitmix64(state)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Rng:
    """xoshiro256** stream with uniform and Gaussian draws as documented above."""

    __slots__ = ("_s", "_spare")

    def __init__(self, seed: int):
        state = seed & _MASK64
        s = []
        for _ in range(4):
            state, out = _splitmix64(state)
            s.append(out)
        if not any(s):  # all-zero state is invalid for xoshiro
            s[0] = 1
        self._s = s
        self._spare: float | None = None

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        out = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return out

    def uniform(self) -> float:
        """Double in [0, 1) from the top 53 bits of the next word."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def normal(self) -> float:
        """Standard Gaussian, Box-Muller, fixed draw order."""
        if self._spare is not None:
            z = self._spare
            self._spare = None
            return z
        u1 = self.uniform()
        while u1 == 0.0:  # log(0) guard; consumes one extra uniform
            u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        a = 2.0 * math.pi * u2
        self._spare = r * math.sin(a)
        return r * math.cos(a)

    def normals(self, count: int) -> np.ndarray:
        """Array of ``count`` Gaussians in draw order."""
        return np.array([self.normal() for _ in range(count)], dtype=np.float64)
