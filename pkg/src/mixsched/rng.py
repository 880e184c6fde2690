"""Deterministic counter-based random number generation.

Every stochastic choice in this package flows through the splitmix64
generator below: draw ``i`` of a stream is ``mix64(seed + (i+1) * GOLDEN)``,
a pure function of ``(seed, counter)``.  This makes every sequence
reproducible bit-for-bit across runs and platforms, allows random access
into a stream, and lets parallel consumers partition the counter space
without shared state.

Integer index selection (sample picking, shuffling) uses the integer path
only; 53-bit floating-point uniforms are derived from the high bits when a
continuous value is genuinely needed.
"""

from __future__ import annotations

import math

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = 0xFFFFFFFFFFFFFFFF
_INV_2_53 = 2.0**-53


def mix64(x: int) -> int:
    """splitmix64 finalizer: a bijective avalanche mix of a 64-bit word."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(seed: int, *stream: int) -> int:
    """Derive an independent child seed for a named substream.

    Folding each stream id through ``mix64`` keeps child streams
    decorrelated even for adjacent ids.
    """
    out = seed & _MASK64
    for s in stream:
        out = mix64((out ^ (s * GOLDEN)) & _MASK64)
    return out


class CounterRng:
    """Sequential view over a splitmix64 stream."""

    __slots__ = ("seed", "counter", "_spare_normal")

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self.counter = 0
        self._spare_normal: float | None = None

    def next_u64(self) -> int:
        self.counter += 1
        return mix64((self.seed + self.counter * GOLDEN) & _MASK64)

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * _INV_2_53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), integer arithmetic only (rejection)."""
        if n <= 0:
            raise ValueError(f"below() requires n >= 1, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            d = self.next_u64()
            if d < limit:
                return d % n

    def normal(self) -> float:
        """Standard normal draw (Box-Muller, pair cached)."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        # u1 in (0, 1] so log is finite
        u1 = ((self.next_u64() >> 11) + 1) * _INV_2_53
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)


def bit_block(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorized draws ``start .. start+count-1`` of a stream, as uint64."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    x = (np.uint64(seed) + idx * np.uint64(GOLDEN)).astype(np.uint64)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorized uniforms in [0, 1), matching ``CounterRng.uniform`` draws."""
    return (bit_block(seed, start, count) >> np.uint64(11)) * _INV_2_53


def normal_block(seed: int, count: int) -> np.ndarray:
    """Vectorized standard normals (Box-Muller over consecutive draw pairs)."""
    pairs = (count + 1) // 2
    bits = bit_block(seed, 0, 2 * pairs)
    u1 = ((bits[0::2] >> np.uint64(11)) + np.uint64(1)) * _INV_2_53
    u2 = (bits[1::2] >> np.uint64(11)) * _INV_2_53
    r = np.sqrt(-2.0 * np.log(u1))
    theta = (2.0 * np.pi) * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]
