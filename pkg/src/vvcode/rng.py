"""Seedable 64-bit generator used everywhere randomness is needed.

The generator is pinned down exactly so that any reimplementation can
reproduce the same streams bit for bit:

* State update: xorshift64* (Marsaglia shift-register xorshift with a
  multiplicative output scrambler, Vigna's constants)::

      s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27        (mod 2^64)
      output = (s * 0x2545F4914F6CDD1D) mod 2^64

* Seeding: the raw 64-bit seed is passed through the splitmix64 mixer
  (`mix64` below, i.e. one splitmix64 step: add the golden-ratio gamma
  0x9E3779B97F4A7C15, then the 30/27/31 xor-multiply finalizer). A zero
  state is remapped to the gamma constant.

* Uniform doubles: the top 53 bits of the output word, scaled by 2^-53,
  giving values in [0, 1).

* Stream splitting: stream ``i`` of base seed ``s`` is seeded with
  ``s XOR mix64(i)``. Independent streams never share state, so parallel
  consumers need no coordination.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_STAR = 0x2545F4914F6CDD1D
_INV53 = 2.0**-53


def mix64(x: int) -> int:
    """One splitmix64 step: bijective 64-bit mixing of ``x``."""
    z = (x + _GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_seed(seed: int, stream: int) -> int:
    """Seed for sub-stream ``stream`` of ``seed`` (the split rule)."""
    return (seed & MASK64) ^ mix64(stream & MASK64)


class XorShift64Star:
    """xorshift64* generator; deterministic given the constructor seed."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        s = mix64(seed & MASK64)
        self.state = s if s != 0 else _GAMMA

    def next_u64(self) -> int:
        s = self.state
        s ^= s >> 12
        s = (s ^ (s << 25)) & MASK64
        s ^= s >> 27
        self.state = s
        return (s * _STAR) & MASK64

    def next_float(self) -> float:
        """Uniform double in [0, 1): top 53 bits of the next output word."""
        return (self.next_u64() >> 11) * _INV53
