"""Discrete memoryless sources over finite or countably infinite alphabets.

A source is a probability distribution P over symbol indices 0,1,2,...
Words are plain tuples of symbol indices; the empty tuple is the empty
word and has probability 1. All logs are base 2.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Tuple

from .rng import XorShift64Star

Word = Tuple[int, ...]

PROB_SUM_TOL = 1e-12  # constructor tolerance on |sum(probs) - 1|

FINITE = "finite"
GEOMETRIC = "geometric"


def canon_key(word: Word):
    """Canonical (length, then lexicographic) sort key for words."""
    return (len(word), word)


def sort_words(words) -> list:
    return sorted(words, key=canon_key)


@dataclass(frozen=True)
class SourceModel:
    """Memoryless source (P, A): finite probability table or geometric family.

    Geometric kind: symbol i in {0,1,2,...} has probability p*(1-p)^i.
    Immutable after construction; safe to share across threads.
    """

    kind: str
    probs: tuple = ()
    p: float = 0.0

    def __post_init__(self):
        if self.kind == FINITE:
            if not self.probs:
                raise ValueError("finite source needs at least one symbol")
            for q in self.probs:
                if not (0.0 < q <= 1.0):
                    raise ValueError(f"symbol probability {q} not in (0, 1]")
            total = math.fsum(self.probs)
            if abs(total - 1.0) > PROB_SUM_TOL:
                raise ValueError(f"probabilities sum to {total}, not 1")
        elif self.kind == GEOMETRIC:
            if not (0.0 < self.p < 1.0):
                raise ValueError(f"geometric parameter {self.p} not in (0, 1)")
        else:
            raise ValueError(f"unknown source kind {self.kind!r}")

    @classmethod
    def finite(cls, probs) -> "SourceModel":
        return cls(kind=FINITE, probs=tuple(float(q) for q in probs))

    @classmethod
    def fair_bit(cls) -> "SourceModel":
        return cls.finite([0.5, 0.5])

    @classmethod
    def geometric(cls, p: float) -> "SourceModel":
        return cls(kind=GEOMETRIC, p=float(p))

    @property
    def alphabet_size(self) -> int | None:
        """Number of symbols, or None for a countably infinite alphabet."""
        return len(self.probs) if self.kind == FINITE else None

    def symbol_prob(self, i: int) -> float:
        if i < 0:
            raise ValueError(f"symbol index {i} is negative")
        if self.kind == FINITE:
            if i >= len(self.probs):
                raise ValueError(
                    f"symbol index {i} out of range for alphabet size {len(self.probs)}"
                )
            return self.probs[i]
        return self.p * (1.0 - self.p) ** i

    def max_symbol_prob(self) -> float:
        return max(self.probs) if self.kind == FINITE else self.p

    def entropy(self) -> float:
        """H(P) in bits per symbol.

        Geometric kind uses the closed form
        (-(1-p)*log2(1-p) - p*log2(p)) / p.
        """
        if self.kind == FINITE:
            return -math.fsum(q * math.log2(q) for q in self.probs)
        p, q = self.p, 1.0 - self.p
        return (-q * math.log2(q) - p * math.log2(p)) / p

    def word_prob(self, word: Word) -> float:
        """Product-measure probability P(word); empty word -> 1."""
        if self.kind == FINITE:
            if not word:
                return 1.0
            if min(word) < 0 or max(word) >= len(self.probs):
                raise ValueError(
                    f"word {list(word)} has symbols outside alphabet size "
                    f"{len(self.probs)}"
                )
            return math.prod(map(self.probs.__getitem__, word), start=1.0)
        prob = 1.0
        for sym in word:
            prob *= self.symbol_prob(sym)
        return prob

    def word_surprisal(self, word: Word) -> float:
        """-log2 P(word), summed per symbol to avoid underflow on long words."""
        return -math.fsum(math.log2(self.symbol_prob(s)) for s in word)

    # Closed-form tails over symbol indices, used for certified bounds on
    # countable alphabets.

    def tail_mass(self, start: int) -> float:
        """Sum of P(i) over i >= start."""
        if self.kind == FINITE:
            return math.fsum(self.probs[start:]) if start < len(self.probs) else 0.0
        return (1.0 - self.p) ** start

    def tail_surprisal_mass(self, start: int) -> float:
        """Sum of -P(i)*log2 P(i) over i >= start (closed form for geometric)."""
        if self.kind == FINITE:
            return -math.fsum(q * math.log2(q) for q in self.probs[start:])
        p, q = self.p, 1.0 - self.p
        # sum_{i>=W} q^i = q^W/p ; sum_{i>=W} i q^i = q^W (W p + q)/p^2
        s1 = q**start / p
        s2 = q**start * (start * p + q) / (p * p)
        return p * (-math.log2(p) * s1 - math.log2(q) * s2)

    def sample_stream(self, seed: int, n: int) -> list:
        """n i.i.d. symbol draws, deterministic given (seed, n).

        Draw i uses the i-th uniform double of an XorShift64Star stream
        seeded with ``seed`` (see rng module for the exact generator).
        Finite kind maps the uniform through the inverse CDF (smallest
        symbol s with u < P(0)+...+P(s)); geometric kind uses
        floor(log(1-u)/log(1-p)).
        """
        if n < 0:
            raise ValueError("sample count must be >= 0")
        rng = XorShift64Star(seed)
        draw = self.make_sampler(rng)
        return [draw() for _ in range(n)]

    def make_sampler(self, rng: XorShift64Star) -> Callable[[], int]:
        """Bind an incremental symbol sampler to ``rng`` (one draw per call)."""
        nf = rng.next_float
        if self.kind == GEOMETRIC:
            log_q = math.log1p(-self.p)

            def draw_geometric() -> int:
                return int(math.log1p(-nf()) / log_q)

            return draw_geometric
        if len(self.probs) == 2:
            p0 = self.probs[0]

            def draw_bit() -> int:
                return 0 if nf() < p0 else 1

            return draw_bit
        cum = []
        acc = 0.0
        for q in self.probs:
            acc += q
            cum.append(acc)
        cum[-1] = 1.0
        top = len(cum) - 1

        def draw_finite() -> int:
            i = bisect_right(cum, nf())
            return i if i <= top else top

        return draw_finite
