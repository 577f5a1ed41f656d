"""Prefix-free dictionaries: explicit tries and lazy infinite families.

A dictionary is a prefix-free set of nonempty words over the source
alphabet. Finite dictionaries are stored as tries; infinite families
(run-length, single-word extensions over countable alphabets) answer the
same queries lazily and carry closed-form mass formulas so tail bounds
stay certified.

Classification of an arbitrary prefix against a dictionary:

* WORD     -- the prefix is a member.
* INTERNAL -- the prefix is a proper prefix of at least one member.
* DEAD     -- neither; no extension of the prefix is a member.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    ImproperDictionaryError,
    ResourceBudgetError,
    UnsupportedOperationError,
)
from .source import SourceModel, Word, canon_key, sort_words

INTERNAL = 0
WORD = 1
DEAD = 2

CERTIFIED_ASC = "certified_asc"
CERTIFIED_NOT_COMPLETE = "certified_not_complete"
UNDETERMINED = "undetermined"

DEFAULT_WIDTH = 64  # symbol budget for countable-alphabet enumerations


def find_prefix_violation(words):
    """Return a (prefix, longer) pair violating prefix-freeness, or None.

    After lexicographic sorting, any prefix relation appears between
    adjacent entries.
    """
    ws = sorted(tuple(w) for w in words)
    for a, b in zip(ws, ws[1:]):
        if len(a) < len(b) and b[: len(a)] == a:
            return a, b
    return None


@dataclass(frozen=True)
class TailStats:
    """Mass / average-length / entropy contributions of unenumerated words.

    Exact families report low == high; bounding paths report a bracket.
    """

    mass_low: float
    mass_high: float
    lbar_low: float
    lbar_high: float
    h_low: float
    h_high: float

    @classmethod
    def zero(cls) -> "TailStats":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    @classmethod
    def exact(cls, mass: float, lbar: float, h: float) -> "TailStats":
        return cls(mass, mass, lbar, lbar, h, h)

    def shifted(self, mass: float, lbar: float, h: float) -> "TailStats":
        return TailStats(
            self.mass_low + mass,
            self.mass_high + mass,
            self.lbar_low + lbar,
            self.lbar_high + lbar,
            self.h_low + h,
            self.h_high + h,
        )


class Dictionary:
    """Shared interface; immutable after construction, safe to share."""

    alphabet_size: int | None = None
    is_lazy = False

    def classify(self, word: Word) -> int:
        raise NotImplementedError

    def cursor(self):
        raise NotImplementedError

    def member_words(self, max_len: int, max_symbol: int | None = None) -> list:
        """All members of length <= max_len (symbols < max_symbol when the
        alphabet is countable), in canonical length-lex order."""
        raise NotImplementedError

    def fully_enumerated(self, max_len: int, max_symbol: int | None = None) -> bool:
        """True iff member_words(max_len, max_symbol) is the whole dictionary."""
        raise NotImplementedError

    def max_word_length(self) -> int | None:
        raise NotImplementedError

    def covered_mass(self, depth: int, source: SourceModel) -> float:
        """Exact sum of P(alpha) over members with |alpha| <= depth."""
        raise NotImplementedError

    def boundary_mass(self, depth: int, source: SourceModel) -> float:
        """P(T_depth): mass of length-`depth` strings with no member prefix.

        Equals 1 - covered_mass(depth) because a proper dictionary gives
        any string at most one member prefix.
        """
        mass = 1.0 - self.covered_mass(depth, source)
        return min(1.0, max(0.0, mass))

    def tail_stats(self, depth, width, source) -> TailStats | None:
        """Contributions of members outside the (depth, width) budget.

        None means the family has no certified formula; callers fall back
        to the generic frontier bound or report an unbounded interval.
        """
        return None

    def frontier_envelope(self, source) -> tuple | None:
        """(c, q) with P(T_m) <= c*q^m for all m >= 1 and q < 1, if known.

        Certified up to float rounding of exactly-zero residual terms.
        """
        return None

    def _width_for(self, max_symbol: int | None) -> int:
        if self.alphabet_size is not None:
            return self.alphabet_size
        if max_symbol is None:
            raise ResourceBudgetError(
                "width budget required to enumerate over a countable alphabet"
            )
        return max_symbol


class _TrieNode:
    __slots__ = ("children", "is_word")

    def __init__(self):
        self.children = {}
        self.is_word = False


class _TrieCursor:
    __slots__ = ("root", "node")

    def __init__(self, root):
        self.root = root
        self.node = root

    def reset(self):
        self.node = self.root

    def step(self, sym: int) -> int:
        node = self.node
        if node is None:
            return DEAD
        node = node.children.get(sym)
        self.node = node
        if node is None:
            return DEAD
        return WORD if node.is_word else INTERNAL


class FiniteDictionary(Dictionary):
    """Explicit prefix-free word set over a finite alphabet of size k."""

    def __init__(self, alphabet_size: int, words):
        if alphabet_size < 1:
            raise ValueError("alphabet size must be >= 1")
        ws = [tuple(w) for w in words]
        if not ws:
            raise ValueError("dictionary needs at least one word")
        seen = set()
        for w in ws:
            if not w:
                raise ValueError("empty word is not a valid dictionary member")
            for s in w:
                if not (0 <= s < alphabet_size):
                    raise ValueError(
                        f"symbol {s} out of range for alphabet size {alphabet_size}"
                    )
            if w in seen:
                raise ValueError(f"duplicate word {list(w)}")
            seen.add(w)
        violation = find_prefix_violation(ws)
        if violation is not None:
            raise ImproperDictionaryError(*violation)
        self.alphabet_size = alphabet_size
        self.words = tuple(sort_words(ws))
        self.word_set = frozenset(self.words)
        self._max_len = max(len(w) for w in self.words)
        self._root = _TrieNode()
        for w in self.words:
            node = self._root
            for s in w:
                nxt = node.children.get(s)
                if nxt is None:
                    nxt = _TrieNode()
                    node.children[s] = nxt
                node = nxt
            node.is_word = True

    def __repr__(self):
        return f"FiniteDictionary(k={self.alphabet_size}, words={len(self.words)})"

    def __eq__(self, other):
        return (
            isinstance(other, FiniteDictionary)
            and self.alphabet_size == other.alphabet_size
            and self.words == other.words
        )

    def __hash__(self):
        return hash((self.alphabet_size, self.words))

    @property
    def trie_root(self):
        return self._root

    def classify(self, word: Word) -> int:
        node = self._root
        for s in word:
            node = node.children.get(s)
            if node is None:
                return DEAD
        return WORD if node.is_word else INTERNAL

    def cursor(self):
        return _TrieCursor(self._root)

    def member_words(self, max_len, max_symbol=None):
        return [w for w in self.words if len(w) <= max_len]

    def fully_enumerated(self, max_len, max_symbol=None):
        return max_len >= self._max_len

    def max_word_length(self):
        return self._max_len

    def covered_mass(self, depth, source):
        return math.fsum(
            source.word_prob(w) for w in self.words if len(w) <= depth
        )

    def tail_stats(self, depth, width, source):
        rest = [w for w in self.words if len(w) > depth]
        if not rest:
            return TailStats.zero()
        probs = [source.word_prob(w) for w in rest]
        mass = math.fsum(probs)
        lbar = math.fsum(p * len(w) for p, w in zip(probs, rest))
        h = -math.fsum(p * math.log2(p) for p in probs)
        return TailStats.exact(mass, lbar, h)

    def is_complete(self) -> bool:
        """Complete iff every internal trie node has full branching."""
        k = self.alphabet_size
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.is_word:
                continue
            if len(node.children) != k:
                return False
            stack.extend(node.children.values())
        return True

    def frontier_envelope(self, source):
        if self.is_complete():
            # T_m empty past the deepest word; before that P(T_m) <= 1.
            return (2.0 ** self._max_len, 0.5)
        return None


class LazyDictionary(Dictionary):
    is_lazy = True

    def enumerate_up_to(self, max_len, max_symbol=None):
        return self.member_words(max_len, max_symbol)


class _AlphabetCursor:
    __slots__ = ("k", "n")

    def __init__(self, k):
        self.k = k
        self.n = 0

    def reset(self):
        self.n = 0

    def step(self, sym):
        self.n += 1
        if self.n > 1 or sym < 0:
            return DEAD
        if self.k is not None and sym >= self.k:
            return DEAD
        return WORD


class AlphabetDictionary(LazyDictionary):
    """D = A: every single symbol is a word. Countable when k is None."""

    def __init__(self, alphabet_size: int | None = None):
        if alphabet_size is not None and alphabet_size < 1:
            raise ValueError("alphabet size must be >= 1")
        self.alphabet_size = alphabet_size

    def __repr__(self):
        return f"AlphabetDictionary(k={self.alphabet_size})"

    def classify(self, word):
        if not word:
            return INTERNAL
        if len(word) > 1 or word[0] < 0:
            return DEAD
        if self.alphabet_size is not None and word[0] >= self.alphabet_size:
            return DEAD
        return WORD

    def cursor(self):
        return _AlphabetCursor(self.alphabet_size)

    def member_words(self, max_len, max_symbol=None):
        if max_len < 1:
            return []
        return [(i,) for i in range(self._width_for(max_symbol))]

    def fully_enumerated(self, max_len, max_symbol=None):
        return self.alphabet_size is not None and max_len >= 1

    def max_word_length(self):
        return 1

    def covered_mass(self, depth, source):
        return 1.0 if depth >= 1 else 0.0

    def tail_stats(self, depth, width, source):
        if depth < 1:
            return TailStats.exact(1.0, 1.0, source.entropy())
        if self.alphabet_size is not None:
            return TailStats.zero()
        w = self._width_for(width)
        m = source.tail_mass(w)
        return TailStats.exact(m, m, source.tail_surprisal_mass(w))

    def frontier_envelope(self, source):
        return (0.0, 0.5)


class _RunLengthCursor:
    __slots__ = ("state",)

    def __init__(self):
        self.state = 0  # 0 scanning ones, 1 word emitted, 2 dead

    def reset(self):
        self.state = 0

    def step(self, sym):
        if self.state != 0:
            return DEAD
        if sym == 1:
            return INTERNAL
        if sym == 0:
            self.state = 1
            return WORD
        self.state = 2
        return DEAD


class RunLengthDictionary(LazyDictionary):
    """Binary family {0, 10, 110, 1110, ...}: a run of ones ended by a zero.

    Proper; ASC over any binary source but never complete (the all-one
    sequence has no member prefix).
    """

    alphabet_size = 2

    def __repr__(self):
        return "RunLengthDictionary()"

    def classify(self, word):
        for i, s in enumerate(word):
            if s == 0:
                return WORD if i == len(word) - 1 else DEAD
            if s != 1:
                return DEAD
        return INTERNAL

    def cursor(self):
        return _RunLengthCursor()

    def member_words(self, max_len, max_symbol=None):
        return [(1,) * j + (0,) for j in range(max_len)]

    def fully_enumerated(self, max_len, max_symbol=None):
        return False

    def max_word_length(self):
        return None

    def _params(self, source):
        return source.symbol_prob(0), source.symbol_prob(1)

    def covered_mass(self, depth, source):
        p0, q = self._params(source)
        return p0 * (1.0 - q**depth) / (1.0 - q)

    def boundary_mass(self, depth, source):
        # 1 - covered = extra + coef*q^depth, evaluated without cancellation
        p0, q = self._params(source)
        coef = p0 / (1.0 - q)
        extra = 1.0 - coef
        return min(1.0, max(0.0, extra + coef * q**depth))

    def tail_stats(self, depth, width, source):
        p0, q = self._params(source)
        s1 = q**depth / (1.0 - q)
        s2 = q**depth * (depth * (1.0 - q) + q) / (1.0 - q) ** 2
        mass = p0 * s1
        lbar = p0 * (s2 + s1)
        h = -math.log2(p0) * p0 * s1 - math.log2(q) * p0 * s2
        return TailStats.exact(mass, lbar, h)

    def frontier_envelope(self, source):
        p0, q = self._params(source)
        coef = p0 / (1.0 - q)
        extra = 1.0 - coef
        if extra > 1e-12:
            # positive mass never covered (source has symbols beyond {0,1})
            return None
        return (coef + 1e-9, q)


class _ExtendedCursor:
    __slots__ = ("bc", "alpha", "k", "n", "matching", "state")

    def __init__(self, base_cursor, alpha, alphabet_size):
        self.bc = base_cursor
        self.alpha = alpha
        self.k = alphabet_size
        self.n = 0
        self.matching = True
        self.state = 0  # 0 tracking, 1 alpha fully consumed, 2 spent

    def reset(self):
        self.bc.reset()
        self.n = 0
        self.matching = True
        self.state = 0

    def step(self, sym):
        if self.state == 2:
            return DEAD
        if self.state == 1:
            self.state = 2
            ok = sym >= 0 and (self.k is None or sym < self.k)
            return WORD if ok else DEAD
        if self.matching and sym == self.alpha[self.n]:
            self.n += 1
            r = self.bc.step(sym)
            if self.n == len(self.alpha):
                self.state = 1
                return INTERNAL
            return r
        self.matching = False
        return self.bc.step(sym)


class ExtendedDictionary(LazyDictionary):
    """D[alpha] = (D \\ {alpha}) u alpha*A, materialized lazily.

    Used when the base or the alphabet cannot be materialized (infinite
    families, countable alphabets). Exact mass formulas compose from the
    base's, so certified measures survive extension.
    """

    def __init__(self, base: Dictionary, alpha):
        alpha = tuple(alpha)
        if base.classify(alpha) != WORD:
            raise ValueError(f"extension word {list(alpha)} is not in the dictionary")
        self.base = base
        self.alpha = alpha
        self.alphabet_size = base.alphabet_size

    def __repr__(self):
        return f"ExtendedDictionary({self.base!r}, alpha={list(self.alpha)})"

    def _check_width(self, max_symbol):
        if self.alphabet_size is None:
            w = self._width_for(max_symbol)
            if max(self.alpha) >= w:
                raise ResourceBudgetError(
                    f"width budget {w} does not cover extension word "
                    f"{list(self.alpha)}"
                )
            return w
        return self.alphabet_size

    def classify(self, word):
        la = len(self.alpha)
        if len(word) >= la and tuple(word[:la]) == self.alpha:
            if len(word) == la:
                return INTERNAL
            if len(word) == la + 1:
                s = word[la]
                ok = s >= 0 and (self.alphabet_size is None or s < self.alphabet_size)
                return WORD if ok else DEAD
            return DEAD
        return self.base.classify(word)

    def cursor(self):
        return _ExtendedCursor(self.base.cursor(), self.alpha, self.alphabet_size)

    def member_words(self, max_len, max_symbol=None):
        w = self._check_width(max_symbol)
        out = [
            x
            for x in self.base.member_words(max_len, max_symbol)
            if x != self.alpha
        ]
        if len(self.alpha) + 1 <= max_len:
            out.extend(self.alpha + (b,) for b in range(w))
        return sort_words(out)

    def fully_enumerated(self, max_len, max_symbol=None):
        if self.alphabet_size is None:
            return False
        return self.base.fully_enumerated(max_len, max_symbol) and (
            len(self.alpha) + 1 <= max_len
        )

    def max_word_length(self):
        base_max = self.base.max_word_length()
        if base_max is None:
            return None
        return max(base_max, len(self.alpha) + 1)

    def covered_mass(self, depth, source):
        la = len(self.alpha)
        mass = self.base.covered_mass(depth, source)
        pa = source.word_prob(self.alpha)
        if la <= depth:
            mass -= pa
        if la + 1 <= depth:
            mass += pa
        return mass

    def boundary_mass(self, depth, source):
        mass = self.base.boundary_mass(depth, source)
        if depth == len(self.alpha):
            mass += source.word_prob(self.alpha)
        return min(1.0, max(0.0, mass))

    def tail_stats(self, depth, width, source):
        bt = self.base.tail_stats(depth, width, source)
        if bt is None:
            return None
        self._check_width(width)
        la = len(self.alpha)
        pa = source.word_prob(self.alpha)
        surprisal_a = -math.log2(pa)
        if la > depth:
            bt = bt.shifted(-pa, -pa * la, -pa * surprisal_a)
        if la + 1 > depth:
            # all of alpha*A lies beyond the depth budget
            return bt.shifted(
                pa, pa * (la + 1), pa * (source.entropy() + surprisal_a)
            )
        if self.alphabet_size is not None:
            return bt
        w = self._width_for(width)
        m = source.tail_mass(w)
        s = source.tail_surprisal_mass(w)
        return bt.shifted(pa * m, pa * (la + 1) * m, pa * (s + surprisal_a * m))

    def frontier_envelope(self, source):
        env = self.base.frontier_envelope(source)
        if env is None:
            return None
        c, q = env
        pa = source.word_prob(self.alpha)
        return (c + pa / q ** len(self.alpha), q)


def head_extension(head: int = 0) -> ExtendedDictionary:
    """(A \\ {head}) u head*A over the countable alphabet.

    Equals extending the alphabet dictionary at the single-symbol word
    (head,); proper and complete over any source.
    """
    if head < 0:
        raise ValueError("head symbol must be a non-negative index")
    return ExtendedDictionary(AlphabetDictionary(None), (head,))


def parse(d: Dictionary, stream):
    """Greedy unique segmentation of a finite symbol stream.

    Returns (phrases, remainder): properness makes each match unique; the
    remainder is the trailing suffix that matches no word, and absorbs
    everything from the first position where no member can ever match.
    """
    seq = stream if isinstance(stream, (list, tuple)) else list(stream)
    phrases = []
    cur = d.cursor()
    start = 0
    for i, sym in enumerate(seq):
        c = cur.step(sym)
        if c == WORD:
            phrases.append(tuple(seq[start : i + 1]))
            start = i + 1
            cur.reset()
        elif c == DEAD:
            break
    return phrases, tuple(seq[start:])


def is_proper(d, depth: int = 32, max_symbol: int | None = None) -> bool:
    """True iff no member word is a strict prefix of another.

    Finite dictionaries are proper by construction; lazy families are
    checked over all members of length <= depth; a raw iterable of words
    is checked in full.
    """
    if isinstance(d, FiniteDictionary):
        return True
    if isinstance(d, Dictionary):
        words = d.member_words(depth, max_symbol if max_symbol else DEFAULT_WIDTH)
        return find_prefix_violation(words) is None
    return find_prefix_violation(d) is None


def is_complete(d, alphabet_size: int | None = None) -> bool:
    """Exact completeness decision for finite dictionaries over finite k.

    Equivalent to full branching of every internal trie node. Not finitely
    decidable for lazy families or countable alphabets; use is_asc there.
    """
    if not isinstance(d, FiniteDictionary):
        raise UnsupportedOperationError(
            "completeness is only decidable for finite dictionaries over a "
            "finite alphabet; use is_asc for lazy families"
        )
    if alphabet_size is not None and alphabet_size != d.alphabet_size:
        raise ValueError(
            f"alphabet size {alphabet_size} does not match dictionary "
            f"({d.alphabet_size})"
        )
    return d.is_complete()


@dataclass(frozen=True)
class AscVerdict:
    """Numeric certification of almost-sure completeness.

    certified_asc requires residual_mass < the tolerance passed in;
    undetermined carries the residual so callers can deepen the budget.
    """

    status: str
    depth_used: int
    residual_mass: float

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED_ASC


def is_asc(
    d: Dictionary,
    source: SourceModel,
    depth_budget: int = 64,
    tol: float = 1e-9,
) -> AscVerdict:
    """Certify P(T_n) < tol at n = depth_budget, or report the residual.

    P(T_m) = 1 - sum of P(alpha) over members with |alpha| <= m, computed
    from the dictionary's exact mass formulas.
    """
    if depth_budget < 1:
        raise ValueError("depth budget must be >= 1")
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    if not is_proper(d, depth_budget):
        raise ImproperDictionaryError(
            *find_prefix_violation(d.member_words(depth_budget, DEFAULT_WIDTH))
        )
    residual = d.boundary_mass(depth_budget, source)
    status = CERTIFIED_ASC if residual < tol else UNDETERMINED
    return AscVerdict(status=status, depth_used=depth_budget, residual_mass=residual)
