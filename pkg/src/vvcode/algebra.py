"""Dictionary algebra: frontiers, truncations, cones, extension chains.

For a proper dictionary D and depth n:

* T_n       -- length-n strings with no member prefix (the uncovered frontier).
* D_n_perp  -- length-n members together with T_n.
* D_n       -- members shorter than n together with D_n_perp; proper, and
               complete over a finite alphabet.
* (D, beta) -- the cone: members having beta as a prefix.
* D[alpha]  -- the extension replacing member alpha by all one-symbol
               continuations alpha*A.

Truncations over countable alphabets take an explicit symbol budget and
report whether enumeration was exhaustive.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from math import fsum
from typing import Iterable, Sequence

from .dictionary import (
    DEAD,
    INTERNAL,
    WORD,
    Dictionary,
    ExtendedDictionary,
    FiniteDictionary,
)
from .errors import ConeHypothesisError, ResourceBudgetError
from .source import SourceModel, Word, sort_words

MAX_FRONTIER_WORDS = 1_000_000


def uncovered_frontier(
    d: Dictionary,
    depth: int,
    max_symbol: int | None = None,
    max_words: int = MAX_FRONTIER_WORDS,
):
    """Enumerate T_depth; returns (words, exhaustive).

    Depth-first over the symbol tree, pruning only below member words
    (dead zones still belong to the frontier). Countable alphabets are
    scanned for symbols < max_symbol and flagged non-exhaustive.
    """
    if depth < 1:
        raise ValueError("frontier depth must be >= 1")
    k = d.alphabet_size
    width = k if k is not None else d._width_for(max_symbol)
    exhaustive = k is not None
    out = []
    prefix = []

    def check_budget():
        if len(out) > max_words:
            raise ResourceBudgetError(
                f"frontier at depth {depth} exceeds max_words={max_words}"
            )

    def rec_trie(node):
        # fast path: walk trie nodes; None marks a dead zone, whose whole
        # subtree stays uncovered
        if len(prefix) == depth:
            out.append(tuple(prefix))
            check_budget()
            return
        children = node.children if node is not None else {}
        for s in range(width):
            child = children.get(s)
            if child is not None and child.is_word:
                continue
            prefix.append(s)
            rec_trie(child)
            prefix.pop()

    def rec_classify():
        if len(prefix) == depth:
            out.append(tuple(prefix))
            check_budget()
            return
        for s in range(width):
            prefix.append(s)
            if d.classify(tuple(prefix)) != WORD:
                rec_classify()
            prefix.pop()

    if isinstance(d, FiniteDictionary):
        rec_trie(d.trie_root)
    else:
        rec_classify()
    return sort_words(out), exhaustive


@dataclass(frozen=True)
class FrontierSets:
    """T_n, D_n_perp and D_n at one depth.

    d_n is the materialized dictionary over finite alphabets and None over
    countable ones (d_n_words still carries the budgeted enumeration).
    """

    n: int
    t_n: tuple
    d_n_perp: tuple
    d_n_words: tuple
    d_n: FiniteDictionary | None
    exhaustive: bool

    def as_dict(self):
        obj = {
            "n": self.n,
            "t_n": [list(w) for w in self.t_n],
            "d_n_perp": [list(w) for w in self.d_n_perp],
            "d_n": [list(w) for w in self.d_n_words],
            "exhaustive": self.exhaustive,
        }
        return obj


def truncate(
    d: Dictionary,
    depth: int,
    max_symbol: int | None = None,
    max_words: int = MAX_FRONTIER_WORDS,
    materialize: bool = True,
) -> FrontierSets:
    """Compute T_n, D_n_perp, D_n at n = depth.

    n = 1 reduces to the special case T_1 = {a in A : a not in D} and
    D_1 = A. materialize=False skips building the D_n trie (the word list
    is still returned); measure loops over many depths use it.
    """
    t_n, exhaustive = uncovered_frontier(d, depth, max_symbol, max_words)
    members = d.member_words(depth, max_symbol)
    exact_len = [w for w in members if len(w) == depth]
    shorter = [w for w in members if len(w) < depth]
    d_n_perp = tuple(sort_words(exact_len + t_n))
    d_n_words = tuple(sort_words(shorter + list(d_n_perp)))
    if d.alphabet_size is not None:
        d_n = FiniteDictionary(d.alphabet_size, d_n_words) if materialize else None
    else:
        d_n = None
        exhaustive = False
    return FrontierSets(
        n=depth,
        t_n=tuple(t_n),
        d_n_perp=d_n_perp,
        d_n_words=d_n_words,
        d_n=d_n,
        exhaustive=exhaustive,
    )


def extend(d: Dictionary, alpha) -> Dictionary:
    """D[alpha] = (D \\ {alpha}) u alpha*A.

    Finite dictionaries are materialized; lazy families and countable
    alphabets return a lazy extension with composed mass formulas.
    """
    alpha = tuple(alpha)
    if d.classify(alpha) != WORD:
        raise ValueError(f"extension word {list(alpha)} is not in the dictionary")
    if isinstance(d, FiniteDictionary):
        k = d.alphabet_size
        words = [w for w in d.words if w != alpha]
        words.extend(alpha + (b,) for b in range(k))
        return FiniteDictionary(k, words)
    return ExtendedDictionary(d, alpha)


@dataclass(frozen=True)
class ConeResult:
    beta: tuple
    words: tuple
    exhaustive: bool

    def as_dict(self):
        return {
            "beta": list(self.beta),
            "words": [list(w) for w in self.words],
            "exhaustive": self.exhaustive,
        }


def _check_cone_hypothesis(d: Dictionary, beta: Word):
    for ell in range(1, len(beta)):
        if d.classify(beta[:ell]) == WORD:
            raise ConeHypothesisError(
                f"cone prefix {list(beta)} has the shorter dictionary prefix "
                f"{list(beta[:ell])}; the cone-mass identity does not apply"
            )


def _open_cone_prefixes(d: Dictionary, beta: Word, depth: int, width: int):
    """Length-`depth` extensions of beta classified INTERNAL (members lie
    beyond them). Walks only internal paths, so stays small."""
    out = []
    if d.classify(beta) != INTERNAL or depth < len(beta):
        return out
    stack = [beta]
    while stack:
        prefix = stack.pop()
        if len(prefix) == depth:
            out.append(prefix)
            continue
        for s in range(width):
            if d.classify(prefix + (s,)) == INTERNAL:
                stack.append(prefix + (s,))
    return out


def cone(
    d: Dictionary,
    beta,
    depth_budget: int = 64,
    max_symbol: int | None = None,
) -> ConeResult:
    """(D, beta): all members with prefix beta, up to length depth_budget.

    The cone-mass hypothesis (beta has no strictly shorter member prefix) is
    checked and a violation raises rather than returning a set the
    cone-mass identity would be false for.
    """
    beta = tuple(beta)
    if depth_budget < len(beta):
        raise ValueError("depth budget shorter than the cone prefix")
    _check_cone_hypothesis(d, beta)
    lb = len(beta)
    words = [
        w for w in d.member_words(depth_budget, max_symbol) if w[:lb] == beta
    ]
    k = d.alphabet_size
    width = k if k is not None else d._width_for(max_symbol)
    exhaustive = d.fully_enumerated(depth_budget, max_symbol) or not _open_cone_prefixes(
        d, beta, depth_budget, width
    )
    if d.alphabet_size is None:
        exhaustive = False
    return ConeResult(beta=beta, words=tuple(sort_words(words)), exhaustive=exhaustive)


def cone_mass_bounds(
    d: Dictionary,
    beta,
    source: SourceModel,
    depth_budget: int = 64,
    max_symbol: int | None = None,
):
    """Bracket sum(P(alpha)) over the cone (D, beta).

    Low is the enumerated mass; members beyond the budget each extend an
    INTERNAL length-budget prefix, so their total mass is at most the mass
    of those open prefixes.
    """
    res = cone(d, beta, depth_budget, max_symbol)
    low = fsum(source.word_prob(w) for w in res.words)
    if res.exhaustive:
        return low, low
    k = d.alphabet_size
    width = k if k is not None else d._width_for(max_symbol)
    open_mass = fsum(
        source.word_prob(p)
        for p in _open_cone_prefixes(d, tuple(beta), depth_budget, width)
    )
    if d.alphabet_size is None:
        # symbols >= width unaccounted; fall back to the prefix mass bound
        open_mass = max(open_mass, source.word_prob(tuple(beta)) - low)
    return low, low + open_mass


class ExtensionChain:
    """The chain D_{m+1,k}: k single-word extensions of a base dictionary.

    extending_words may be a sequence or a callable returning a fresh
    iterator (countable T_m). Enumeration order is canonical where the
    chain is built from a truncation.
    """

    def __init__(self, base: Dictionary, extending_words):
        self.base = base
        if callable(extending_words):
            self._factory = extending_words
            self._words = None
        else:
            self._words = [tuple(w) for w in extending_words]
            self._factory = None

    @classmethod
    def from_truncation(
        cls, d: Dictionary, m: int, max_symbol: int | None = None
    ) -> "ExtensionChain":
        fs = truncate(d, m, max_symbol)
        if fs.d_n is None:
            raise ResourceBudgetError(
                "extension chains from truncations need a finite alphabet; "
                "construct the chain explicitly for countable alphabets"
            )
        return cls(fs.d_n, fs.t_n)

    def extending_words(self, k: int):
        if self._words is not None:
            if k > len(self._words):
                raise ValueError(
                    f"chain has {len(self._words)} extending words, {k} requested"
                )
            return self._words[:k]
        return [tuple(w) for w in islice(self._factory(), k)]

    def step(self, k: int) -> Dictionary:
        if k < 0:
            raise ValueError("chain step count must be >= 0")
        d = self.base
        for w in self.extending_words(k):
            d = extend(d, w)
        return d


def chain_step(chain: ExtensionChain, k: int) -> Dictionary:
    """D_{m+1,k}: the base after the first k single-word extensions."""
    return chain.step(k)
