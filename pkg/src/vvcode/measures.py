"""Certified phrase-entropy and average-length measures.

H(D) = -sum P(a) log2 P(a) and lbar(D) = sum P(a)|a| over the dictionary,
evaluated as intervals: exact partial sums over an enumeration budget plus
tail contributions. Families with closed-form tails yield (near) exact
intervals; otherwise a generic frontier-envelope bound is used; failing
both, the upper end is infinite and flagged.

The conservation check compares H(D) against H(P)*lbar(D) and only issues
pass/fail when the dictionary is ASC-certified at the working depth; the
truncation identity H(D_n) = H(P)*lbar(D_n) is exact at every finite stage
and needs properness only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .algebra import truncate
from .dictionary import (
    DEFAULT_WIDTH,
    Dictionary,
    FiniteDictionary,
    TailStats,
    is_asc,
)
from .errors import UnsupportedOperationError
from .source import SourceModel, Word

INF = float("inf")

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Interval:
    low: float
    high: float

    @property
    def width(self) -> float:
        return self.high - self.low

    @property
    def mid(self) -> float:
        return (self.low + self.high) / 2.0

    def scaled(self, factor: float) -> "Interval":
        return Interval(self.low * factor, self.high * factor)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.low - tol <= x <= self.high + tol

    def gap_to(self, other: "Interval") -> float:
        """Separation between intervals; 0 when they overlap."""
        return max(other.low - self.high, self.low - other.high, 0.0)


def exact_word_measures(words, source: SourceModel):
    """(mass, lbar, entropy) as exact finite sums over an explicit word set."""
    probs = [source.word_prob(w) for w in words]
    mass = math.fsum(probs)
    lbar = math.fsum(p * len(w) for p, w in zip(probs, words))
    h = -math.fsum(p * math.log2(p) for p in probs)
    return mass, lbar, h


def _geom_sum(q: float, start: int) -> float:
    # sum_{m>=start} q^m
    return q**start / (1.0 - q)


def _geom_weighted_sum(q: float, start: int) -> float:
    # sum_{m>=start} m q^m
    return q**start * (start * (1.0 - q) + q) / (1.0 - q) ** 2


def generic_tail_bound(
    alphabet_size: int | None,
    depth: int,
    envelope,
    frontier_mass: float,
) -> TailStats | None:
    """Frontier-envelope tail bound for members longer than `depth`.

    Given P(T_m) <= c*q^m (q < 1), members of length m carry mass
    w_m <= c*q^(m-1), so with t_j = c*q^j and s1/s2 the geometric sums
    from j = depth:

        mass  <= min(frontier_mass, c*s1)
        lbar  <= sum_{m>depth} m*t_(m-1) = (c/q) * s2(depth+1)
        H     <= log2(k)*lbar_bound + sum_{j>=depth} -t_j log2 t_j
              =  log2(k)*lbar_bound + c*(-log2 c)*s1 + c*(-log2 q)*s2

    The entropy step spreads each length-m mass uniformly (the maximizing
    arrangement over at most k^m strings) and uses that -w log2 w is
    nondecreasing for w <= 1/e, which requires c*q^depth <= 1/e.
    """
    if envelope is None or alphabet_size is None or alphabet_size < 2:
        return None
    c, q = envelope
    if c == 0.0:
        return TailStats.zero()
    if not (0.0 < q < 1.0) or c * q**depth > 1.0 / math.e:
        return None
    s1 = _geom_sum(q, depth)
    s2 = _geom_weighted_sum(q, depth)
    mass_high = min(frontier_mass, c * s1)
    lbar_high = (c / q) * _geom_weighted_sum(q, depth + 1)
    h_high = (
        math.log2(alphabet_size) * lbar_high
        + c * (-math.log2(c)) * s1
        + c * (-math.log2(q)) * s2
    )
    return TailStats(0.0, mass_high, 0.0, lbar_high, 0.0, h_high)


@dataclass(frozen=True)
class PhraseMeasures:
    """Interval measures of one dictionary under one source at one budget."""

    entropy: Interval
    length: Interval
    mass: Interval
    frontier_mass: float
    depth: int
    width: int | None
    exhaustive: bool
    tails_exact: bool
    possibly_divergent: bool
    note: str = ""


def phrase_measures(
    d: Dictionary,
    source: SourceModel,
    depth: int = 64,
    width: int = DEFAULT_WIDTH,
    exact_tails: bool = True,
    divergence_ceiling: float = 1e6,
    frontier_tol: float = 1e-9,
) -> PhraseMeasures:
    """Bracket H(D), lbar(D) and the member mass at a (depth, width) budget.

    exact_tails=False skips family closed forms and exercises the generic
    frontier-envelope bound (used for cross-checking).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    eff_width: int | None
    if d.alphabet_size is not None:
        eff_width = None
    elif source.alphabet_size is not None:
        eff_width = min(width, source.alphabet_size)
    else:
        eff_width = width
    words = d.member_words(depth, eff_width)
    partial_mass, partial_lbar, partial_h = exact_word_measures(words, source)
    frontier_mass = d.boundary_mass(depth, source)

    note = ""
    tails = d.tail_stats(depth, eff_width, source) if exact_tails else None
    tails_exact = tails is not None and (
        tails.mass_low == tails.mass_high
        and tails.lbar_low == tails.lbar_high
        and tails.h_low == tails.h_high
    )
    if tails is None:
        tails = generic_tail_bound(
            d.alphabet_size, depth, d.frontier_envelope(source), frontier_mass
        )
        if tails is not None:
            note = "tails bounded via frontier envelope"
    if tails is None:
        tails = TailStats(
            0.0, max(0.0, 1.0 - partial_mass), 0.0, INF, 0.0, INF
        )
        note = "no certified tail bound for this family; upper ends unbounded"

    entropy = Interval(partial_h + tails.h_low, partial_h + tails.h_high)
    length = Interval(partial_lbar + tails.lbar_low, partial_lbar + tails.lbar_high)
    mass = Interval(partial_mass + tails.mass_low, partial_mass + tails.mass_high)
    possibly_divergent = (
        length.high == INF
        and partial_lbar > divergence_ceiling
        and frontier_mass > frontier_tol
    )
    if possibly_divergent:
        note = "possibly divergent: partial average length exceeded the ceiling"
    return PhraseMeasures(
        entropy=entropy,
        length=length,
        mass=mass,
        frontier_mass=frontier_mass,
        depth=depth,
        width=eff_width,
        exhaustive=d.fully_enumerated(depth, eff_width),
        tails_exact=tails_exact,
        possibly_divergent=possibly_divergent,
        note=note,
    )


def dict_entropy(
    d: Dictionary,
    source: SourceModel,
    depth: int = 64,
    width: int = DEFAULT_WIDTH,
    exact_tails: bool = True,
) -> Interval:
    """Interval for H(D) = -sum P(alpha) log2 P(alpha) in bits."""
    return phrase_measures(d, source, depth, width, exact_tails).entropy


def avg_length(
    d: Dictionary,
    source: SourceModel,
    depth: int = 64,
    width: int = DEFAULT_WIDTH,
    exact_tails: bool = True,
) -> Interval:
    """Interval for lbar(D) = sum P(alpha)|alpha| in symbols."""
    return phrase_measures(d, source, depth, width, exact_tails).length


@dataclass(frozen=True)
class MeasureReport:
    """Conservation-check report: intervals, residual and verdict."""

    h_d_low: float
    h_d_high: float
    lbar_low: float
    lbar_high: float
    h_p: float
    residual: float
    depth_used: int
    frontier_mass: float
    verdict: str
    asc_status: str
    tol: float
    possibly_divergent: bool = False
    note: str = ""

    def as_dict(self):
        return {
            "h_d_low": self.h_d_low,
            "h_d_high": self.h_d_high,
            "lbar_low": self.lbar_low,
            "lbar_high": self.lbar_high,
            "h_p": self.h_p,
            "residual": self.residual,
            "depth_used": self.depth_used,
            "frontier_mass": self.frontier_mass,
            "verdict": self.verdict,
            "asc_status": self.asc_status,
            "tol": self.tol,
            "possibly_divergent": self.possibly_divergent,
            "note": self.note,
        }


def check_conservation(
    d: Dictionary,
    source: SourceModel,
    depth: int = 64,
    tol: float = 1e-9,
    width: int = DEFAULT_WIDTH,
    exact_tails: bool = True,
) -> MeasureReport:
    """Verify H(D) = H(P)*lbar(D) numerically at the given budget.

    Pass requires the ASC certificate (the conservation law's hypothesis);
    inputs yield an inconclusive verdict with a note rather than
    evaluating the equation as if it applied.
    """
    verdict_note = ""
    asc = is_asc(d, source, depth, tol)
    pm = phrase_measures(d, source, depth, width, exact_tails)
    h_p = source.entropy()
    rhs = pm.length.scaled(h_p)
    residual = abs(pm.entropy.mid - h_p * pm.length.mid)
    slack = (pm.entropy.width + rhs.width) / 2.0
    if not asc.certified:
        verdict = INCONCLUSIVE
        verdict_note = (
            "conservation hypothesis unmet: dictionary is not ASC-certified at "
            f"this depth (residual mass {asc.residual_mass:.3g})"
        )
    elif pm.possibly_divergent:
        verdict = INCONCLUSIVE
        verdict_note = pm.note
    elif math.isfinite(slack) and residual <= tol + slack:
        verdict = PASS
    elif pm.entropy.gap_to(rhs) > tol:
        verdict = FAIL
        verdict_note = "interval for H(D) is separated from H(P)*lbar(D)"
    else:
        verdict = INCONCLUSIVE
        verdict_note = pm.note or "intervals too wide to decide at this budget"
    return MeasureReport(
        h_d_low=pm.entropy.low,
        h_d_high=pm.entropy.high,
        lbar_low=pm.length.low,
        lbar_high=pm.length.high,
        h_p=h_p,
        residual=residual,
        depth_used=depth,
        frontier_mass=pm.frontier_mass,
        verdict=verdict,
        asc_status=asc.status,
        tol=tol,
        possibly_divergent=pm.possibly_divergent,
        note=verdict_note,
    )


@dataclass(frozen=True)
class TruncationRow:
    m: int
    h: float
    lbar: float
    mass: float
    residual: float
    ok: bool


@dataclass(frozen=True)
class TruncationIdentityReport:
    h_p: float
    rows: tuple
    all_ok: bool

    def as_dict(self):
        return {
            "h_p": self.h_p,
            "all_ok": self.all_ok,
            "rows": [
                {
                    "m": r.m,
                    "h": r.h,
                    "lbar": r.lbar,
                    "mass": r.mass,
                    "residual": r.residual,
                    "ok": r.ok,
                }
                for r in self.rows
            ],
        }


def check_truncation_identity(
    d: Dictionary,
    source: SourceModel,
    m_max: int,
    tol: float = 1e-9,
    max_symbol: int | None = None,
) -> TruncationIdentityReport:
    """Check H(D_m) = H(P)*lbar(D_m) exactly for m = 1..m_max.

    Finite sums at every stage; requires properness only, not ASC.
    Countable alphabets are evaluated within the symbol budget.
    """
    h_p = source.entropy()
    rows = []
    for m in range(1, m_max + 1):
        fs = truncate(d, m, max_symbol, materialize=False)
        mass, lbar, h = exact_word_measures(fs.d_n_words, source)
        residual = abs(h - h_p * lbar)
        rows.append(
            TruncationRow(m=m, h=h, lbar=lbar, mass=mass, residual=residual,
                          ok=residual <= tol)
        )
    return TruncationIdentityReport(
        h_p=h_p, rows=tuple(rows), all_ok=all(r.ok for r in rows)
    )


@dataclass(frozen=True)
class ExtensionIdentityReport:
    p_alpha: float
    delta_lbar: float
    delta_h: float
    lbar_residual: float
    h_residual: float
    lbar_ok: bool
    h_ok: bool

    @property
    def ok(self) -> bool:
        return self.lbar_ok and self.h_ok


def check_extension_identities(
    d: Dictionary,
    alpha,
    source: SourceModel,
    tol: float = 1e-9,
) -> ExtensionIdentityReport:
    """Verify lbar(D[alpha]) - lbar(D) = P(alpha) and
    H(D[alpha]) - H(D) = P(alpha)*H(P) by exact finite sums."""
    from .algebra import extend

    if not isinstance(d, FiniteDictionary):
        raise UnsupportedOperationError(
            "extension identities need a finite materialization; use the "
            "interval measures for lazy families"
        )
    alpha = tuple(alpha)
    ext = extend(d, alpha)
    _, lbar0, h0 = exact_word_measures(d.words, source)
    _, lbar1, h1 = exact_word_measures(ext.words, source)
    p_alpha = source.word_prob(alpha)
    delta_lbar = lbar1 - lbar0
    delta_h = h1 - h0
    lbar_residual = abs(delta_lbar - p_alpha)
    h_residual = abs(delta_h - p_alpha * source.entropy())
    return ExtensionIdentityReport(
        p_alpha=p_alpha,
        delta_lbar=delta_lbar,
        delta_h=delta_h,
        lbar_residual=lbar_residual,
        h_residual=h_residual,
        lbar_ok=lbar_residual <= tol,
        h_ok=h_residual <= tol,
    )


@dataclass(frozen=True)
class ScanRow:
    m: int
    h: float
    lbar: float
    identity_residual: float


@dataclass(frozen=True)
class ScanReport:
    rows: tuple
    h_nondecreasing: bool
    lbar_nondecreasing: bool
    final_h_gap: float
    final_lbar_gap: float

    def as_dict(self):
        return {
            "h_nondecreasing": self.h_nondecreasing,
            "lbar_nondecreasing": self.lbar_nondecreasing,
            "final_h_gap": self.final_h_gap,
            "final_lbar_gap": self.final_lbar_gap,
            "rows": [
                {
                    "m": r.m,
                    "h": r.h,
                    "lbar": r.lbar,
                    "identity_residual": r.identity_residual,
                }
                for r in self.rows
            ],
        }


def convergence_scan(
    d: Dictionary,
    source: SourceModel,
    m_max: int,
    max_symbol: int | None = None,
    width: int = DEFAULT_WIDTH,
) -> ScanReport:
    """Emit (m, H(D_m), lbar(D_m)) for m = 1..m_max with monotonicity flags.

    Truncation measures are nondecreasing in m for any proper dictionary
    (every extension adds P(alpha) >= 0); the final gaps compare against
    the interval midpoints of the full-dictionary measures at depth m_max.
    """
    h_p = source.entropy()
    rows = []
    for m in range(1, m_max + 1):
        fs = truncate(d, m, max_symbol, materialize=False)
        _, lbar, h = exact_word_measures(fs.d_n_words, source)
        rows.append(
            ScanRow(m=m, h=h, lbar=lbar, identity_residual=abs(h - h_p * lbar))
        )
    eps = 1e-12
    h_mono = all(b.h >= a.h - eps for a, b in zip(rows, rows[1:]))
    l_mono = all(b.lbar >= a.lbar - eps for a, b in zip(rows, rows[1:]))
    pm = phrase_measures(d, source, depth=m_max, width=width)
    final_h_gap = abs(pm.entropy.mid - rows[-1].h) if rows else INF
    final_lbar_gap = abs(pm.length.mid - rows[-1].lbar) if rows else INF
    return ScanReport(
        rows=tuple(rows),
        h_nondecreasing=h_mono,
        lbar_nondecreasing=l_mono,
        final_h_gap=final_h_gap,
        final_lbar_gap=final_lbar_gap,
    )
