"""Interval measures and the conservation / truncation / extension checks."""

import math

import pytest

from conftest import make_rng, random_proper_dictionary
from vvcode import (
    AlphabetDictionary,
    FiniteDictionary,
    RunLengthDictionary,
    SourceModel,
    avg_length,
    check_conservation,
    check_extension_identities,
    check_truncation_identity,
    convergence_scan,
    dict_entropy,
    extend,
    head_extension,
    is_complete,
    phrase_measures,
)
from vvcode.errors import UnsupportedOperationError
from vvcode.measures import Interval, generic_tail_bound

H_BIASED = 0.4689955935892812  # -0.9 log2 0.9 - 0.1 log2 0.1


class _NoTailRunLength(RunLengthDictionary):
    """Run-length family with its certified tails withheld; exercises the
    unbounded-interval path."""

    def tail_stats(self, depth, width, source):
        return None

    def frontier_envelope(self, source):
        return None


def run_length_series_oracle(source, terms=300):
    """Independent oracle: direct series sums for the run-length family."""
    words = [(1,) * k + (0,) for k in range(terms)]
    probs = [source.word_prob(w) for w in words]
    probs = [p for p in probs if p > 0.0]
    lbar = math.fsum(p * (k + 1) for k, p in enumerate(probs))
    h = -math.fsum(p * math.log2(p) for p in probs)
    return lbar, h


def test_dict_entropy_examples(complete_dict, fair, run_length):
    iv = dict_entropy(complete_dict, fair)
    assert iv.low == iv.high == pytest.approx(1.5, abs=1e-15)
    iv = dict_entropy(run_length, fair, depth=64)
    assert iv.width < 1e-9
    assert iv.contains(2.0, tol=1e-12)
    alphabet = FiniteDictionary(2, [(0,), (1,)])
    iv = dict_entropy(alphabet, fair)
    assert iv.low == iv.high == pytest.approx(1.0, abs=1e-15)


def test_avg_length_examples(complete_dict, fair, run_length, biased):
    iv = avg_length(complete_dict, fair)
    assert iv.low == iv.high == pytest.approx(1.5, abs=1e-15)
    iv = avg_length(run_length, biased, depth=64)
    assert iv.width < 1e-9
    assert iv.contains(10.0 / 9.0, tol=1e-12)
    alphabet = FiniteDictionary(2, [(0,), (1,)])
    assert avg_length(alphabet, biased).mid == pytest.approx(1.0, abs=1e-15)


def test_run_length_measures_match_series_oracle(fair, biased, run_length):
    for source in (fair, biased):
        lbar, h = run_length_series_oracle(source)
        assert avg_length(run_length, source, 64).mid == pytest.approx(
            lbar, rel=1e-12
        )
        assert dict_entropy(run_length, source, 64).mid == pytest.approx(
            h, rel=1e-12
        )


def test_generic_tail_path_brackets_exact(fair, run_length):
    exact = phrase_measures(run_length, fair, depth=32)
    generic = phrase_measures(run_length, fair, depth=32, exact_tails=False)
    assert generic.note == "tails bounded via frontier envelope"
    assert not generic.tails_exact
    for a, b in ((generic.entropy, exact.entropy), (generic.length, exact.length)):
        assert a.low <= b.low + 1e-15
        assert a.high >= b.high - 1e-15
    assert generic.entropy.contains(2.0, tol=1e-6)
    assert generic.length.contains(2.0, tol=1e-6)


def test_generic_tail_bound_conditions():
    assert generic_tail_bound(None, 8, (1.0, 0.5), 0.1) is None
    assert generic_tail_bound(2, 8, None, 0.1) is None
    assert generic_tail_bound(2, 1, (1.0, 0.9), 0.9) is None  # c q^n > 1/e
    zero = generic_tail_bound(2, 8, (0.0, 0.5), 0.0)
    assert zero.mass_high == zero.h_high == 0.0


def test_unbounded_interval_flagged(fair):
    d = _NoTailRunLength()
    pm = phrase_measures(d, fair, depth=16)
    assert pm.entropy.high == math.inf
    assert pm.length.high == math.inf
    assert "no certified tail bound" in pm.note
    partials = phrase_measures(RunLengthDictionary(), fair, 16, exact_tails=False)
    assert pm.entropy.low == pytest.approx(partials.entropy.low, rel=1e-12)


def test_possibly_divergent_flag(fair):
    d = _NoTailRunLength()
    pm = phrase_measures(d, fair, depth=16, divergence_ceiling=1.5)
    assert pm.possibly_divergent
    report = check_conservation(_NoTailRunLength(), fair, depth=16)
    assert report.verdict in ("inconclusive", "pass")  # tails unbounded
    pm2 = phrase_measures(RunLengthDictionary(), fair, 16, divergence_ceiling=1.5)
    assert not pm2.possibly_divergent  # certified tails, no divergence claim


def test_conservation_complete_dict(complete_dict, fair):
    report = check_conservation(complete_dict, fair, depth=8, tol=1e-12)
    assert report.verdict == "pass"
    assert report.residual <= 1e-12
    assert report.h_d_low == pytest.approx(1.5, abs=1e-15)
    assert report.lbar_low == pytest.approx(1.5, abs=1e-15)
    assert report.h_p == pytest.approx(1.0, abs=1e-15)


def test_conservation_run_length(fair, biased, run_length):
    report = check_conservation(run_length, fair, depth=64, tol=1e-9)
    assert report.verdict == "pass"
    assert report.h_d_low == pytest.approx(2.0, abs=1e-9)
    assert report.lbar_low == pytest.approx(2.0, abs=1e-9)
    report = check_conservation(run_length, biased, depth=64, tol=1e-9)
    assert report.verdict == "pass"
    assert report.lbar_low == pytest.approx(10.0 / 9.0, abs=1e-9)
    assert report.residual < 1e-9
    assert report.h_p == pytest.approx(H_BIASED, abs=1e-12)


def test_conservation_non_asc_is_inconclusive(fair, biased):
    zero = FiniteDictionary(2, [(0,)])
    for source in (fair, biased):
        report = check_conservation(zero, source, depth=20, tol=1e-9)
        assert report.verdict == "inconclusive"
        assert report.asc_status == "undetermined"
        assert "hypothesis" in report.note
    # for the biased source the equation genuinely fails: H(D) = 0.1368...
    # while H(P)*lbar = 0.4221...; the verdict still refuses to evaluate it
    h_d = dict_entropy(zero, biased).mid
    rhs = biased.entropy() * avg_length(zero, biased).mid
    assert abs(h_d - rhs) > 0.2


def test_conservation_head_extension(geometric_half):
    he = head_extension(0)
    report = check_conservation(he, geometric_half, depth=64, tol=1e-6, width=64)
    assert report.verdict == "pass"
    assert report.residual < 1e-6
    # closed form from the extension identity: H(D) = H(P) * (1 + P(head))
    closed = geometric_half.entropy() * (1.0 + geometric_half.symbol_prob(0))
    assert report.h_d_low == pytest.approx(closed, rel=1e-12)


def test_truncation_identity_examples(complete_dict, fair, run_length):
    rep = check_truncation_identity(complete_dict, fair, 1)
    assert rep.rows[0].h == pytest.approx(1.0, abs=1e-15)
    assert rep.rows[0].lbar == pytest.approx(1.0, abs=1e-15)
    assert rep.all_ok
    rep = check_truncation_identity(run_length, fair, 12, tol=1e-12)
    assert rep.all_ok and len(rep.rows) == 12
    zero = FiniteDictionary(2, [(0,)])
    rep = check_truncation_identity(zero, fair, 3, tol=1e-12)
    assert rep.all_ok  # holds despite {0} not being ASC
    rep = check_truncation_identity(zero, SourceModel.finite([0.9, 0.1]), 6)
    assert rep.all_ok


def test_truncation_identity_random_corpus(corpus, biased):
    for d in corpus[:20]:
        assert check_truncation_identity(d, biased, 12, tol=1e-9).all_ok


def test_extension_identities_examples(complete_dict, fair, biased):
    rep = check_extension_identities(complete_dict, (0,), fair)
    assert rep.delta_lbar == pytest.approx(0.5, abs=1e-12)
    assert rep.delta_h == pytest.approx(0.5, abs=1e-12)
    assert rep.ok
    alphabet = FiniteDictionary(2, [(0,), (1,)])
    rep = check_extension_identities(alphabet, (1,), fair)
    assert rep.delta_lbar == pytest.approx(0.5, abs=1e-12)
    assert rep.delta_h == pytest.approx(0.5, abs=1e-12)
    rep = check_extension_identities(complete_dict, (1, 1), biased)
    assert rep.delta_lbar == pytest.approx(0.01, abs=1e-12)
    assert rep.delta_h == pytest.approx(0.01 * H_BIASED, abs=1e-12)
    assert rep.ok


def test_extension_identities_lazy_unsupported(run_length, fair):
    with pytest.raises(UnsupportedOperationError):
        check_extension_identities(run_length, (0,), fair)


def test_extension_telescoping(biased):
    rng = make_rng(7)
    d = FiniteDictionary(2, [(0,), (1,)])
    total = 0.0
    lbar0 = avg_length(d, biased).mid
    for _ in range(6):
        alpha = d.words[int(rng.next_float() * len(d.words))]
        total += biased.word_prob(alpha)
        d = extend(d, alpha)
    assert avg_length(d, biased).mid - lbar0 == pytest.approx(total, abs=1e-9)


def test_convergence_scan_run_length(fair, run_length):
    rep = convergence_scan(run_length, fair, 20)
    assert rep.h_nondecreasing and rep.lbar_nondecreasing
    assert all(r.identity_residual < 1e-12 for r in rep.rows)
    assert rep.rows[-1].lbar == pytest.approx(2.0 - 2.0**-19, rel=1e-12)
    assert rep.final_h_gap < 1e-5
    assert rep.final_lbar_gap < 1e-5


def test_convergence_scan_constant_past_max_depth(complete_dict, fair):
    rep = convergence_scan(complete_dict, fair, 6)
    tail_rows = [r for r in rep.rows if r.m >= 2]
    assert all(r.h == tail_rows[0].h for r in tail_rows)
    assert all(r.lbar == tail_rows[0].lbar for r in tail_rows)


def test_convergence_scan_head_extension(geometric_half):
    rep = convergence_scan(head_extension(0), geometric_half, 4, max_symbol=64)
    assert rep.h_nondecreasing and rep.lbar_nondecreasing
    assert rep.rows[0].h == pytest.approx(2.0, abs=1e-9)
    assert rep.rows[-1].h == pytest.approx(3.0, abs=1e-3)
    assert rep.final_h_gap < 1e-3
    assert rep.final_lbar_gap < 1e-3


def test_conservation_residual_shrinks_with_depth(biased, run_length):
    r8 = check_conservation(run_length, biased, depth=8, exact_tails=False)
    r16 = check_conservation(run_length, biased, depth=16, exact_tails=False)
    assert r16.residual <= r8.residual + 1e-12


def test_interval_helpers():
    a = Interval(1.0, 2.0)
    assert a.mid == 1.5 and a.width == 1.0
    assert a.contains(1.0) and not a.contains(2.1)
    assert a.contains(2.1, tol=0.2)
    assert a.gap_to(Interval(3.0, 4.0)) == 1.0
    assert a.gap_to(Interval(1.5, 5.0)) == 0.0
    assert a.scaled(2.0) == Interval(2.0, 4.0)


def test_monotone_sandwich_truncations(fair, run_length):
    # partial member sums <= H(D_m) <= upper end of the H(D) interval
    full = phrase_measures(run_length, fair, depth=24)
    rep = convergence_scan(run_length, fair, 12)
    for row in rep.rows:
        members = run_length.member_words(row.m)
        partial = -math.fsum(
            fair.word_prob(w) * math.log2(fair.word_prob(w)) for w in members
        )
        assert partial <= row.h + 1e-12
        assert row.h <= full.entropy.high + 1e-12
