"""Monte Carlo validation: sample phrase-by-phrase and compare the
empirical phrase distribution, average length and entropy with theory.

Sampling is chunked: phrases [c*4096, (c+1)*4096) always come from RNG
sub-stream c of the base seed, so a run is bit-identical regardless of
thread count or scheduling; chunk results merge in chunk order.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .dictionary import DEAD, WORD, Dictionary, FiniteDictionary
from .errors import SimulationAbortError
from .measures import phrase_measures
from .rng import XorShift64Star, stream_seed
from .source import SourceModel, Word, canon_key

CHUNK_PHRASES = 4096
DEFAULT_STEP_CAP = 10**6


def _resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("VVCODE_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _sample_chunk(d, source, n_phrases, seed, chunk_id, step_cap):
    """Counts and length moments for one chunk's worth of phrases."""
    rng = XorShift64Star(stream_seed(seed, chunk_id))
    draw = source.make_sampler(rng)
    counts = Counter()
    total = 0
    total_sq = 0
    if isinstance(d, FiniteDictionary):
        root = d.trie_root
        for _ in range(n_phrases):
            node = root
            syms = []
            while True:
                if len(syms) >= step_cap:
                    raise SimulationAbortError(
                        f"phrase exceeded {step_cap} symbols; stuck prefix "
                        f"starts {syms[:16]}"
                    )
                s = draw()
                syms.append(s)
                node = node.children.get(s)
                if node is None:
                    raise SimulationAbortError(
                        f"sampled prefix {syms[:16]} can never complete a "
                        "phrase (dictionary is not ASC for this source)"
                    )
                if node.is_word:
                    break
            counts[tuple(syms)] += 1
            n = len(syms)
            total += n
            total_sq += n * n
        return counts, total, total_sq
    cur = d.cursor()
    for _ in range(n_phrases):
        cur.reset()
        syms = []
        while True:
            if len(syms) >= step_cap:
                raise SimulationAbortError(
                    f"phrase exceeded {step_cap} symbols; stuck prefix "
                    f"starts {syms[:16]}"
                )
            s = draw()
            syms.append(s)
            c = cur.step(s)
            if c == WORD:
                break
            if c == DEAD:
                raise SimulationAbortError(
                    f"sampled prefix {syms[:16]} can never complete a "
                    "phrase (dictionary is not ASC for this source)"
                )
        counts[tuple(syms)] += 1
        n = len(syms)
        total += n
        total_sq += n * n
    return counts, total, total_sq


def _sample_phrases(d, source, n_phrases, seed, step_cap, threads):
    chunks = []
    start = 0
    cid = 0
    while start < n_phrases:
        size = min(CHUNK_PHRASES, n_phrases - start)
        chunks.append((cid, size))
        start += size
        cid += 1
    workers = _resolve_threads(threads)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda c: _sample_chunk(d, source, c[1], seed, c[0], step_cap),
                    chunks,
                )
            )
    else:
        results = [
            _sample_chunk(d, source, size, seed, cid, step_cap)
            for cid, size in chunks
        ]
    counts = Counter()
    total = 0
    total_sq = 0
    for c, t, tsq in results:
        counts.update(c)
        total += t
        total_sq += tsq
    return counts, total, total_sq


@dataclass(frozen=True)
class SimReport:
    """Empirical vs analytic phrase statistics for one seeded run.

    total_symbols / n_phrases equals empirical_lbar exactly (renewal
    accounting); z-scores standardize by the sampling stderr, with z = 0
    for deterministic exact matches (e.g. D = A, all lengths 1).
    """

    n_phrases: int
    total_symbols: int
    empirical_lbar: float
    stderr_lbar: float
    empirical_entropy: float
    theory_lbar: float
    theory_hd: float
    z_lbar: float
    top_phrases: tuple
    seed: int

    def as_dict(self):
        return {
            "n_phrases": self.n_phrases,
            "total_symbols": self.total_symbols,
            "empirical_lbar": self.empirical_lbar,
            "stderr_lbar": self.stderr_lbar,
            "empirical_entropy": self.empirical_entropy,
            "theory_lbar": self.theory_lbar,
            "theory_hd": self.theory_hd,
            "z_lbar": self.z_lbar,
            "top_phrases": [
                {"word": list(w), "count": c, "z": z} for w, c, z in self.top_phrases
            ],
            "seed": self.seed,
        }


def _z_for(diff: float, stderr: float) -> float:
    if stderr > 0.0:
        return diff / stderr
    return 0.0 if abs(diff) < 1e-12 else math.copysign(1e18, diff)


def simulate(
    d: Dictionary,
    source: SourceModel,
    n_phrases: int,
    seed: int = 42,
    step_cap: int = DEFAULT_STEP_CAP,
    depth: int = 64,
    width: int = 64,
    threads: int | None = None,
) -> SimReport:
    """Draw n_phrases complete phrases and report empirical vs theory.

    Deterministic given (dictionary, source, n_phrases, seed). The step
    cap guards the measure-zero non-terminating path; hitting it (or a
    dead prefix) raises with the stuck prefix named.
    """
    if n_phrases < 1:
        raise ValueError("n_phrases must be >= 1")
    counts, total, total_sq = _sample_phrases(
        d, source, n_phrases, seed, step_cap, threads
    )
    n = n_phrases
    lbar = total / n
    var = (total_sq - n * lbar * lbar) / (n - 1) if n > 1 else 0.0
    stderr = math.sqrt(max(var, 0.0) / n)
    entropy = -math.fsum(
        (c / n) * math.log2(c / n)
        for _, c in sorted(counts.items(), key=lambda kv: canon_key(kv[0]))
    )
    pm = phrase_measures(d, source, depth=depth, width=width)
    theory_lbar = pm.length.mid
    theory_hd = pm.entropy.mid
    top = sorted(counts.items(), key=lambda kv: (-kv[1], canon_key(kv[0])))[:5]
    top_rows = []
    for w, c in top:
        p = source.word_prob(w)
        expect = n * p
        sd = math.sqrt(n * p * (1.0 - p))
        top_rows.append((w, c, _z_for(c - expect, sd)))
    return SimReport(
        n_phrases=n,
        total_symbols=total,
        empirical_lbar=lbar,
        stderr_lbar=stderr,
        empirical_entropy=entropy,
        theory_lbar=theory_lbar,
        theory_hd=theory_hd,
        z_lbar=_z_for(lbar - theory_lbar, stderr),
        top_phrases=tuple(top_rows),
        seed=seed,
    )


@dataclass(frozen=True)
class HistogramReport:
    entries: tuple  # (word, count) in canonical order
    chi_square: float
    dof: int
    p_value: float
    n_phrases: int
    seed: int

    def as_dict(self):
        return {
            "entries": [{"word": list(w), "count": c} for w, c in self.entries],
            "chi_square": self.chi_square,
            "dof": self.dof,
            "p_value": self.p_value,
            "n_phrases": self.n_phrases,
            "seed": self.seed,
        }


def phrase_histogram(
    d: Dictionary,
    source: SourceModel,
    n_phrases: int,
    seed: int = 42,
    step_cap: int = DEFAULT_STEP_CAP,
    depth: int = 64,
    width: int = 64,
    threads: int | None = None,
) -> HistogramReport:
    """Phrase counts plus a chi-square goodness-of-fit against P(alpha).

    Bins are dictionary words with expected count >= 5; everything else
    (including the unenumerated tail) pools into one bin.
    """
    if n_phrases < 1:
        raise ValueError("n_phrases must be >= 1")
    counts, _, _ = _sample_phrases(d, source, n_phrases, seed, step_cap, threads)
    n = n_phrases
    eff_width = width
    if d.alphabet_size is None and source.alphabet_size is not None:
        eff_width = min(width, source.alphabet_size)
    members = d.member_words(depth, eff_width if d.alphabet_size is None else None)
    binned = []
    for w in members:
        expect = n * source.word_prob(w)
        if expect >= 5.0:
            binned.append((w, expect))
    stat = 0.0
    binned_obs = 0
    binned_exp = 0.0
    for w, expect in binned:
        obs = counts.get(w, 0)
        stat += (obs - expect) ** 2 / expect
        binned_obs += obs
        binned_exp += expect
    pooled_exp = n - binned_exp
    dof = len(binned) - 1
    if pooled_exp > 1e-9:
        pooled_obs = n - binned_obs
        stat += (pooled_obs - pooled_exp) ** 2 / pooled_exp
        dof += 1
    if dof < 1:
        p_value = 1.0
    else:
        from scipy.stats import chi2

        p_value = float(chi2.sf(stat, dof))
    entries = tuple(sorted(counts.items(), key=lambda kv: canon_key(kv[0])))
    return HistogramReport(
        entries=entries,
        chi_square=stat,
        dof=max(dof, 0),
        p_value=p_value,
        n_phrases=n,
        seed=seed,
    )
