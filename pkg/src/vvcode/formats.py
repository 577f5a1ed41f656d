"""File interfaces: JSON specs for sources, dictionaries and codebooks,
symbol-stream files, and CSV report rows.

Source spec:      {"kind": "finite", "probs": [...]} (numbers or decimal
                  strings) or {"kind": "geometric", "p": 0.5}. Probabilities
                  are renormalized only when |sum - 1| <= 1e-9, else rejected.
Dictionary spec:  {"kind": "finite", "alphabet_size": k, "words": [[...], ...]}
                  with words in canonical order, or
                  {"kind": "lazy", "family": "run_length"} /
                  {"kind": "lazy", "family": "head_extension", "head": i}.
Codebook spec:    {"phrases": [[...], ...], "codewords": ["0101", ...]}.
Stream text:      whitespace-separated symbol indices; raw bit files unpack
                  each byte MSB-first (binary alphabets only).

CSV column orders (stable for spreadsheet diffing):

    measure report: verdict, residual, h_d_low, h_d_high, lbar_low,
                    lbar_high, h_p, frontier_mass, depth_used, tol,
                    asc_status, possibly_divergent
    sim report:     n_phrases, total_symbols, empirical_lbar, stderr_lbar,
                    empirical_entropy, theory_lbar, theory_hd, z_lbar, seed
    histogram:      word, count
"""

from __future__ import annotations

import json
import math
import os

from .codec import PhraseCodebook
from .dictionary import (
    AlphabetDictionary,
    Dictionary,
    ExtendedDictionary,
    FiniteDictionary,
    RunLengthDictionary,
    head_extension,
)
from .errors import InputFormatError, UnsupportedOperationError
from .measures import MeasureReport
from .simulation import HistogramReport, SimReport
from .source import SourceModel, Word

LOADER_SUM_TOL = 1e-9


def load_json_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON ({exc})") from exc


def _as_obj(spec):
    if isinstance(spec, (str, os.PathLike)):
        return load_json_file(spec)
    return spec


def load_source(spec) -> SourceModel:
    """Build a SourceModel from a JSON object or a path to one."""
    obj = _as_obj(spec)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputFormatError("source spec must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "finite":
        raw = obj.get("probs")
        if not isinstance(raw, list) or not raw:
            raise InputFormatError("finite source needs a nonempty 'probs' list")
        try:
            probs = [float(x) for x in raw]
        except (TypeError, ValueError) as exc:
            raise InputFormatError(f"bad probability value: {exc}") from exc
        total = math.fsum(probs)
        if abs(total - 1.0) > LOADER_SUM_TOL:
            raise InputFormatError(
                f"probabilities sum to {total!r}; |sum-1| exceeds {LOADER_SUM_TOL}"
            )
        probs = [p / total for p in probs]
        try:
            return SourceModel.finite(probs)
        except ValueError as exc:
            raise InputFormatError(str(exc)) from exc
    if kind == "geometric":
        try:
            return SourceModel.geometric(float(obj.get("p")))
        except (TypeError, ValueError) as exc:
            raise InputFormatError(f"bad geometric parameter: {exc}") from exc
    raise InputFormatError(f"unknown source kind {kind!r}")


def save_source(s: SourceModel) -> dict:
    if s.kind == "finite":
        return {"kind": "finite", "probs": list(s.probs)}
    return {"kind": "geometric", "p": s.p}


def load_dictionary(spec) -> Dictionary:
    """Build a dictionary from a JSON object or a path to one.

    Non-proper finite word sets are rejected with the offending prefix
    pair named (ImproperDictionaryError).
    """
    obj = _as_obj(spec)
    if not isinstance(obj, dict):
        raise InputFormatError("dictionary spec must be a JSON object")
    family = obj.get("family")
    kind = obj.get("kind", "lazy" if family else None)
    if kind == "finite":
        k = obj.get("alphabet_size")
        words = obj.get("words")
        if not isinstance(k, int) or not isinstance(words, list):
            raise InputFormatError(
                "finite dictionary needs integer 'alphabet_size' and a 'words' list"
            )
        try:
            return FiniteDictionary(k, [tuple(w) for w in words])
        except TypeError as exc:
            raise InputFormatError(f"bad word list: {exc}") from exc
    if kind == "lazy":
        if family == "run_length":
            return RunLengthDictionary()
        if family == "head_extension":
            head = obj.get("head", 0)
            if not isinstance(head, int) or head < 0:
                raise InputFormatError("head_extension needs a non-negative 'head'")
            return head_extension(head)
        raise InputFormatError(f"unknown lazy family {family!r}")
    raise InputFormatError(f"unknown dictionary kind {kind!r}")


def save_dictionary(d: Dictionary) -> dict:
    if isinstance(d, FiniteDictionary):
        return {
            "kind": "finite",
            "alphabet_size": d.alphabet_size,
            "words": [list(w) for w in d.words],
        }
    if isinstance(d, RunLengthDictionary):
        return {"kind": "lazy", "family": "run_length"}
    if (
        isinstance(d, ExtendedDictionary)
        and isinstance(d.base, AlphabetDictionary)
        and d.base.alphabet_size is None
        and len(d.alpha) == 1
    ):
        return {"kind": "lazy", "family": "head_extension", "head": d.alpha[0]}
    raise UnsupportedOperationError(f"no file representation for {d!r}")


def load_codebook(spec) -> PhraseCodebook:
    obj = _as_obj(spec)
    if (
        not isinstance(obj, dict)
        or not isinstance(obj.get("phrases"), list)
        or not isinstance(obj.get("codewords"), list)
    ):
        raise InputFormatError("codebook needs 'phrases' and 'codewords' lists")
    if len(obj["phrases"]) != len(obj["codewords"]):
        raise InputFormatError("codebook phrase/codeword counts differ")
    try:
        return PhraseCodebook.from_pairs(zip(
            (tuple(w) for w in obj["phrases"]), obj["codewords"]
        ))
    except (TypeError, ValueError) as exc:
        raise InputFormatError(f"bad codebook: {exc}") from exc


def parse_word_text(text: str) -> Word:
    """Word from CLI text: '110' (single-digit symbols) or '1,10,2'."""
    text = text.strip()
    if not text:
        return ()
    try:
        if "," in text:
            return tuple(int(t) for t in text.split(","))
        return tuple(int(ch) for ch in text)
    except ValueError as exc:
        raise InputFormatError(f"bad word {text!r}: {exc}") from exc


def word_to_text(word: Word) -> str:
    if all(0 <= s <= 9 for s in word):
        return "".join(str(s) for s in word)
    return ",".join(str(s) for s in word)


def read_stream_text(path) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        toks = fh.read().split()
    try:
        return [int(t) for t in toks]
    except ValueError as exc:
        raise InputFormatError(f"{path}: stream must be whitespace-separated "
                               f"symbol indices ({exc})") from exc


def write_stream_text(path, symbols):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(" ".join(str(s) for s in symbols))
        fh.write("\n")


def read_bit_stream(path) -> list:
    """Raw bit file: every byte unpacks to 8 symbols, MSB first."""
    with open(path, "rb") as fh:
        data = fh.read()
    out = []
    for byte in data:
        for shift in range(7, -1, -1):
            out.append((byte >> shift) & 1)
    return out


def write_bit_stream(path, symbols):
    bad = [s for s in symbols if s not in (0, 1)]
    if bad:
        raise InputFormatError(
            f"raw bit output needs binary symbols; saw {bad[0]}"
        )
    buf = bytearray()
    acc = 0
    nbits = 0
    for s in symbols:
        acc = (acc << 1) | s
        nbits += 1
        if nbits == 8:
            buf.append(acc)
            acc = 0
            nbits = 0
    if nbits:
        buf.append(acc << (8 - nbits))
    with open(path, "wb") as fh:
        fh.write(bytes(buf))


MEASURE_CSV_COLUMNS = [
    "verdict",
    "residual",
    "h_d_low",
    "h_d_high",
    "lbar_low",
    "lbar_high",
    "h_p",
    "frontier_mass",
    "depth_used",
    "tol",
    "asc_status",
    "possibly_divergent",
]

SIM_CSV_COLUMNS = [
    "n_phrases",
    "total_symbols",
    "empirical_lbar",
    "stderr_lbar",
    "empirical_entropy",
    "theory_lbar",
    "theory_hd",
    "z_lbar",
    "seed",
]


def measure_report_csv(report: MeasureReport) -> str:
    row = report.as_dict()
    header = ",".join(MEASURE_CSV_COLUMNS)
    values = ",".join(repr(row[c]) if isinstance(row[c], float) else str(row[c])
                      for c in MEASURE_CSV_COLUMNS)
    return f"{header}\n{values}\n"


def sim_report_csv(report: SimReport) -> str:
    row = report.as_dict()
    header = ",".join(SIM_CSV_COLUMNS)
    values = ",".join(repr(row[c]) if isinstance(row[c], float) else str(row[c])
                      for c in SIM_CSV_COLUMNS)
    return f"{header}\n{values}\n"


def histogram_csv(report: HistogramReport) -> str:
    lines = ["word,count"]
    lines.extend(f"{word_to_text(w)},{c}" for w, c in report.entries)
    return "\n".join(lines) + "\n"
