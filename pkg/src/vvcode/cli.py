"""Command-line front end.

Exit codes: 0 pass/success, 1 property-check fail, 2 usage/input error,
3 inconclusive. Every report embeds the resolved run configuration and a
format-version field, so re-running a stored configuration reproduces the
report bit for bit. Defaults (depth 64, tol 1e-9, seed 42, width 64) are
centralized here and echoed in every report. The VVCODE_THREADS
environment variable caps internal parallelism; it never changes results.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

from . import __version__
from .algebra import cone, extend, truncate
from .codec import decode, encode, fixed_codebook, huffman_build, tunstall_build
from .dictionary import (
    CERTIFIED_NOT_COMPLETE,
    FiniteDictionary,
    UNDETERMINED,
    is_asc,
    is_complete,
    is_proper,
)
from .errors import (
    SimulationAbortError,
    VVCodeError,
)
from .formats import (
    histogram_csv,
    load_codebook,
    load_dictionary,
    load_source,
    measure_report_csv,
    parse_word_text,
    read_bit_stream,
    read_stream_text,
    save_dictionary,
    sim_report_csv,
    write_bit_stream,
    write_stream_text,
)
from .measures import check_conservation, convergence_scan, phrase_measures
from .simulation import phrase_histogram, simulate

FORMAT_VERSION = 1
DEFAULT_DEPTH = 64
DEFAULT_TOL = 1e-9
DEFAULT_SEED = 42
DEFAULT_WIDTH = 64

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


@dataclass
class RunConfig:
    """Resolved invocation: exactly one command plus its parameters."""

    command: str
    dict_path: str | None = None
    source_path: str | None = None
    codebook_path: str | None = None
    in_path: str | None = None
    out_path: str | None = None
    word: str | None = None
    depth: int = DEFAULT_DEPTH
    width: int = DEFAULT_WIDTH
    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    size: int | None = None
    m_max: int | None = None
    mode: str | None = None
    n_phrases: int | None = None
    bits: bool = False
    histogram: bool = False
    format: str = "json"

    def validate(self):
        if self.depth < 1:
            raise ValueError("--depth must be >= 1")
        if self.width < 1:
            raise ValueError("--width must be >= 1")
        if self.tol <= 0:
            raise ValueError("--tol must be positive")


def _report_envelope(config: RunConfig, result) -> dict:
    cfg = {k: v for k, v in asdict(config).items() if v is not None}
    return {
        "format_version": FORMAT_VERSION,
        "tool": "vvcode",
        "version": __version__,
        "config": cfg,
        "result": result,
    }


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(config: RunConfig, result, csv_text=None) -> None:
    if config.format == "csv":
        if csv_text is None:
            raise ValueError(f"--format csv is not supported for {config.command}")
        _emit(csv_text, config.out_path)
        return
    text = json.dumps(_report_envelope(config, result), indent=2, sort_keys=True)
    _emit(text + "\n", config.out_path)


def _cmd_check(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    result = {"proper": is_proper(d, config.depth, config.width)}
    complete = None
    if isinstance(d, FiniteDictionary):
        complete = is_complete(d)
        result["complete"] = complete
    exit_code = EXIT_OK
    if config.source_path:
        s = load_source(config.source_path)
        verdict = is_asc(d, s, config.depth, config.tol)
        status = verdict.status
        if (
            status == UNDETERMINED
            and complete is False
            and config.depth >= d.max_word_length()
        ):
            # residual mass is exactly constant past the deepest word, so
            # the certificate can never improve: provably not ASC
            status = CERTIFIED_NOT_COMPLETE
            exit_code = EXIT_FAIL
        elif status == UNDETERMINED:
            exit_code = EXIT_INCONCLUSIVE
        result["asc_status"] = status
        result["residual_mass"] = verdict.residual_mass
        result["depth_used"] = verdict.depth_used
    _emit_report(config, result)
    return exit_code


def _cmd_truncate(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    fs = truncate(d, config.depth, config.width if d.alphabet_size is None else None)
    _emit_report(config, fs.as_dict())
    return EXIT_OK


def _cmd_extend(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    ext = extend(d, parse_word_text(config.word))
    _emit_report(config, save_dictionary(ext))
    return EXIT_OK


def _cmd_cone(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    res = cone(
        d,
        parse_word_text(config.word),
        config.depth,
        config.width if d.alphabet_size is None else None,
    )
    _emit_report(config, res.as_dict())
    return EXIT_OK


def _cmd_measure(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    s = load_source(config.source_path)
    pm = phrase_measures(d, s, config.depth, config.width)
    result = {
        "h_d_low": pm.entropy.low,
        "h_d_high": pm.entropy.high,
        "lbar_low": pm.length.low,
        "lbar_high": pm.length.high,
        "h_p": s.entropy(),
        "frontier_mass": pm.frontier_mass,
        "exhaustive": pm.exhaustive,
        "tails_exact": pm.tails_exact,
        "possibly_divergent": pm.possibly_divergent,
        "note": pm.note,
    }
    csv_cols = [
        "h_d_low", "h_d_high", "lbar_low", "lbar_high",
        "h_p", "frontier_mass", "possibly_divergent",
    ]
    csv_text = (
        ",".join(csv_cols)
        + "\n"
        + ",".join(repr(result[c]) if isinstance(result[c], float) else str(result[c])
                   for c in csv_cols)
        + "\n"
    )
    _emit_report(config, result, csv_text)
    return EXIT_OK


def _cmd_verify(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    s = load_source(config.source_path)
    report = check_conservation(d, s, config.depth, config.tol, config.width)
    _emit_report(config, report.as_dict(), measure_report_csv(report))
    if report.verdict == "pass":
        return EXIT_OK
    if report.verdict == "fail":
        return EXIT_FAIL
    return EXIT_INCONCLUSIVE


def _cmd_scan(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    s = load_source(config.source_path)
    m_max = config.m_max or 12
    report = convergence_scan(
        d, s, m_max, config.width if d.alphabet_size is None else None, config.width
    )
    rows_csv = ["m,h,lbar,identity_residual"]
    rows_csv.extend(
        f"{r.m},{r.h!r},{r.lbar!r},{r.identity_residual!r}" for r in report.rows
    )
    _emit_report(config, report.as_dict(), "\n".join(rows_csv) + "\n")
    if report.h_nondecreasing and report.lbar_nondecreasing:
        return EXIT_OK
    return EXIT_FAIL


def _cmd_tunstall(config: RunConfig) -> int:
    s = load_source(config.source_path)
    d = tunstall_build(s, config.size)
    _emit_report(config, save_dictionary(d))
    return EXIT_OK


def _cmd_codebook(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    if not isinstance(d, FiniteDictionary):
        raise ValueError("codebooks need a finite dictionary")
    mode = config.mode or "huffman"
    if mode == "fixed":
        cb = fixed_codebook(d.words)
    else:
        s = load_source(config.source_path)
        cb = huffman_build([(w, s.word_prob(w)) for w in d.words])
    _emit_report(config, cb.as_dict())
    return EXIT_OK


def _read_symbols(config: RunConfig):
    if config.bits:
        return read_bit_stream(config.in_path)
    return read_stream_text(config.in_path)


def _cmd_encode(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    if not isinstance(d, FiniteDictionary):
        raise ValueError("encoding needs a finite dictionary")
    cb = load_codebook(config.codebook_path)
    data = encode(d, cb, _read_symbols(config))
    if not config.out_path:
        raise ValueError("encode needs --out for the binary stream")
    with open(config.out_path, "wb") as fh:
        fh.write(data)
    return EXIT_OK


def _cmd_decode(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    if not isinstance(d, FiniteDictionary):
        raise ValueError("decoding needs a finite dictionary")
    cb = load_codebook(config.codebook_path)
    with open(config.in_path, "rb") as fh:
        data = fh.read()
    symbols = decode(d, cb, data)
    if not config.out_path:
        raise ValueError("decode needs --out for the recovered stream")
    if config.bits:
        write_bit_stream(config.out_path, symbols)
    else:
        write_stream_text(config.out_path, symbols)
    return EXIT_OK


def _cmd_simulate(config: RunConfig) -> int:
    d = load_dictionary(config.dict_path)
    s = load_source(config.source_path)
    n = config.n_phrases or 10000
    report = simulate(d, s, n, config.seed, depth=config.depth, width=config.width)
    if config.histogram:
        hist = phrase_histogram(
            d, s, n, config.seed, depth=config.depth, width=config.width
        )
        result = {"sim": report.as_dict(), "histogram": hist.as_dict()}
        _emit_report(config, result, histogram_csv(hist))
    else:
        _emit_report(config, report.as_dict(), sim_report_csv(report))
    return EXIT_OK


_COMMANDS = {
    "check": _cmd_check,
    "truncate": _cmd_truncate,
    "extend": _cmd_extend,
    "cone": _cmd_cone,
    "measure": _cmd_measure,
    "verify": _cmd_verify,
    "scan": _cmd_scan,
    "tunstall": _cmd_tunstall,
    "codebook": _cmd_codebook,
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "simulate": _cmd_simulate,
}


def run(config: RunConfig) -> int:
    """Dispatch a resolved configuration; returns the process exit code."""
    config.validate()
    handler = _COMMANDS.get(config.command)
    if handler is None:
        raise ValueError(f"unknown command {config.command!r}")
    return handler(config)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vvcode",
        description="Variable-to-variable length source coding toolkit",
    )
    p.add_argument("--version", action="version", version=f"vvcode {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text, *, dict_arg=False, source_arg=None, word_arg=False,
            codebook_arg=False, io_args=False):
        sp = sub.add_parser(name, help=help_text)
        if dict_arg:
            sp.add_argument("--dict", dest="dict_path", required=True)
        if source_arg is not None:
            sp.add_argument(
                "--source", dest="source_path", required=source_arg == "required"
            )
        if word_arg:
            sp.add_argument("--word", required=True,
                            help="symbol word, e.g. 110 or 1,1,0")
        if codebook_arg:
            sp.add_argument("--codebook", dest="codebook_path", required=True)
        if io_args:
            sp.add_argument("--in", dest="in_path", required=True)
            sp.add_argument("--bits", action="store_true",
                            help="treat stream files as raw bit files")
        sp.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
        sp.add_argument("--width", type=int, default=DEFAULT_WIDTH)
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out", dest="out_path")
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        return sp

    add("check", "properness / completeness / ASC certification",
        dict_arg=True, source_arg="optional")
    add("truncate", "frontier sets T_n, D_n_perp, D_n", dict_arg=True)
    add("extend", "single-word extension D[alpha]", dict_arg=True, word_arg=True)
    add("cone", "dictionary words with a given prefix", dict_arg=True, word_arg=True)
    add("measure", "interval measures H(D), lbar(D)", dict_arg=True,
        source_arg="required")
    add("verify", "conservation check H(D) = H(P) lbar(D)",
        dict_arg=True, source_arg="required")
    sp = add("scan", "truncation series H(D_m), lbar(D_m)",
             dict_arg=True, source_arg="required")
    sp.add_argument("--m-max", dest="m_max", type=int, default=12)
    sp = add("tunstall", "greedy parsing dictionary for a finite source",
             source_arg="required")
    sp.add_argument("--size", type=int, required=True)
    sp = add("codebook", "phrase codebook for a dictionary",
             dict_arg=True, source_arg="optional")
    sp.add_argument("--mode", choices=["huffman", "fixed"], default="huffman")
    add("encode", "encode a symbol stream", dict_arg=True, codebook_arg=True,
        io_args=True)
    add("decode", "decode an encoded stream", dict_arg=True, codebook_arg=True,
        io_args=True)
    sp = add("simulate", "Monte Carlo phrase sampling", dict_arg=True,
             source_arg="required")
    sp.add_argument("-n", "--phrases", dest="n_phrases", type=int, default=10000)
    sp.add_argument("--histogram", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fields = {f for f in RunConfig.__dataclass_fields__}
    kwargs = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    config = RunConfig(**kwargs)
    try:
        return run(config)
    except SimulationAbortError as exc:
        print(f"vvcode: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (VVCodeError, ValueError, OSError) as exc:
        print(f"vvcode: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
