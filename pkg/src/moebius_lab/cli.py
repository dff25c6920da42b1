"""moebius-lab command line.

Subcommands::

    compute   build mu(1..n) by the divisor recursion and write the MUT1 cache
    verify    check a table against the sieve, roots-of-unity and matrix identities
    stats     block frequencies and CLT histograms
    mertens   M(n) and M(n)/n series
    bound     CLT and Chebyshev-style upper bounds for M(n)
    psd       Welch power spectrum

Exit status: 0 success, 2 usage, 3 I/O, 4 verification failure.
Concurrent writers to one cache path are not coordinated; the last one wins.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import cache, core_mu, matrix_verify, spectral, stats
from .errors import CacheFormatError, InvalidArgument, MoebiusLabError, NumericalFailure, ResourceError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VERIFY = 4

DEFAULT_N = 20_000_000
DEFAULT_CACHE = "mu.mut"
ROOTS_CHECK_MAX = 1000
MATRIX_CHECK_MAX = 128


class UsageError(MoebiusLabError):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_rows(path: Path, header: list[str], rows, fmt: str) -> Path:
    if fmt == "json":
        path = path.with_suffix(".json")
        with open(path, "w") as f:
            json.dump([dict(zip(header, r)) for r in rows], f)
            f.write("\n")
        return path
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _load(args) -> core_mu.MuTable:
    path = Path(args.cache)
    if not path.exists():
        raise FileNotFoundError(f"cache {path} not found; run `moebius-lab compute` first")
    return cache.read_cache(path)


def cmd_compute(args) -> int:
    n = args.n if args.n is not None else DEFAULT_N
    if n < 1:
        raise UsageError(f"--n must be >= 1, got {n}")
    t0 = time.perf_counter()
    table = core_mu.build_mu_recursive(n)
    elapsed = time.perf_counter() - t0
    cache.write_cache(args.cache, table)
    _emit(
        {
            "n_max": n,
            "elapsed_seconds": round(elapsed, 3),
            "mertens_at_n_max": int(table.values.sum(dtype=np.int64)),
            "checksum": f"{cache.table_checksum(table):016x}",
            "cache": str(args.cache),
        }
    )
    return EXIT_OK


def _first_mismatch(a: np.ndarray, b: np.ndarray) -> int | None:
    diff = np.flatnonzero(a != b)
    return int(diff[0]) if diff.size else None


def run_checks(table: core_mu.MuTable) -> list[dict]:
    """Every verification the `verify` subcommand performs, as records."""
    n_max = table.n_max
    checks = []

    bad = table.first_invalid_index()
    checks.append({"name": "trit_range", "ok": bad is None, "first_bad_index": bad})

    oracle, _ = core_mu.build_mu_sieve(n_max)
    idx = _first_mismatch(table.values[1:], oracle.values[1:])
    rec = {"name": "sieve_equivalence", "ok": idx is None, "first_bad_index": None if idx is None else idx + 1}
    if idx is not None:
        rec["detail"] = f"table has {int(table.values[idx + 1])}, sieve has {int(oracle.values[idx + 1])}"
    checks.append(rec)

    first = None
    for n in range(1, min(ROOTS_CHECK_MAX, n_max) + 1):
        try:
            ok = core_mu.mu_root_of_unity(n) == table[n]
        except NumericalFailure:
            ok = False
        if not ok:
            first = n
            break
    checks.append({"name": "roots_of_unity", "ok": first is None, "first_bad_index": first})

    top = min(MATRIX_CHECK_MAX, n_max)
    first = next((n for n in range(1, top + 1) if not matrix_verify.verify_inverse(n, table)), None)
    checks.append({"name": "inverse_UV", "ok": first is None, "first_bad_index": first})

    m = core_mu.mertens_prefix(table)
    first = next((n for n in range(1, top + 1) if matrix_verify.redheffer_determinant(n) != m[n]), None)
    checks.append({"name": "redheffer_determinant", "ok": first is None, "first_bad_index": first})
    return checks


def cmd_verify(args) -> int:
    path = Path(args.cache)
    if path.exists():
        table = cache.read_cache(path, validate=False)
        source = str(path)
    elif args.n is not None:
        if args.n < 1:
            raise UsageError(f"--n must be >= 1, got {args.n}")
        table = core_mu.build_mu_recursive(args.n)
        source = "fresh"
    else:
        raise FileNotFoundError(f"cache {path} not found and no --n given")
    checks = run_checks(table)
    ok = all(c["ok"] for c in checks)
    _emit({"ok": ok, "n_max": table.n_max, "source": source, "checks": checks})
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_stats(args) -> int:
    table = _load(args)
    out = _out_dir(args)
    block = args.block
    rule = stats.theoretical_distribution()
    rows = stats.block_frequencies(table, block)
    pt = rule.probs
    path = _write_rows(
        out / f"block_stats_{block}.csv",
        "block,len,n_minus,n_zero,n_plus,pe_minus,pe_zero,pe_plus,pt_minus,pt_zero,pt_plus".split(","),
        (
            [r.block_index, r.block_len, r.count_minus, r.count_zero, r.count_plus,
             r.p_e_minus, r.p_e_zero, r.p_e_plus, *pt]
            for r in rows
        ),
        args.format,
    )
    glob = stats.global_frequencies(table)
    summary = {
        "n_max": table.n_max,
        "block_len": block,
        "blocks": len(rows),
        "block_stats": str(path),
        "global_pe": {str(k): v for k, v in glob.items()},
        "pt": {str(k): rule.prob(k) for k in rule.support},
        "max_block_deviation": max(r.max_deviation() for r in rows),
        "squarefree_residual_at_n_max": stats.squarefree_residual(table, table.n_max),
    }
    try:
        samples = stats.normalized_mertens_samples(table, block)
        abs_samples = stats.abs_block_stats(table, block)
    except InvalidArgument as e:
        summary["histograms"] = f"skipped: {e}"
    else:
        for name, s in (("mertens", samples), ("abs", abs_samples)):
            hist = stats.histogram(s)
            p = _write_rows(
                out / f"hist_{name}_{block}.csv",
                ["bin_center", "density", "normal_density"],
                ([c, d, float(stats.normal_pdf(c))] for c, d in hist),
                args.format,
            )
            summary[f"hist_{name}"] = str(p)
            summary[f"{name}_sample_mean"] = float(s.mean())
            summary[f"{name}_sample_variance"] = float(s.var(ddof=1))
    _emit(summary)
    return EXIT_OK


def cmd_mertens(args) -> int:
    table = _load(args)
    out = _out_dir(args)
    series = core_mu.mertens_prefix(table)
    mean = core_mu.running_mean(series)
    stride = args.stride
    if stride < 1:
        raise UsageError(f"--stride must be >= 1, got {stride}")
    ns = range(stride, table.n_max + 1, stride)
    path = _write_rows(
        out / "mertens.csv",
        ["n", "m", "running_mean"],
        ([n, int(series.m[n]), float(mean[n - 1])] for n in ns),
        args.format,
    )
    m = series.m[1:]
    _emit(
        {
            "n_max": table.n_max,
            "mertens_at_n_max": int(m[-1]),
            "max_abs_m": int(np.abs(m).max()),
            "max_m_over_sqrt_n": float((m / np.sqrt(np.arange(1, table.n_max + 1))).max()),
            "series": str(path),
        }
    )
    return EXIT_OK


def cmd_bound(args) -> int:
    table = _load(args)
    n = args.n if args.n is not None else table.n_max
    if not 1 <= n <= table.n_max:
        raise UsageError(f"--n must lie in 1..{table.n_max}, got {n}")
    alphas = args.alpha or [0.05]
    for a in alphas:
        if not 0 < a < 1:
            raise UsageError(f"--alpha must lie in (0, 1), got {a}")
    series = core_mu.mertens_prefix(table)
    _, omega = core_mu.build_mu_sieve(n)
    reports = []
    for a in alphas:
        reports.append(stats.clt_bound(n, a, series, two_sided=args.two_sided))
        reports.append(stats.chebyshev_bound(n, a, series, omega, two_sided=args.two_sided))
    if args.out is not None:
        _write_rows(
            _out_dir(args) / "bounds.csv",
            ["method", "n", "alpha", "k_alpha_2", "bound", "observed_m", "holds", "confidence"],
            ([r.method, r.n, r.alpha, r.k_alpha_2, r.bound, r.observed_m, r.holds, r.confidence] for r in reports),
            args.format,
        )
    _emit(
        {
            "n": n,
            "mertens_type_prob_c1": stats.mertens_type_prob(1.0),
            "reports": [r.as_dict() for r in reports],
        }
    )
    return EXIT_OK


def cmd_psd(args) -> int:
    table = _load(args)
    out = _out_dir(args)
    seg = args.segment
    if not (seg >= 2 and seg & (seg - 1) == 0):
        raise UsageError(f"--segment must be a power of two >= 2, got {seg}")
    psd = spectral.welch_psd(table, seg, args.overlap, args.window)
    path = _write_rows(out / "psd.csv", ["freq", "power"], zip(psd.freqs.tolist(), psd.power.tolist()), args.format)
    _emit(
        {
            "segment_len": seg,
            "overlap": psd.overlap,
            "window": psd.window.value,
            "n_segments": psd.n_segments,
            "bins": int(psd.power.size),
            "peak_ratio": spectral.peak_ratio(psd),
            "psd": str(path),
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="table size (compute/verify) or evaluation index (bound)")
    common.add_argument("--cache", default=DEFAULT_CACHE, help="MUT1 cache path (default: %(default)s)")
    common.add_argument("--block", type=int, default=100_000, help="block length N for stats")
    common.add_argument("--alpha", type=float, action="append", help="tail probability; repeatable")
    common.add_argument("--segment", type=int, default=spectral.DEFAULT_SEGMENT, help="Welch segment length")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="bulk output format")
    common.add_argument("--out", default=None, help="output directory for data files (default: .)")

    parser = argparse.ArgumentParser(prog="moebius-lab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (("compute", cmd_compute), ("verify", cmd_verify), ("stats", cmd_stats),
                       ("mertens", cmd_mertens), ("bound", cmd_bound), ("psd", cmd_psd)):
        p = sub.add_parser(name, parents=[common])
        p.set_defaults(func=func)
        if name == "mertens":
            p.add_argument("--stride", type=int, default=1, help="emit every k-th n")
        if name == "bound":
            p.add_argument("--two-sided", action="store_true", help="test |M(n)| <= bound")
        if name == "psd":
            p.add_argument("--overlap", type=float, choices=(0.0, 0.5), default=spectral.DEFAULT_OVERLAP)
            p.add_argument("--window", choices=[w.value for w in spectral.Window], default="hann")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    if args.out is None and args.command not in ("bound",):
        args.out = "."
    try:
        return args.func(args)
    except (UsageError, InvalidArgument) as e:
        print(f"moebius-lab: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, CacheFormatError, ResourceError) as e:
        print(f"moebius-lab: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except MoebiusLabError as e:
        print(f"moebius-lab: verification failure: {e}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    raise SystemExit(main())
