"""Command-line driver: one subcommand per experiment, CSV to stdout and --out.

Exit codes: 0 success, 2 configuration error, 3 range error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config_file, parse_int
from .exact_arith import AmbiguousFloor
from .expsum import (
    HeathBrownRangeError, InadmissibleError, alpha_grid, hb_max_residual, max_admissible_delta,
    scan_decay,
)
from .expsum.regression import DEFAULT_GRID, load_spec, run_grid
from .psets import (
    ProfileError, PsProfile, check_admissibility, count_ps_primes, main_term_li, main_term_simple,
)
from .sieve import CapacityError, PrimeTable, RangeError, build_arith_tables, sieve_primes
from .singular import DEFAULT_P, singular_series
from .ternary import (
    MODES, count_unweighted, fmt12, reports_to_csv, sum_bf_weighted, sum_constrained,
    sum_log_weighted,
)

EXIT_OK, EXIT_CONFIG, EXIT_RANGE = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: fmt12(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def _get_table(cfg: RunConfig, need: int) -> PrimeTable:
    limit = max(need, cfg.sieve_limit or 0, 2)
    if cfg.sieve_cache:
        path = Path(cfg.sieve_cache)
        if path.exists():
            table = PrimeTable.load(path)
            if table.limit >= limit:
                return table
        table = sieve_primes(limit, workers=cfg.workers)
        table.save(path)
        return table
    return sieve_primes(limit, workers=cfg.workers)


def _need(cfg: RunConfig, key: str, conv=None):
    if key not in cfg.params or cfg.params[key] is None:
        raise ConfigError(f"{cfg.subcommand} needs --{key}")
    v = cfg.params[key]
    return conv(v) if conv else v


def _profiles(cfg: RunConfig) -> list[PsProfile]:
    raw = cfg.params.get("profile") or []
    if isinstance(raw, str):
        raw = [raw]
    return [PsProfile.parse(p) for p in raw]


# -- subcommands ------------------------------------------------------------

def run_ps_count(cfg: RunConfig):
    xs = [parse_int(x) for x in _listify(_need(cfg, "x"))]
    profiles = _profiles(cfg)
    if not profiles:
        raise ConfigError("ps-count needs --profile")
    table = _get_table(cfg, max(xs))
    rows = []
    for x in xs:
        for p in profiles:
            c = count_ps_primes(x, p, table, cfg.workers)
            li = main_term_li(x, p) if x >= 3 else math.nan
            simple = main_term_simple(x, p) if x >= 3 and p.sigma < 1 else math.nan
            rows.append({"x": x, "profile": str(p), "count": c, "main_term_li": li,
                         "main_term_simple": simple, "ratio_li": c / li,
                         "ratio_simple": c / simple})
    return _rows_to_csv(rows), None


def run_ternary(cfg: RunConfig):
    ns = [parse_int(n) for n in _listify(_need(cfg, "n"))]
    mode = cfg.params.get("mode") or "unweighted"
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    profiles = _profiles(cfg)
    if mode in ("bf-weighted", "constrained"):
        if len(profiles) == 1:
            profiles = profiles * 3
        if len(profiles) != 3:
            raise ConfigError(f"{mode} needs one or three --profile values")
    for n in ns:
        if n % 2 == 0 or n < 9:
            raise ConfigError(f"n must be odd and >= 9, got {n}")
    table = _get_table(cfg, max(ns))
    reports = []
    for n in ns:
        if mode == "unweighted":
            reports.append(count_unweighted(n, table, cfg.workers))
        elif mode == "log-weighted":
            reports.append(sum_log_weighted(n, table, cfg.workers))
        elif mode == "bf-weighted":
            reports.append(sum_bf_weighted(n, profiles, table, cfg.workers))
        else:
            reports.append(sum_constrained(n, *profiles, table, cfg.workers))
    return reports_to_csv(reports), None


def run_singular(cfg: RunConfig):
    ns = [parse_int(n) for n in _listify(_need(cfg, "n"))]
    P = parse_int(cfg.params.get("P") or DEFAULT_P)
    rows = []
    for n in ns:
        v = singular_series(n, P)
        rows.append({"n": n, "P": P, "value": v.value, "tail_bound": v.tail_bound})
    return _rows_to_csv(rows), None


def run_admissible(cfg: RunConfig):
    ps = [PsProfile.parse(_need(cfg, k)) for k in ("p1", "p2", "p3")]
    rep = check_admissibility(*ps)
    rows = [{"set": "general", "condition": c.name, "lhs": str(c.lhs), "rhs": str(c.rhs),
             "satisfied": c.satisfied} for c in rep.conditions]
    rows += [{"set": "k3", "condition": c.name, "lhs": str(c.lhs), "rhs": str(c.rhs),
              "satisfied": c.satisfied} for c in rep.k3_conditions]
    return _rows_to_csv(rows), rep.as_dict()


def run_expsum_scan(cfg: RunConfig):
    spec_path = cfg.params.get("spec")
    spec = load_spec(spec_path) if spec_path else DEFAULT_GRID
    reports, summary = run_grid(spec)
    rows = [{"formula": r.formula, "params": json.dumps(r.params, sort_keys=True),
             "observed": r.observed, "bound": r.bound, "ratio": r.ratio} for r in reports]
    return _rows_to_csv(rows), summary


def run_hb_check(cfg: RunConfig):
    limit = parse_int(_need(cfg, "limit"))
    nu = parse_int(cfg.params.get("nu") or 4)
    z = float(cfg.params.get("z") or 20)
    if limit < 1:
        raise ConfigError("limit must be positive")
    tables = build_arith_tables(limit)
    res, arg = hb_max_residual(limit, nu, z, tables)
    rows = [{"limit": limit, "nu": nu, "z": z, "max_residual": res, "argmax_n": arg}]
    return _rows_to_csv(rows), {"max_residual": res, "argmax_n": arg, "pass": res < 1e-6}


def run_psi_scan(cfg: RunConfig):
    Ns = [parse_int(n) for n in _listify(_need(cfg, "N"))]
    profiles = _profiles(cfg)
    if len(profiles) != 1:
        raise ConfigError("psi-scan needs exactly one --profile")
    p = profiles[0]
    delta = cfg.params.get("delta")
    if delta in (None, "max"):
        delta = max_admissible_delta(p)
    else:
        try:
            from fractions import Fraction
            delta = Fraction(str(delta))
        except ValueError as exc:
            raise ConfigError(f"bad delta {delta!r}") from exc
    count = parse_int(cfg.params.get("alphas") or 128)
    table = _get_table(cfg, max(Ns))
    scan = scan_decay(p, Ns, alpha_grid(count, cfg.seed), delta, table)
    rows = [{"N": r.N, "primes": r.primes, "max_abs": r.max_abs, "scale": r.scale,
             "ratio": r.ratio, "alpha_at_max": r.alpha_at_max} for r in scan.rows]
    return _rows_to_csv(rows), scan.summary()


def _listify(v):
    """Flatten repeated flags and comma-separated values into one list."""
    items = v if isinstance(v, (list, tuple)) else [v]
    out = []
    for item in items:
        if isinstance(item, str):
            out.extend(s.strip() for s in item.split(",") if s.strip())
        else:
            out.append(item)
    return out


RUNNERS = {
    "ps-count": run_ps_count,
    "ternary": run_ternary,
    "singular": run_singular,
    "admissible": run_admissible,
    "expsum-scan": run_expsum_scan,
    "hb-check": run_hb_check,
    "psi-scan": run_psi_scan,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override it")
    common.add_argument("--sieve-limit", dest="sieve_limit", type=parse_int)
    common.add_argument("--workers", type=parse_int)
    common.add_argument("--out", help="directory for results.csv and manifest.json")
    common.add_argument("--seed", type=parse_int)
    common.add_argument("--sieve-cache", dest="sieve_cache")

    parser = _Parser(prog="psgoldbach", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("ps-count", parents=[common], help="count PS primes up to x")
    p.add_argument("--x", action="append")
    p.add_argument("--profile", action="append")

    p = sub.add_parser("ternary", parents=[common], help="representation sums n = p1+p2+p3")
    p.add_argument("--n", action="append")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--profile", action="append")

    p = sub.add_parser("singular", parents=[common], help="truncated singular series")
    p.add_argument("--n", action="append")
    p.add_argument("--P")

    p = sub.add_parser("admissible", parents=[common], help="check the three-profile conditions")
    for k in ("p1", "p2", "p3"):
        p.add_argument(f"--{k}")

    p = sub.add_parser("expsum-scan", parents=[common], help="bound-ratio scan")
    p.add_argument("--spec", help="JSON scan spec (default: built-in regression grid)")

    p = sub.add_parser("hb-check", parents=[common], help="Heath-Brown identity residuals")
    p.add_argument("--limit")
    p.add_argument("--nu")
    p.add_argument("--z")

    p = sub.add_parser("psi-scan", parents=[common], help="psi-difference decay scan")
    p.add_argument("--N", action="append")
    p.add_argument("--profile", action="append")
    p.add_argument("--delta", help="exact rational, or 'max'")
    p.add_argument("--alphas")
    return parser


def _write_outputs(cfg: RunConfig, csv_text: str, summary, timings: dict) -> None:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(csv_text)
    files = ["results.csv"]
    if summary is not None:
        (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        files.append("summary.json")
    manifest = {
        "subcommand": cfg.subcommand,
        "config": cfg.to_dict(),
        "versions": {"psgoldbach": __version__, "python": platform.python_version(),
                     "numpy": np.__version__},
        "timings": timings,
        "outputs": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("subcommand", "config")}
    try:
        file_data = load_config_file(args.config) if args.config else None
        cfg = RunConfig.merge(args.subcommand, file_data, flags)
        t0 = time.perf_counter()
        csv_text, summary = RUNNERS[cfg.subcommand](cfg)
        timings = {"total_seconds": round(time.perf_counter() - t0, 6)}
    except (RangeError, HeathBrownRangeError, CapacityError) as exc:
        print(f"psgoldbach: range error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (ConfigError, ProfileError, InadmissibleError, AmbiguousFloor, ValueError) as exc:
        print(f"psgoldbach: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(csv_text)
    if summary is not None and not cfg.out:
        sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    if cfg.out:
        _write_outputs(cfg, csv_text, summary, timings)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
