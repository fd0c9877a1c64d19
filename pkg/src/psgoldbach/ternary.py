"""Weighted and unweighted counts of ordered representations n = p1 + p2 + p3.

All modes share one kernel: three weight arrays indexed by integer, zero off
the admissible primes.  The smallest support is enumerated outermost, the
next one in the middle, and the largest is looked up.  Per-outer partial
sums are combined with math.fsum, so the result is independent of chunking
and of the worker count.
"""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .psets import PsProfile, ProfileError, member_mask_upto
from .sieve import PrimeTable, RangeError
from .singular import singular_series

MODES = ("unweighted", "log-weighted", "bf-weighted", "constrained")
CSV_FIELDS = ("n", "mode", "k", "profile", "sum", "main_term", "ratio", "seconds")
_CHUNK = 256


@dataclass(frozen=True)
class TernaryReport:
    n: int
    mode: str
    count_or_sum: float
    main_term: float
    ratio: float
    profiles: tuple[str, ...] = ()
    k: int = 0
    seconds: float = 0.0

    def csv_row(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "k": self.k,
            "profile": " | ".join(self.profiles),
            "sum": fmt12(self.count_or_sum),
            "main_term": fmt12(self.main_term),
            "ratio": fmt12(self.ratio),
            "seconds": f"{self.seconds:.3f}",
        }


def fmt12(x) -> str:
    """12 significant digits; integers stay integers."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _check_n(n: int, table: PrimeTable) -> None:
    if n % 2 == 0:
        raise ValueError(f"n must be odd, got {n}")
    if n < 9:
        raise ValueError("n must be at least 9")
    if n > table.limit:
        raise RangeError(f"n={n} exceeds the sieve limit {table.limit}")


def triple_sum(n: int, w1: np.ndarray, w2: np.ndarray, w3: np.ndarray,
               workers: int = 1) -> float | int:
    """Sum over ordered p1 + p2 + p3 = n of w1[p1] * w2[p2] * w3[p3].

    Weight arrays must have length >= n + 1.  Integer arrays give an exact
    integer result.
    """
    ws = sorted((w1, w2, w3), key=lambda w: np.count_nonzero(w[: n + 1]))
    outer_w, mid_w, look_w = ws
    outer = np.flatnonzero(outer_w[: n + 1])
    mid = np.flatnonzero(mid_w[: n + 1])
    exact = all(np.issubdtype(w.dtype, np.integer) or w.dtype == bool for w in ws)

    def partials(chunk):
        out = []
        for a in chunk:
            a = int(a)
            rest = n - a
            b = mid[: np.searchsorted(mid, rest, side="right")]
            c = rest - b
            if exact:
                s = int(np.dot(mid_w[b].astype(np.int64), look_w[c].astype(np.int64)))
                out.append(int(outer_w[a]) * s)
            else:
                s = float(np.sum(mid_w[b] * look_w[c]))
                out.append(float(outer_w[a]) * s)
        return out

    chunks = [outer[i : i + _CHUNK] for i in range(0, outer.size, _CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(partials, chunks))
    else:
        parts = [partials(c) for c in chunks]
    flat = [x for p in parts for x in p]
    return sum(flat) if exact else math.fsum(flat)


def _prime_flags(n: int, table: PrimeTable) -> np.ndarray:
    return table.flags(n)


def count_unweighted(n: int, table: PrimeTable, workers: int = 1) -> TernaryReport:
    """Ordered triples of primes summing to n; main term S(n) n^2 / (2 log^3 n)."""
    _check_n(n, table)
    t0 = time.perf_counter()
    f = _prime_flags(n, table).astype(np.int64)
    count = triple_sum(n, f, f, f, workers)
    main = 0.5 * singular_series(n).value * n * n / math.log(n) ** 3
    return TernaryReport(n, "unweighted", count, main, count / main if main > 0 else math.nan,
                         seconds=time.perf_counter() - t0)


def _log_weights(n: int, table: PrimeTable) -> np.ndarray:
    flags = _prime_flags(n, table)
    w = np.zeros(n + 1, dtype=np.float64)
    idx = np.flatnonzero(flags)
    w[idx] = np.log(idx.astype(np.float64))
    return w


def sum_log_weighted(n: int, table: PrimeTable, workers: int = 1) -> TernaryReport:
    """Sum of log p1 log p2 log p3 over ordered representations; main term S(n) n^2 / 2."""
    _check_n(n, table)
    t0 = time.perf_counter()
    w = _log_weights(n, table)
    total = triple_sum(n, w, w, w, workers)
    main = 0.5 * singular_series(n).value * n * n
    return TernaryReport(n, "log-weighted", total, main, total / main if main > 0 else math.nan,
                         seconds=time.perf_counter() - t0)


def bf_weights(n: int, profile: PsProfile, table: PrimeTable) -> np.ndarray:
    """p^(1-gamma) log p on primes of N_gamma, zero elsewhere."""
    if profile.k != 1:
        raise ProfileError("bf-weighted mode needs single-exponent profiles")
    g = profile.gammas[0]
    w = _log_weights(n, table)
    if not g.is_one:
        w[~member_mask_upto(n, profile)] = 0.0
        idx = np.flatnonzero(w)
        w[idx] *= np.power(idx.astype(np.float64), 1.0 - float(g))
    return w


def sum_bf_weighted(n: int, profiles, table: PrimeTable, workers: int = 1) -> TernaryReport:
    """(1/(g1 g2 g3)) * sum prod p_j^(1-g_j) log p_j with p_j in N_{g_j}."""
    _check_n(n, table)
    if len(profiles) != 3:
        raise ProfileError("need exactly three profiles")
    t0 = time.perf_counter()
    ws = [bf_weights(n, p, table) for p in profiles]
    scale = math.prod(p.coeff_c for p in profiles)
    total = triple_sum(n, *ws, workers=workers)
    if scale != 1.0:
        total *= scale
    main = 0.5 * singular_series(n).value * n * n
    return TernaryReport(n, "bf-weighted", total, main, total / main if main > 0 else math.nan,
                         tuple(str(p) for p in profiles), 1, time.perf_counter() - t0)


def constrained_weights(n: int, profile: PsProfile, table: PrimeTable) -> np.ndarray:
    """p^sigma on primes of the k-fold intersection, zero elsewhere."""
    flags = _prime_flags(n, table)
    if profile.is_trivial:
        return flags.astype(np.int64)
    flags &= member_mask_upto(n, profile)
    w = np.zeros(n + 1, dtype=np.float64)
    idx = np.flatnonzero(flags)
    w[idx] = np.power(idx.astype(np.float64), float(profile.sigma))
    return w


def sum_constrained(n: int, p1: PsProfile, p2: PsProfile, p3: PsProfile, table: PrimeTable,
                    workers: int = 1) -> TernaryReport:
    """C1 C2 C3 * sum prod p_i^sigma_i over p_i in their k-fold intersections.

    Main term S(n) n^2 / (2 log^3 n).  With all-ones profiles the weights are
    integer ones and the result equals the unweighted count exactly.
    """
    _check_n(n, table)
    if not p1.k == p2.k == p3.k:
        raise ProfileError("profiles must share k")
    t0 = time.perf_counter()
    ws = [constrained_weights(n, p, table) for p in (p1, p2, p3)]
    total = triple_sum(n, *ws, workers=workers)
    scale = p1.coeff_c * p2.coeff_c * p3.coeff_c
    if scale != 1.0:
        total = float(total) * scale
    main = 0.5 * singular_series(n).value * n * n / math.log(n) ** 3
    return TernaryReport(n, "constrained", total, main, total / main if main > 0 else math.nan,
                         (str(p1), str(p2), str(p3)), p1.k, time.perf_counter() - t0)
