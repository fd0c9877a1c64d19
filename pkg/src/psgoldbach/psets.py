"""Piatetski-Shapiro profiles, intersection prime counts and main terms."""
from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact_arith import RationalExponent, ceil_pow_array, is_ps_member
from .sieve import PrimeTable, RangeError


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class PsProfile:
    """Exponents gamma_1 > ... > gamma_k in (1/2, 1].

    Repeated entries are only allowed for gamma = 1, which imposes no
    constraint and is used for the degenerate slots of the all-ones profiles.
    """

    gammas: tuple[RationalExponent, ...]

    def __post_init__(self):
        g = tuple(RationalExponent.parse(x) for x in self.gammas)
        object.__setattr__(self, "gammas", g)
        if not g:
            raise ProfileError("profile needs at least one exponent")
        for a, b in zip(g, g[1:]):
            if not (b.value < a.value or (a.is_one and b.is_one)):
                raise ProfileError(
                    f"exponents must be strictly decreasing (only 1 may repeat): {self}")

    @classmethod
    def of(cls, *gammas) -> "PsProfile":
        return cls(tuple(gammas))

    @classmethod
    def ones(cls, k: int) -> "PsProfile":
        return cls(tuple(RationalExponent(1, 1) for _ in range(k)))

    @classmethod
    def parse(cls, text: str) -> "PsProfile":
        """Parse 'k=3; g=49/50,47/50,9/10' (the k= part is optional)."""
        k = None
        gammas = None
        for part in filter(None, (p.strip() for p in text.split(";"))):
            m = re.fullmatch(r"(k|g)\s*=\s*(.+)", part)
            if not m:
                raise ProfileError(f"bad profile clause {part!r}")
            key, val = m.groups()
            if key == "k":
                if not val.strip().isdigit():
                    raise ProfileError(f"bad k value {val!r}")
                k = int(val)
            else:
                items = [s.strip() for s in val.split(",")]
                if not all(re.fullmatch(r"\d+(/\d+)?", s) for s in items):
                    raise ProfileError(f"exponents must be exact rationals: {val!r}")
                try:
                    gammas = [RationalExponent.parse(s) for s in items]
                except (ValueError, ZeroDivisionError) as exc:
                    raise ProfileError(str(exc)) from exc
        if gammas is None:
            raise ProfileError("profile has no g= clause")
        if k is not None and k != len(gammas):
            raise ProfileError(f"k={k} but {len(gammas)} exponents given")
        return cls(tuple(gammas))

    @property
    def k(self) -> int:
        return len(self.gammas)

    @property
    def sigma(self) -> Fraction:
        """k - sum(gamma_j), exactly."""
        return self.k - sum((g.value for g in self.gammas), Fraction(0))

    @property
    def coeff_c(self) -> float:
        """1 / (gamma_1 ... gamma_k)."""
        return float(1 / math.prod((g.value for g in self.gammas), start=Fraction(1)))

    @property
    def gamma_product(self) -> Fraction:
        return math.prod((g.value for g in self.gammas), start=Fraction(1))

    @property
    def is_trivial(self) -> bool:
        return all(g.is_one for g in self.gammas)

    def member_mask(self, limit: int) -> np.ndarray:
        """mask[m] for 0 <= m <= limit: m in every N_gamma of the profile."""
        return member_mask_upto(limit, self)

    def __str__(self) -> str:
        return f"k={self.k}; g=" + ",".join(str(g) for g in self.gammas)


def member_mask_upto(limit: int, profile: PsProfile, workers: int = 1,
                     chunk: int = 1 << 20) -> np.ndarray:
    """Intersection membership over 0..limit, evaluated in fixed chunks."""
    mask = np.zeros(limit + 1, dtype=bool)
    if limit < 1:
        return mask
    active = [g for g in profile.gammas if not g.is_one]

    def run(lo):
        hi = min(lo + chunk, limit + 1)
        ms = np.arange(lo, hi + 1, dtype=np.int64)
        part = np.ones(hi - lo, dtype=bool)
        for g in active:
            c = ceil_pow_array(ms, g)
            part &= c[1:] - c[:-1] >= 1
        return lo, part

    starts = range(1, limit + 1, chunk)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, starts))
    else:
        results = [run(s) for s in starts]
    for lo, part in results:
        mask[lo : lo + part.size] = part
    return mask


def ps_primes(x: int, profile: PsProfile, table: PrimeTable) -> np.ndarray:
    """Primes p <= x lying in every set of the profile."""
    if x > table.limit:
        raise RangeError(f"x={x} exceeds the sieve limit {table.limit}")
    primes = table.primes(x)
    for g in profile.gammas:
        if g.is_one or primes.size == 0:
            continue
        c0 = ceil_pow_array(primes, g)
        c1 = ceil_pow_array(primes + 1, g)
        primes = primes[c1 - c0 >= 1]
    return primes


def count_ps_primes(x: int, profile: PsProfile, table: PrimeTable, workers: int = 1) -> int:
    """pi(x; gamma_1, ..., gamma_k), exact.

    Counting runs per sieve segment; segment boundaries do not depend on the
    worker count, so neither does the result.
    """
    if x > table.limit:
        raise RangeError(f"x={x} exceeds the sieve limit {table.limit}")
    if x < 2:
        return 0
    seg = table.segment_size
    nslots = (x + 1) // 2
    active = [g for g in profile.gammas if not g.is_one]

    def run(s):
        odd = 2 * (s + np.flatnonzero(table.bits[s : min(s + seg, nslots)])).astype(np.int64) + 1
        for g in active:
            if odd.size == 0:
                break
            odd = odd[ceil_pow_array(odd + 1, g) - ceil_pow_array(odd, g) >= 1]
        return int(odd.size)

    starts = range(0, nslots, seg)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            total = sum(ex.map(run, starts))
    else:
        total = sum(run(s) for s in starts)
    return total + int(all(is_ps_member(2, g) for g in active))


def adaptive_simpson(f, a: float, b: float, rel_tol: float = 1e-10, max_depth: int = 60) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (rec(a, m, fa, flm, fm, left, tol / 2, depth - 1)
                + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = simpson(fa, fm, fb, a, b)
    tol = rel_tol * max(abs(whole), 1e-300)
    return rec(a, b, fa, fm, fb, whole, tol, max_depth)


def _log_integral_piece(s: float, a: float, b: float, rel_tol: float) -> float:
    # t = e^u turns t^(s-1)/log t dt into e^(s*u)/u du, smooth on [log a, log b]
    return adaptive_simpson(lambda u: math.exp(s * u) / u, math.log(a), math.log(b), rel_tol)


def main_term_li(x: float, profile: PsProfile, rel_tol: float = 1e-10) -> float:
    """gamma_1...gamma_k * integral_2^x t^(sum gamma - k) / log t dt."""
    if x < 3:
        raise ValueError("main_term_li needs x >= 3")
    s = 1.0 - float(profile.sigma)  # integrand is t^(s-1)/log t
    split = min(10.0, float(x))
    total = _log_integral_piece(s, 2.0, split, rel_tol)
    if x > split:
        # split the tail into geometric pieces so each has a similar dynamic range
        a = split
        while a < x:
            b = min(x, a * 1e3)
            total += _log_integral_piece(s, a, b, rel_tol)
            a = b
    return float(profile.gamma_product) * total


def main_term_simple(x: float, profile: PsProfile) -> float:
    """gamma_1...gamma_k / (1 - sigma_k) * x^(1-sigma_k) / log x."""
    if x < 3:
        raise ValueError("main_term_simple needs x >= 3")
    sigma = profile.sigma
    if sigma >= 1:
        raise ValueError("main_term_simple needs sigma_k < 1")
    e = float(1 - sigma)
    return float(profile.gamma_product) / e * x ** e / math.log(x)


# -- three-profile admissibility -------------------------------------------

def varpi(k: int) -> Fraction:
    """Slack constant: 1/36, 1/64, 1/90 for k = 3, 4, 5 and 1/(3k^2) beyond."""
    if k < 3:
        raise ValueError("varpi is defined for k >= 3")
    table = {3: Fraction(1, 3) * Fraction(1, 12), 4: Fraction(1, 4) * Fraction(1, 16),
             5: Fraction(1, 5) * Fraction(1, 18)}
    return table.get(k, Fraction(1, k) * Fraction(1, 3 * k))


K3_SPECIAL = (12, 26, 26)
K3_SPECIAL_RHS = 1 - Fraction(1, 24)


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: Fraction
    rhs: Fraction

    @property
    def satisfied(self) -> bool:
        return self.lhs < self.rhs


@dataclass(frozen=True)
class AdmissibilityReport:
    k: int
    varpi_k: Fraction
    sigmas: tuple[Fraction, Fraction, Fraction]
    conditions: tuple[Condition, ...]
    # k = 3 only: the 12/26/26 with 1 - 1/24 variant
    k3_conditions: tuple[Condition, ...] = ()
    equal_profiles_threshold: Fraction | None = None
    equal_profiles: bool | None = None
    one_constrained_threshold: Fraction | None = None
    one_constrained: bool | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def admissible(self) -> bool:
        return all(c.satisfied for c in self.conditions)

    @property
    def k3_admissible(self) -> bool | None:
        if not self.k3_conditions:
            return None
        return all(c.satisfied for c in self.k3_conditions)

    def as_dict(self) -> dict:
        def cond(c):
            return {"name": c.name, "lhs": str(c.lhs), "rhs": str(c.rhs),
                    "satisfied": c.satisfied}

        return {
            "k": self.k,
            "varpi_k": str(self.varpi_k),
            "sigmas": [str(s) for s in self.sigmas],
            "conditions": [cond(c) for c in self.conditions],
            "admissible": self.admissible,
            "k3_conditions": [cond(c) for c in self.k3_conditions],
            "k3_admissible": self.k3_admissible,
            "equal_profiles_threshold": None if self.equal_profiles_threshold is None
            else str(self.equal_profiles_threshold),
            "equal_profiles": self.equal_profiles,
            "one_constrained_threshold": None if self.one_constrained_threshold is None
            else str(self.one_constrained_threshold),
            "one_constrained": self.one_constrained,
            "notes": list(self.notes),
        }


def equal_profiles_threshold(k: int) -> Fraction:
    if k == 3:
        return K3_SPECIAL_RHS / 64
    return (1 - varpi(k)) / (4 * k * k + 8 * k)


def one_constrained_threshold(k: int) -> Fraction:
    if k == 3:
        return K3_SPECIAL_RHS / 12
    return (1 - varpi(k)) / (4 * k)


def _three_conditions(a: int, b: int, rhs: Fraction, s1, s2, s3) -> tuple[Condition, ...]:
    return (
        Condition(f"{a}*s3", a * s3, rhs),
        Condition(f"{a}*s2+{b}*s3", a * s2 + b * s3, rhs),
        Condition(f"{a}*s1+{b}*s2+{b}*s3", a * s1 + b * s2 + b * s3, rhs),
    )


def check_admissibility(p1: PsProfile, p2: PsProfile, p3: PsProfile) -> AdmissibilityReport:
    """Evaluate the three strict inequalities in exact rational arithmetic."""
    if not p1.k == p2.k == p3.k:
        raise ProfileError(f"profiles have different lengths {p1.k}, {p2.k}, {p3.k}")
    k = p1.k
    if k < 3:
        raise ProfileError("admissibility is defined for k >= 3")
    w = varpi(k)
    s1, s2, s3 = p1.sigma, p2.sigma, p3.sigma
    conds = _three_conditions(4 * k, 2 * k * (k + 1), 1 - w, s1, s2, s3)
    k3 = _three_conditions(K3_SPECIAL[0], K3_SPECIAL[1], K3_SPECIAL_RHS, s1, s2, s3) if k == 3 else ()
    notes = []
    if k == 3:
        notes.append("k=3 special constants (12, 26, 26; 1-1/24) differ from the "
                     "general form (12, 24, 24; 1-1/36); both are reported")

    c2t = equal_profiles_threshold(k)
    c2 = (s3 < c2t) if (p1 == p2 == p3) else None
    c3t = one_constrained_threshold(k)
    c3 = (s3 < c3t) if (p1.is_trivial and p2.is_trivial) else None
    if c3:
        # the general inequalities weight s3 in all three lines, so trivial
        # p1, p2 need 2k(k+1) s3 < 1 - varpi; the single-set 4k s3 bound
        # matches them only with the constrained profile in slot 1
        notes.append("one-constrained threshold met, but the three-line conditions with "
                     "p1, p2 trivial require the stricter bound on s3; swap p1 and p3 "
                     "to satisfy both")
    return AdmissibilityReport(k, w, (s1, s2, s3), conds, k3, c2t, c2, c3t, c3, tuple(notes))
