"""Sawtooth sums: Fourier truncation, psi-difference prime sums, S* and decay scans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..exact_arith import (
    RationalExponent, ceil_pow_array, floor_pow_array, frac_pow, pow_diff_array, psi_escalating,
)
from ..psets import PsProfile, varpi
from ..sieve import PrimeTable, RangeError
from .bounds import BoundReport


class InadmissibleError(ValueError):
    """(profile, delta) fails the decay condition."""


# -- finite Fourier expansion of psi ---------------------------------------

def psi_float(theta):
    return theta - np.floor(theta) - 0.5


def dist_to_int(x):
    return np.abs(x - np.round(x))


def psi_fourier_partial(theta, H: float):
    """-sum_{1<=|h|<=H} e(h theta)/(2 pi i h), summed as -sum_h sin(2 pi h theta)/(pi h)."""
    theta = np.asarray(theta, dtype=np.float64)
    hs = np.arange(1, int(math.floor(H)) + 1, dtype=np.float64)
    x = np.mod(theta, 1.0)
    s = np.sin(2.0 * np.pi * np.multiply.outer(x, hs)) / (np.pi * hs)
    return -s.sum(axis=-1)


def psi_fourier_error(theta, H: float):
    """(|psi(theta) - partial Fourier sum|, min(1, 1/(H ||theta||)))."""
    if H <= 1:
        raise ValueError("H must exceed 1")
    theta = np.asarray(theta, dtype=np.float64)
    err = np.abs(psi_float(theta) - psi_fourier_partial(theta, H))
    d = dist_to_int(theta)
    with np.errstate(divide="ignore"):
        env = np.where(d > 0, np.minimum(1.0, 1.0 / (H * d)), 1.0)
    if err.ndim == 0:
        return float(err), float(env)
    return err, env


def psi_fourier_constant(H: float, step: float = 1e-4) -> float:
    """max over the grid theta = step, 2 step, ... < 1 of error / envelope."""
    theta = np.arange(1, int(round(1 / step))) * step
    out = 0.0
    for s in range(0, theta.size, 2048):
        err, env = psi_fourier_error(theta[s : s + 2048], H)
        out = max(out, float(np.max(err / env)))
    return out


# -- membership identity ---------------------------------------------------

def membership_decomposition(p: int, gamma: RationalExponent) -> tuple[int, float, float]:
    """(indicator, D, E) with indicator = floor(-p^g) - floor(-(p+1)^g) = D + E.

    D = (p+1)^g - p^g, E = psi(-(p+1)^g) - psi(-p^g); the psi values come
    from certified fixed point.
    """
    ind = int(ceil_pow_array([p + 1], gamma)[0] - ceil_pow_array([p], gamma)[0])
    d = float(frac_pow(p + 1, gamma, 192).to_fraction() - frac_pow(p, gamma, 192).to_fraction())
    e = psi_diff_certified(p, gamma)
    return ind, d, e


def psi_diff_certified(p: int, gamma: RationalExponent, sign: int = -1) -> float:
    """psi(s (p+1)^g) - psi(s p^g) for s = sign, through CertifiedFrac."""
    if sign == -1:
        hi = psi_escalating(lambda b: -frac_pow(p + 1, gamma, b))
        lo = psi_escalating(lambda b: -frac_pow(p, gamma, b))
    else:
        hi = psi_escalating(lambda b: frac_pow(p + 1, gamma, b))
        lo = psi_escalating(lambda b: frac_pow(p, gamma, b))
    return hi - lo


def psi_diff_factors(ps: np.ndarray, gamma: RationalExponent, sign: int = -1) -> np.ndarray:
    """Vectorised psi(s (p+1)^g) - psi(s p^g).

    Uses indicator - D for s = -1 and D - (floor difference) for s = +1,
    where the integer parts are exact and D is evaluated without
    cancellation.  gamma = 1 gives exact zeros.
    """
    ps = np.asarray(ps, dtype=np.int64)
    if gamma.is_one:
        return np.zeros(ps.size)
    d = pow_diff_array(ps, gamma)
    if sign == -1:
        jump = ceil_pow_array(ps + 1, gamma) - ceil_pow_array(ps, gamma)
        return jump - d
    jump = floor_pow_array(ps + 1, gamma) - floor_pow_array(ps, gamma)
    return d - jump


def psi_diff_weights(N: int, profile: PsProfile, table: PrimeTable, mode: str = "standard",
                     method: str = "fast") -> tuple[np.ndarray, np.ndarray]:
    """(primes p <= N, real weight w_p) so the psi-difference sum is sum w_p e(alpha p).

    mode "standard": w_p = p^sigma prod_j (psi(-(p+1)^g_j) - psi(-p^g_j)).
    mode "bf" (k = 1): w_p = (1/g) p^(1-g) (psi((p+1)^g) - psi(p^g)).
    method "certified" evaluates every psi through CertifiedFrac (slow).
    """
    if N > table.limit:
        raise RangeError(f"N={N} exceeds the sieve limit {table.limit}")
    ps = table.primes(N)
    if mode == "standard":
        sign = -1
        base = np.power(ps.astype(np.float64), float(profile.sigma))
    elif mode == "bf":
        if profile.k != 1:
            raise ValueError("bf mode needs a single exponent")
        sign = +1
        g = profile.gammas[0]
        base = np.power(ps.astype(np.float64), 1.0 - float(g)) / float(g)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    w = base.copy()
    for g in profile.gammas:
        if method == "fast":
            w *= psi_diff_factors(ps, g, sign)
        elif method == "certified":
            w *= np.array([0.0 if g.is_one else psi_diff_certified(int(p), g, sign) for p in ps])
        else:
            raise ValueError(f"unknown method {method!r}")
    return ps, w


def _alpha_phase(alpha: float, ps: np.ndarray) -> np.ndarray:
    # alpha * p in double: error <= 2^-53 alpha p, below 2^-31 for p < 2^22
    return np.mod(alpha * ps.astype(np.float64), 1.0)


def weighted_prime_sum(ps: np.ndarray, w: np.ndarray, alpha: float) -> complex:
    return complex(np.sum(w * np.exp(2j * np.pi * _alpha_phase(alpha, ps))))


def psi_diff_sum(N: int, alpha: float, profile: PsProfile, table: PrimeTable,
                 mode: str = "standard", method: str = "fast") -> complex:
    """sum_{p<=N} p^sigma e(alpha p) prod_j (psi(-(p+1)^g_j) - psi(-p^g_j)).

    k = 1 and k = 2 cover the single and double exponent cases; mode "bf"
    gives the (1/g) p^(1-g) e(alpha p) (psi((p+1)^g) - psi(p^g)) variant.
    """
    ps, w = psi_diff_weights(N, profile, table, mode, method)
    return weighted_prime_sum(ps, w, alpha)


# -- S* min-product sum ----------------------------------------------------

def sstar_min_sum(M: int, H, gammas, u) -> float:
    """sum_{M<m<=2M} prod_j min(1, 1/(H_j ||(m+u_j)^g_j||))."""
    H = [float(h) for h in H]
    gammas = [RationalExponent.parse(g) for g in gammas]
    u = [float(x) for x in u]
    if not len(H) == len(gammas) == len(u):
        raise ValueError("H, gammas and u must have the same length")
    if len(H) < 2:
        raise ValueError("need s >= 2")
    if any(h <= 1 for h in H):
        raise ValueError("every H_j must exceed 1")
    m = np.arange(M + 1, 2 * M + 1, dtype=np.float64)
    prod = np.ones(m.size)
    for hj, g, uj in zip(H, gammas, u):
        d = dist_to_int(np.power(m + uj, float(g)))
        with np.errstate(divide="ignore"):
            prod *= np.where(d > 0, np.minimum(1.0, 1.0 / (hj * d)), 1.0)
    return float(np.sum(prod))


def sstar_bound(M: int, H) -> float:
    """M (H_1...H_s)^-1 (log H)^s + H^(s/(s+1)) (log H)^s with H = max H_j."""
    s = len(H)
    h = max(H)
    lg = math.log(h) ** s
    return M / math.prod(H) * lg + h ** (s / (s + 1)) * lg


def sstar_report(M: int, H, gammas, u) -> BoundReport:
    obs = sstar_min_sum(M, H, gammas, u)
    return BoundReport(obs, sstar_bound(M, H), "sstar",
                       {"M": M, "H": list(H), "gammas": [str(g) for g in gammas], "u": list(u)})


# -- decay scan ------------------------------------------------------------

def decay_constants(k: int) -> tuple[int, int, Fraction]:
    """(Omega(k), Omega_*(k), right-hand side) of the decay condition."""
    if k == 3:
        return 12, 52, 1 - Fraction(1, 24)
    if k >= 4:
        return 4 * k, 4 * k * (k + 1), 1 - varpi(k)
    raise ValueError("decay condition is stated for k >= 3")


def decay_admissible(profile: PsProfile, delta) -> bool:
    om, om_star, rhs = decay_constants(profile.k)
    d = Fraction(delta)
    return 0 <= d < Fraction(1, 2) and om * profile.sigma + om_star * d < rhs


def delta_supremum(profile: PsProfile) -> Fraction:
    """Least upper bound of admissible delta (itself not admissible)."""
    om, om_star, rhs = decay_constants(profile.k)
    sup = (rhs - om * profile.sigma) / om_star
    return min(sup, Fraction(1, 2))


def max_admissible_delta(profile: PsProfile, slack: Fraction = Fraction(1, 10 ** 6)) -> Fraction:
    """delta_supremum shrunk by a relative slack, so the strict inequality holds."""
    sup = delta_supremum(profile)
    if sup <= 0:
        raise InadmissibleError(f"no admissible delta for {profile}")
    return sup * (1 - slack)


def alpha_grid(count: int, seed: int = 0) -> np.ndarray:
    """Golden-ratio rotation alpha_i = frac(offset + i (phi - 1)); seed 0 starts at 0."""
    offset = 0.0 if seed == 0 else float(np.random.default_rng(seed).random())
    step = (math.sqrt(5.0) - 1.0) / 2.0
    return np.mod(offset + step * np.arange(count), 1.0)


@dataclass
class DecayRow:
    N: int
    max_abs: float
    scale: float
    ratio: float
    alpha_at_max: float
    primes: int


@dataclass
class DecayScan:
    profile: str
    delta: float
    rows: list[DecayRow] = field(default_factory=list)

    @property
    def final_le_first(self) -> bool:
        return self.rows[-1].ratio <= self.rows[0].ratio

    def summary(self) -> dict:
        return {
            "profile": self.profile,
            "delta": self.delta,
            "max_ratio": max(r.ratio for r in self.rows),
            "first_ratio": self.rows[0].ratio,
            "final_ratio": self.rows[-1].ratio,
            "final_le_first": self.final_le_first,
        }


def scan_decay(profile: PsProfile, Ns, alphas, delta, table: PrimeTable) -> DecayScan:
    """max over alphas of |psi_diff_sum(N)| / N^(1-delta), one row per N."""
    if not decay_admissible(profile, delta):
        raise InadmissibleError(f"delta={delta} is not admissible for {profile}")
    Ns = sorted(int(n) for n in Ns)
    ps, w = psi_diff_weights(Ns[-1], profile, table)
    cuts = np.searchsorted(ps, Ns, side="right")
    best = np.zeros(len(Ns))
    best_alpha = np.zeros(len(Ns))
    for a in alphas:
        terms = w * np.exp(2j * np.pi * _alpha_phase(float(a), ps))
        for i, c in enumerate(cuts):
            v = abs(complex(np.sum(terms[:c])))
            if v > best[i]:
                best[i], best_alpha[i] = v, float(a)
    d = float(delta)
    scan = DecayScan(str(profile), d)
    for i, N in enumerate(Ns):
        scale = N ** (1.0 - d)
        scan.rows.append(DecayRow(N, float(best[i]), scale, float(best[i]) / scale,
                                  float(best_alpha[i]), int(cuts[i])))
    return scan
