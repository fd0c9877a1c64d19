"""Truncated singular series for the ternary Goldbach problem."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .sieve import PrimeTable, sieve_primes

DEFAULT_P = 10 ** 5
SEGMENT = 1 << 14


@dataclass(frozen=True)
class SingularValue:
    n: int
    value: float
    truncation_prime: int
    tail_bound: float
    divisors: tuple[int, ...] = ()


def prime_divisors(n: int, primes: np.ndarray, covered: int | None = None) -> list[int]:
    """Distinct prime factors of n by trial division.

    primes must list every prime up to covered (default: the last prime), and
    covered must reach sqrt(n).
    """
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    rest = n
    for p in primes:
        p = int(p)
        if p * p > rest:
            break
        if rest % p == 0:
            out.append(p)
            while rest % p == 0:
                rest //= p
    else:
        top = covered if covered is not None else (int(primes[-1]) if primes.size else 1)
        if (top + 1) ** 2 <= rest:
            raise ValueError(f"{n} cannot be factored with primes up to {top}")
    if rest > 1:
        out.append(rest)
    return out


def tail_bound_factor(P: int) -> float:
    """exp(sum_{p>P} 1/(p-1)^3) - 1, using the integral bound 1/(2(P-1)^2)."""
    return math.expm1(1.0 / (2.0 * (P - 1) ** 2))


def _log_factor_sum(primes: np.ndarray) -> float:
    # fixed segment boundaries + fsum keep the value bit-stable
    parts = []
    for s in range(0, primes.size, SEGMENT):
        q = primes[s : s + SEGMENT].astype(np.float64) - 1.0
        parts.extend(np.log1p(1.0 / (q * q * q)).tolist())
    return math.fsum(parts)


@lru_cache(maxsize=8)
def _primes_upto(limit: int) -> np.ndarray:
    return sieve_primes(max(limit, 2)).primes()


@lru_cache(maxsize=8)
def _base_log_sum(P: int) -> float:
    return _log_factor_sum(_primes_upto(P))


def singular_series(n: int, P: int = DEFAULT_P, table: PrimeTable | None = None) -> SingularValue:
    """prod_{p|n}(1 - 1/(p-1)^2) * prod_{p<=P, p∤n}(1 + 1/(p-1)^3).

    Every prime divisor of n enters the first product, including those above
    P.  The tail bound covers any larger truncation point.
    """
    if n < 3:
        raise ValueError("singular series needs n >= 3")
    if P < 100:
        raise ValueError("truncation point must be >= 100")
    root = math.isqrt(n) + 1
    if table is not None and table.limit >= root:
        divs = prime_divisors(n, table.primes(root), root)
    else:
        cover = 1 << root.bit_length()
        divs = prime_divisors(n, _primes_upto(cover), cover)
    if n % 2 == 0:
        return SingularValue(n, 0.0, P, 0.0, tuple(divs))
    # the product over p <= P is shared; divisors swap their factor out
    terms = [_base_log_sum(P)]
    for p in divs:
        if p <= P:
            terms.append(-math.log1p(1.0 / (p - 1) ** 3))
        terms.append(math.log1p(-1.0 / (p - 1) ** 2))
    value = math.exp(math.fsum(terms))
    return SingularValue(n, value, P, value * tail_bound_factor(P), tuple(divs))
