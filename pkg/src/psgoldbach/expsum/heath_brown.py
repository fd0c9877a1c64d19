"""Heath-Brown's combinatorial identity for Lambda(n), checked exactly.

For n <= 2 z^nu,

    Lambda(n) = sum_{j=1}^{nu} (-1)^(j-1) C(nu, j)
                sum_{n_1...n_2j = n, n_{j+1..2j} <= z} log(n_1) mu(n_{j+1})...mu(n_2j).

hb_decompose enumerates the terms of one n by ordered factorisation.
hb_residuals evaluates the same combination for every n up to a limit with
Dirichlet convolutions: the integer kernel
K = sum_j (-1)^(j-1) C(nu, j) 1^{*(j-1)} * mu_z^{*j} is exact, and only the
final convolution with log is done in floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..sieve import ArithTables, build_arith_tables


class HeathBrownRangeError(ValueError):
    pass


@dataclass(frozen=True)
class HBTerm:
    j: int
    coefficient: int          # (-1)^(j-1) C(nu, j)
    factors: tuple[int, ...]  # (n_1, ..., n_2j)
    mu_product: int
    value: float              # coefficient * mu_product * log(n_1)


def _divisors(n: int) -> list[int]:
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def _mobius(n: int) -> int:
    sign = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            sign = -sign
        p += 1
    return -sign if n > 1 else sign


def _check(n: int, nu: int, z: float) -> None:
    if z < 1 or nu < 1:
        raise ValueError("need z >= 1 and nu >= 1")
    if n < 1:
        raise ValueError("n must be positive")
    if n > 2 * z ** nu:
        raise HeathBrownRangeError(f"n={n} exceeds 2 z^nu = {2 * z ** nu}")


def hb_decompose(n: int, nu: int, z: float, tables: ArithTables | None = None) -> list[HBTerm]:
    """Every nonzero term of the identity for this n.

    Factor slots are ordered: n_1, the j free slots n_2..n_j, then the j
    truncated slots carrying mu.  Slots equal to 1 are kept explicitly.
    """
    _check(n, nu, z)
    mu = (lambda m: tables.mobius(m)) if tables is not None and tables.limit >= n else _mobius
    terms: list[HBTerm] = []
    for j in range(1, nu + 1):
        coef = (-1) ** (j - 1) * math.comb(nu, j)

        def mu_slots(rest: int, slots: int, acc: tuple, sign: int):
            # the j truncated slots must use up rest exactly
            if slots == 0:
                if rest == 1:
                    yield acc, sign
                return
            for d in _divisors(rest):
                if d > z:
                    break
                s = mu(d)
                if s:
                    yield from mu_slots(rest // d, slots - 1, acc + (d,), sign * s)

        def free_slots(rest: int, slots: int, acc: tuple):
            # n_2..n_j, then hand the remainder to the mu slots
            if slots == 0:
                yield rest, acc
                return
            for d in _divisors(rest):
                yield from free_slots(rest // d, slots - 1, acc + (d,))

        for n1 in _divisors(n):
            if n1 == 1:
                continue  # log 1 = 0
            for rest, free in free_slots(n // n1, j - 1, ()):
                for mus, sign in mu_slots(rest, j, (), 1):
                    terms.append(HBTerm(j, coef, (n1,) + free + mus, sign,
                                        coef * sign * math.log(n1)))
    return terms


def von_mangoldt(n: int) -> float:
    if n < 2:
        return 0.0
    p = next(d for d in _divisors(n) if d > 1)
    while n % p == 0:
        n //= p
    return math.log(p) if n == 1 else 0.0


def hb_identity_residual(n: int, nu: int, z: float, tables: ArithTables | None = None) -> float:
    """|Lambda(n) - identity| for a single n via explicit term enumeration."""
    terms = hb_decompose(n, nu, z, tables)
    lam = tables.von_mangoldt(n) if tables is not None and tables.limit >= n else von_mangoldt(n)
    return abs(lam - math.fsum(t.value for t in terms))


# -- batch route -----------------------------------------------------------

def dirichlet_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a * b)(n) = sum_{de=n} a(d) b(e) for 1 <= n <= limit; index 0 unused.

    Loops over the smaller support of the two arrays.
    """
    limit = a.size - 1
    if b.size != a.size:
        raise ValueError("arrays must share a length")
    if np.count_nonzero(a[1:]) > np.count_nonzero(b[1:]):
        a, b = b, a
    dtype = np.result_type(a.dtype, b.dtype)
    out = np.zeros(limit + 1, dtype=dtype)
    for d in np.flatnonzero(a[1:]) + 1:
        d = int(d)
        q = limit // d
        out[d::d][:q] += a[d] * b[1 : q + 1]
    return out


def hb_kernel(limit: int, nu: int, z: float, mu: np.ndarray) -> np.ndarray:
    """K = sum_j (-1)^(j-1) C(nu,j) 1^{*(j-1)} * mu_z^{*j}, exact int64."""
    ones = np.ones(limit + 1, dtype=np.int64)
    ones[0] = 0
    mu_z = np.zeros(limit + 1, dtype=np.int64)
    top = min(limit, int(math.floor(z)))
    mu_z[1 : top + 1] = mu[1 : top + 1]
    delta = np.zeros(limit + 1, dtype=np.int64)
    delta[1] = 1
    kernel = np.zeros(limit + 1, dtype=np.int64)
    free = delta       # 1^{*(j-1)}
    trunc = delta      # mu_z^{*j}
    for j in range(1, nu + 1):
        trunc = dirichlet_convolve(trunc, mu_z)
        if j > 1:
            free = dirichlet_convolve(free, ones)
        kernel += (-1) ** (j - 1) * math.comb(nu, j) * dirichlet_convolve(free, trunc)
    return kernel


def hb_residuals(limit: int, nu: int, z: float,
                 tables: ArithTables | None = None) -> np.ndarray:
    """|Lambda(n) - identity| for every 1 <= n <= limit (index 0 is 0)."""
    _check(limit, nu, z)
    if tables is None or tables.limit < limit:
        tables = build_arith_tables(limit)
    mu = np.asarray(tables.mu[: limit + 1], dtype=np.int64)
    kernel = hb_kernel(limit, nu, z, mu)
    logs = np.zeros(limit + 1)
    logs[1:] = np.log(np.arange(1, limit + 1, dtype=np.float64))
    combo = dirichlet_convolve(kernel.astype(np.float64), logs)
    lam = tables.lambda_array()[: limit + 1]
    res = np.abs(lam - combo)
    res[0] = 0.0
    return res


def hb_max_residual(limit: int, nu: int, z: float,
                    tables: ArithTables | None = None) -> tuple[float, int]:
    """(max residual, argmax n) over 1 <= n <= limit."""
    r = hb_residuals(limit, nu, z, tables)
    i = int(np.argmax(r))
    return float(r[i]), i
