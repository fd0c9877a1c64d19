"""Multi-exponent exponential sums S_k and the bilinear Type I / Type II sums."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..exact_arith import DEFAULT_BITS, RationalExponent
from ..psets import varpi
from .phases import combine, e_of, linear_phase_bits, power_phase_bits, to_unit_float


@dataclass(frozen=True)
class ExpSumParams:
    """Sum over M < m <= M1 of e(alpha m + sum_j a_j m**gamma_j)."""

    alpha: float
    coeffs: tuple[float, ...]
    gammas: tuple[RationalExponent, ...]
    M: int
    M1: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        object.__setattr__(self, "gammas", tuple(RationalExponent.parse(g) for g in self.gammas))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if len(self.coeffs) != len(self.gammas):
            raise ValueError("coeffs and gammas differ in length")
        if any(a == 0 for a in self.coeffs):
            raise ValueError("coefficients must be nonzero")
        if not (0 < self.M < self.M1 <= 2 * self.M):
            raise ValueError(f"need 0 < M < M1 <= 2M, got M={self.M}, M1={self.M1}")

    @property
    def k(self) -> int:
        return len(self.gammas)

    @property
    def R(self) -> float:
        """|a_1| M^gamma_1 + ... + |a_k| M^gamma_k."""
        return math.fsum(abs(a) * self.M ** float(g) for a, g in zip(self.coeffs, self.gammas))

    @property
    def length(self) -> int:
        return self.M1 - self.M

    def with_alpha(self, alpha: float) -> "ExpSumParams":
        return ExpSumParams(alpha, self.coeffs, self.gammas, self.M, self.M1)


class SkEvaluator:
    """Evaluates S_k for one (coeffs, gammas, range) at many alphas.

    The smooth part of the phase is reduced once; each alpha only adds the
    exact linear phase.
    """

    def __init__(self, coeffs, gammas, M: int, M1: int, bits: int = DEFAULT_BITS):
        self.ms = list(range(M + 1, M1 + 1))
        gammas = [RationalExponent.parse(g) for g in gammas]
        parts = [power_phase_bits(self.ms, a, g, bits) for a, g in zip(coeffs, gammas)]
        self.smooth = combine(*parts) if parts else [0] * len(self.ms)

    def __call__(self, alpha: float) -> complex:
        ph = combine(self.smooth, linear_phase_bits(self.ms, alpha))
        return complex(np.sum(e_of(to_unit_float(ph))))


def exp_sum_sk(params: ExpSumParams, bits: int = DEFAULT_BITS) -> complex:
    """S_k(M; gamma_1..gamma_k) with phases reduced mod 1 in exact arithmetic."""
    return SkEvaluator(params.coeffs, params.gammas, params.M, params.M1, bits)(params.alpha)


def _coeff_array(c, lo: int, count: int) -> np.ndarray:
    if callable(c):
        return np.array([c(lo + 1 + i) for i in range(count)], dtype=np.complex128)
    arr = np.asarray(c, dtype=np.complex128)
    if arr.shape != (count,):
        raise ValueError(f"coefficient array must have length {count}")
    return arr


def _bilinear(M: int, N: int, a, b, h: Sequence[int], gammas, alpha: float,
              bits: int) -> complex:
    gammas = [RationalExponent.parse(g) for g in gammas]
    if len(h) != len(gammas):
        raise ValueError("h and gammas differ in length")
    if any(int(x) != x or x == 0 for x in h):
        raise ValueError("h_j must be nonzero integers")
    am = _coeff_array(a, M, M)
    bn = _coeff_array(b, N, N) if b is not None else np.ones(N, dtype=np.complex128)
    m = np.arange(M + 1, 2 * M + 1, dtype=np.int64)
    n = np.arange(N + 1, 2 * N + 1, dtype=np.int64)
    prod = np.multiply.outer(m, n)
    ls, inverse = np.unique(prod, return_inverse=True)
    lsl = ls.tolist()
    parts = [power_phase_bits(lsl, int(hj), g, bits) for hj, g in zip(h, gammas)]
    parts.append(linear_phase_bits(lsl, alpha))
    phase = e_of(to_unit_float(combine(*parts)))
    grid = phase[inverse.reshape(prod.shape)]
    inner = grid @ bn
    return complex(np.sum(am * inner))


def type_I_sum(M: int, N: int, a, h: Sequence[int], gammas, alpha: float,
               bits: int = DEFAULT_BITS) -> complex:
    """sum_{M<m<=2M} a(m) sum_{N<n<=2N} e(alpha mn + sum_j h_j (mn)^gamma_j).

    a is a length-M sequence (a[i] belongs to m = M + 1 + i) or a callable.
    """
    return _bilinear(M, N, a, None, h, gammas, alpha, bits)


def type_II_sum(M: int, N: int, a, b, h: Sequence[int], gammas, alpha: float,
                bits: int = DEFAULT_BITS) -> complex:
    """As type_I_sum with an extra coefficient b(n) on the inner variable."""
    return _bilinear(M, N, a, b, h, gammas, alpha, bits)


@dataclass(frozen=True)
class TypeRangeClass:
    """Type I / Type II factor-size windows for a given X and (h, gamma)."""

    X: float
    k: int
    script_r: float
    x_k: float
    x_k_star: float

    @classmethod
    def build(cls, X: float, h: Sequence[int], gammas) -> "TypeRangeClass":
        gammas = [RationalExponent.parse(g) for g in gammas]
        k = len(gammas)
        if k < 3:
            raise ValueError("type windows are defined for k >= 3")
        r = math.fsum(abs(hj) * X ** float(g) for hj, g in zip(h, gammas))
        if k == 3:
            xk = X ** (1 / 48 - 1 / 2) * r
            xks = X ** (1 / 2 + 49 / 144) * r ** (-1 / 3)
        else:
            w = float(varpi(k))
            xk = X ** (w / 2 - 1 / 2) * r
            xks = X ** (1 / 2 + w)
        return cls(float(X), k, r, xk, xks)

    @property
    def type_ii_floor(self) -> float:
        return self.X ** (1 / 6)

    def classify(self, size: float) -> dict:
        """Which windows a factor of the given size falls into."""
        return {
            "type_ii": self.type_ii_floor <= size <= self.x_k,
            "type_i": size <= self.x_k_star,
            "small": size < self.type_ii_floor,
        }


def type_sum_bound(X: float, sigma, k: int, delta: float, eps: float = 0.0) -> float:
    """X^(1 - sigma - (k+1) delta - (k+3) eps), the target size for S_I and S_II."""
    return X ** (1.0 - float(Fraction(sigma)) - (k + 1) * delta - (k + 3) * eps)
