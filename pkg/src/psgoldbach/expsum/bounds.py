"""Bound formulas with observed/bound reporting.

None of the implied constants are effective, so a bound is never asserted
directly.  Each check returns a BoundReport whose ratio is pinned as a
regression value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .phases import dyadic, e_of, to_unit_float, _to_phase_bits
from .sums import ExpSumParams, SkEvaluator


@dataclass(frozen=True)
class BoundReport:
    observed: float
    bound: float
    formula: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.bound > 0:
            raise ValueError("bound must be positive")

    @property
    def ratio(self) -> float:
        return self.observed / self.bound

    def as_row(self) -> dict:
        row = {"formula": self.formula}
        row.update({k: v for k, v in self.params.items()})
        row.update(observed=self.observed, bound=self.bound, ratio=self.ratio)
        return row


def bound_second_deriv(A: float, lambda1: float) -> float:
    """A lambda1^(1/2) + lambda1^(-1/2)."""
    if lambda1 <= 0:
        raise ValueError("lambda1 must be positive")
    return A * math.sqrt(lambda1) + 1.0 / math.sqrt(lambda1)


def bound_third_deriv(A: float, lambda2: float) -> float:
    """A lambda2^(1/6) + lambda2^(-1/3)."""
    if lambda2 <= 0:
        raise ValueError("lambda2 must be positive")
    return A * lambda2 ** (1 / 6) + lambda2 ** (-1 / 3)


def monomial_sum(beta: float, degree: int, A: int, B: int | None = None) -> complex:
    """sum_{A<n<=B} e(beta n^degree), phases reduced exactly (B defaults to 2A)."""
    B = 2 * A if B is None else B
    num, e = dyadic(beta)
    ph = [_to_phase_bits(num * n ** degree, e) for n in range(A + 1, B + 1)]
    return complex(np.sum(e_of(to_unit_float(ph))))


def derivative_test_report(beta: float, A: int, variant: str = "second") -> BoundReport:
    """Derivative-test check on f(n) = beta n^2 (second) or beta n^3 (third) over (A, 2A].

    For the quadratic f'' = 2 beta everywhere.  For the cubic f''' = 6 beta.
    """
    if variant == "second":
        lam = 2.0 * beta
        bound = bound_second_deriv(A, lam)
        obs = abs(monomial_sum(beta, 2, A))
    elif variant == "third":
        lam = 6.0 * beta
        bound = bound_third_deriv(A, lam)
        obs = abs(monomial_sum(beta, 3, A))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return BoundReport(obs, bound, f"vdc-{variant}", {"beta": beta, "A": A, "lambda": lam})


def sk_bound(M: float, R: float, k: int, variant: str) -> float:
    if variant == "second":
        return math.sqrt(R) + M * R ** (-1.0 / (k + 1))
    if variant == "third":
        return math.sqrt(M) * R ** (1 / 6) + M * R ** (-1.0 / (k + 2))
    raise ValueError(f"unknown variant {variant!r}")


def bound_sk(params: ExpSumParams, variant: str = "second",
                 evaluator: SkEvaluator | None = None) -> BoundReport:
    """Pair |S_k| with R^(1/2) + M R^(-1/(k+1)) or M^(1/2) R^(1/6) + M R^(-1/(k+2))."""
    if params.k < 3:
        raise ValueError("the multi-exponent bounds need k >= 3")
    ev = evaluator or SkEvaluator(params.coeffs, params.gammas, params.M, params.M1)
    obs = abs(ev(params.alpha))
    bound = sk_bound(params.M, params.R, params.k, variant)
    return BoundReport(obs, bound, f"sk-{variant}",
                       {"M": params.M, "M1": params.M1, "alpha": params.alpha, "R": params.R,
                        "k": params.k})


def sk_scan(coeffs, gammas, M: int, alphas, M1: int | None = None,
                variants=("second", "third")) -> dict[str, list[BoundReport]]:
    """Bound reports over an alpha grid for each variant, sharing one evaluator."""
    M1 = 2 * M if M1 is None else M1
    ev = SkEvaluator(coeffs, gammas, M, M1)
    out = {v: [] for v in variants}
    for a in alphas:
        p = ExpSumParams(float(a), tuple(coeffs), tuple(gammas), M, M1)
        obs = abs(ev(p.alpha))
        for v in variants:
            out[v].append(BoundReport(obs, sk_bound(M, p.R, p.k, v), f"sk-{v}",
                                      {"M": M, "M1": M1, "alpha": p.alpha, "R": p.R, "k": p.k}))
    return out


def weyl_vdc_sides(z, N: int, Q: int) -> tuple[float, float]:
    """Both sides of the Weyl-van der Corput inequality for z on (N, CN].

    rhs = (N/Q) * sum_{|q|<=Q} (1 - |q|/Q) Re sum_n z(n) conj(z(n+q)), where
    the inner sum runs over n with both n and n+q in range; the q and -q
    terms are conjugate, so only q >= 0 is computed.
    """
    z = np.asarray(z, dtype=np.complex128)
    if not 1 <= Q <= N:
        raise ValueError("need 1 <= Q <= N")
    lhs = abs(complex(np.sum(z))) ** 2
    total = float(np.vdot(z, z).real)
    for q in range(1, min(Q, z.size - 1) + 1):
        w = 1.0 - q / Q
        if w == 0.0:
            continue
        c = np.sum(z[:-q] * np.conj(z[q:]))
        total += 2.0 * w * float(c.real)
    return lhs, N / Q * total
