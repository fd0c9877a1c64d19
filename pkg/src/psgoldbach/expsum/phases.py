"""Exact reduction of phases a * m**gamma and alpha * m modulo 1.

Coefficients are floats (or ints), which are exact dyadic rationals, and
m**gamma comes from an integer root, so every phase is reduced mod 1 in
integer arithmetic.  Only the final reduced phase is rounded to a double.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..exact_arith import DEFAULT_BITS, RationalExponent, iroot

# fixed-point resolution of a reduced phase
PHASE_BITS = 128
_PHASE_ONE = 1 << PHASE_BITS
_PHASE_MASK = _PHASE_ONE - 1


def dyadic(x) -> tuple[int, int]:
    """x = num / 2**e exactly, for a float or int x."""
    f = Fraction(x)
    den = f.denominator
    e = den.bit_length() - 1
    if den != 1 << e:
        raise ValueError(f"{x!r} is not a dyadic rational")
    return f.numerator, e


def _to_phase_bits(num: int, e: int) -> int:
    """num / 2**e mod 1 as an integer over 2**PHASE_BITS (truncated)."""
    num &= (1 << e) - 1
    if e >= PHASE_BITS:
        return num >> (e - PHASE_BITS)
    return num << (PHASE_BITS - e)


def power_phase_bits(ms, coeff, gamma: RationalExponent, bits: int = DEFAULT_BITS) -> list[int]:
    """coeff * m**gamma mod 1 for each m, over 2**PHASE_BITS.

    Error per entry is at most |coeff| * 2**-bits + 2**-PHASE_BITS.
    """
    num, e = dyadic(coeff)
    if num == 0:
        return [0] * len(ms)
    b = bits + max(0, abs(num).bit_length() - e)
    shift = b * gamma.den
    out = []
    for m in ms:
        m = int(m)
        if gamma.is_one:
            v = m << b
        else:
            v = iroot(m ** gamma.num << shift, gamma.den)
        out.append(_to_phase_bits(num * v, e + b))
    return out


def linear_phase_bits(ms, alpha) -> list[int]:
    """alpha * m mod 1 for each m, exact, over 2**PHASE_BITS."""
    num, e = dyadic(alpha)
    return [_to_phase_bits(num * int(m), e) for m in ms]


def combine(*phase_lists) -> list[int]:
    return [sum(ps) & _PHASE_MASK for ps in zip(*phase_lists)]


def to_unit_float(phase_bits) -> np.ndarray:
    """Reduced phases as doubles in [0, 1)."""
    top = [p >> (PHASE_BITS - 64) for p in phase_bits]
    arr = np.array(top, dtype=np.uint64).astype(np.float64) * 2.0 ** -64
    arr[arr >= 1.0] = 0.0
    return arr


def smooth_phase(ms, coeffs, gammas, bits: int = DEFAULT_BITS) -> np.ndarray:
    """sum_j a_j m**gamma_j mod 1 as doubles."""
    parts = [power_phase_bits(ms, a, g, bits) for a, g in zip(coeffs, gammas)]
    if not parts:
        return np.zeros(len(ms))
    return to_unit_float(combine(*parts))


def linear_phase(ms, alpha) -> np.ndarray:
    return to_unit_float(linear_phase_bits(ms, alpha))


def e_of(phase: np.ndarray) -> np.ndarray:
    """e(x) = exp(2 pi i x) for reduced phases."""
    return np.exp(2j * np.pi * phase)
