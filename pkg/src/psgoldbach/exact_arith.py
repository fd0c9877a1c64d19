"""Exact integer and fixed-point arithmetic for rational powers n**(u/v).

Every floor or fractional-part decision made elsewhere in the package goes
through this module.  Scalars use big-integer v-th roots; the array helpers
use a float64 fast path and fall back to the exact route whenever the float
value lies too close to an integer to be trusted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_BITS = 96
MAX_BITS = 1 << 14

# Relative half-width of the band around an integer inside which a float64
# power is not trusted.  pow() is good to a couple of ulp and rounding the
# exponent to a double adds |log n| * 2**-53 relative error, so 2**-40
# leaves a wide margin for every n below 2**53.
_FLOAT_BAND = 2.0 ** -40


class AmbiguousFloor(ArithmeticError):
    """The certified interval of a value straddles an integer."""


@dataclass(frozen=True, order=False)
class RationalExponent:
    """An exponent num/den in (1/2, 1], kept in lowest terms."""

    num: int
    den: int

    def __post_init__(self):
        if self.num <= 0 or self.den <= 0:
            raise ValueError(f"exponent parts must be positive: {self.num}/{self.den}")
        if math.gcd(self.num, self.den) != 1:
            raise ValueError(f"exponent {self.num}/{self.den} is not reduced")
        if not (2 * self.num > self.den and self.num <= self.den):
            raise ValueError(f"exponent {self.num}/{self.den} outside (1/2, 1]")

    @classmethod
    def parse(cls, text) -> "RationalExponent":
        if isinstance(text, RationalExponent):
            return text
        if isinstance(text, float):
            raise TypeError("floats are not exact; pass a string like '9/10'")
        f = Fraction(str(text).strip())
        return cls(f.numerator, f.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def is_one(self) -> bool:
        return self.num == self.den

    def __float__(self) -> float:
        return self.num / self.den

    def __lt__(self, other: "RationalExponent") -> bool:
        return self.value < other.value

    def __str__(self) -> str:
        return "1" if self.is_one else f"{self.num}/{self.den}"


def iroot(x: int, k: int) -> int:
    """Largest r with r**k <= x.

    Newton iteration from an over-estimate, which decreases monotonically to
    the floor of the real root.
    """
    if x < 0:
        raise ValueError("iroot of a negative number")
    if k < 1:
        raise ValueError("root degree must be >= 1")
    if k == 1 or x < 2:
        return x
    if k == 2:
        return math.isqrt(x)
    bl = x.bit_length()
    if bl <= k:
        return 1
    shift = max(0, bl - 64)
    shift -= shift % k
    est = float(x >> shift) ** (1.0 / k) * (1.0 + 2.0 ** -40) + 2.0
    g = int(est) << (shift // k)
    km1 = k - 1
    while True:
        y = (km1 * g + x // g ** km1) // k
        if y >= g:
            break
        g = y
    # Newton from above lands on the floor; the guard only protects against
    # an under-estimated start.
    while g ** k > x:
        g -= 1
    while (g + 1) ** k <= x:
        g += 1
    return g


def floor_pow(n: int, gamma: RationalExponent) -> int:
    """Exact floor(n**gamma) as the den-th integer root of n**num."""
    if n < 1:
        raise ValueError("floor_pow needs n >= 1")
    if gamma.is_one:
        return n
    return iroot(n ** gamma.num, gamma.den)


def ceil_pow(n: int, gamma: RationalExponent) -> int:
    """Exact ceil(n**gamma)."""
    r = floor_pow(n, gamma)
    return r if r ** gamma.den == n ** gamma.num else r + 1


def is_exact_pow(n: int, gamma: RationalExponent) -> bool:
    r = floor_pow(n, gamma)
    return r ** gamma.den == n ** gamma.num


@dataclass(frozen=True)
class CertifiedFrac:
    """A real value int_part + frac * 2**-bits, good to err_ulp * 2**-bits.

    int_part may be negative after negation; frac is always in [0, 2**bits).
    """

    int_part: int
    frac: int
    bits: int
    err_ulp: int = 0

    def __post_init__(self):
        if not 0 <= self.frac < (1 << self.bits):
            raise ValueError("fraction field out of range")
        if self.err_ulp < 0:
            raise ValueError("negative error radius")

    @classmethod
    def from_fraction(cls, x: Fraction, bits: int = DEFAULT_BITS) -> "CertifiedFrac":
        scaled = x * (1 << bits)
        v = math.floor(scaled)
        err = 0 if scaled == v else 1
        return cls(v >> bits, v & ((1 << bits) - 1), bits, err)

    @property
    def scaled(self) -> int:
        return (self.int_part << self.bits) | self.frac

    def floor(self) -> int:
        """Certified floor; raises AmbiguousFloor if it cannot be decided."""
        if self.err_ulp == 0:
            return self.int_part
        one = 1 << self.bits
        if self.frac < self.err_ulp or self.frac > one - self.err_ulp:
            raise AmbiguousFloor(f"value within {self.err_ulp} ulp of an integer")
        return self.int_part

    def __neg__(self) -> "CertifiedFrac":
        v = -self.scaled
        return CertifiedFrac(v >> self.bits, v & ((1 << self.bits) - 1), self.bits, self.err_ulp)

    def __float__(self) -> float:
        return self.int_part + self.frac / (1 << self.bits)

    def to_fraction(self) -> Fraction:
        return Fraction(self.scaled, 1 << self.bits)


def frac_pow(n: int, gamma: RationalExponent, bits: int = DEFAULT_BITS) -> CertifiedFrac:
    """n**gamma to `bits` fractional bits, truncated, with a 1-ulp radius.

    The radius is 0 when n**gamma is an integer, so exact powers such as
    8**(2/3) and 1**gamma carry no uncertainty.
    """
    if n < 1:
        raise ValueError("frac_pow needs n >= 1")
    if bits < DEFAULT_BITS:
        raise ValueError(f"need at least {DEFAULT_BITS} fractional bits")
    if bits > MAX_BITS:
        raise ValueError(f"requested {bits} bits exceeds the cap of {MAX_BITS}")
    mask = (1 << bits) - 1
    if gamma.is_one:
        return CertifiedFrac(n, 0, bits, 0)
    x = n ** gamma.num << (bits * gamma.den)
    v = iroot(x, gamma.den)
    err = 0 if v ** gamma.den == x else 1
    return CertifiedFrac(v >> bits, v & mask, bits, err)


_PSI_TOP = math.nextafter(0.5, 0.0)


def psi(t) -> float:
    """Sawtooth t - floor(t) - 1/2 of a CertifiedFrac (or an exact number)."""
    if not isinstance(t, CertifiedFrac):
        t = Fraction(t)
        v = float(t - math.floor(t) - Fraction(1, 2))
    else:
        t.floor()
        v = (2 * t.frac - (1 << t.bits)) / (1 << (t.bits + 1))
    # a value within 2^-55 of 1/2 can round up to it; keep the range half-open
    return _PSI_TOP if v == 0.5 else v


def psi_escalating(value_at_bits, bits: int = DEFAULT_BITS) -> float:
    """psi of value_at_bits(b), doubling b on AmbiguousFloor until MAX_BITS."""
    while True:
        try:
            return psi(value_at_bits(bits))
        except AmbiguousFloor:
            if bits * 2 > MAX_BITS:
                raise
            bits *= 2


def is_ps_member(m: int, gamma: RationalExponent) -> bool:
    """True iff m = floor(n**(1/gamma)) for some n >= 1.

    Equivalent to floor(-m**gamma) - floor(-(m+1)**gamma) == 1, i.e. an
    integer lies in [m**gamma, (m+1)**gamma).
    """
    if m < 1:
        raise ValueError("membership needs m >= 1")
    if gamma.is_one:
        return True
    return ceil_pow(m + 1, gamma) - ceil_pow(m, gamma) >= 1


# -- array routes ----------------------------------------------------------

def floor_pow_array(ns, gamma: RationalExponent) -> np.ndarray:
    """Vectorised exact floor(n**gamma) for an integer array with n < 2**53."""
    ns = np.asarray(ns, dtype=np.int64)
    if gamma.is_one:
        return ns.copy()
    y = np.power(ns.astype(np.float64), gamma.num / gamma.den)
    r = np.floor(y)
    band = np.maximum(y, 1.0) * _FLOAT_BAND
    risky = (y - r < band) | (r + 1.0 - y < band)
    out = r.astype(np.int64)
    for i in np.flatnonzero(risky):
        out[i] = floor_pow(int(ns[i]), gamma)
    return out


def ceil_pow_array(ns, gamma: RationalExponent) -> np.ndarray:
    """Vectorised exact ceil(n**gamma)."""
    ns = np.asarray(ns, dtype=np.int64)
    if gamma.is_one:
        return ns.copy()
    y = np.power(ns.astype(np.float64), gamma.num / gamma.den)
    r = np.ceil(y)
    band = np.maximum(y, 1.0) * _FLOAT_BAND
    risky = (r - y < band) | (y - (r - 1.0) < band)
    out = r.astype(np.int64)
    for i in np.flatnonzero(risky):
        out[i] = ceil_pow(int(ns[i]), gamma)
    return out


def ps_member_mask(ms, gamma: RationalExponent) -> np.ndarray:
    """Boolean membership in the Piatetski-Shapiro set for an integer array."""
    ms = np.asarray(ms, dtype=np.int64)
    if gamma.is_one:
        return np.ones(ms.shape, dtype=bool)
    return ceil_pow_array(ms + 1, gamma) - ceil_pow_array(ms, gamma) >= 1


def ps_member_mask_range(limit: int, gamma: RationalExponent) -> np.ndarray:
    """mask[m] for 0 <= m <= limit (mask[0] is False)."""
    mask = np.zeros(limit + 1, dtype=bool)
    if limit >= 1:
        c = ceil_pow_array(np.arange(1, limit + 2, dtype=np.int64), gamma)
        mask[1:] = c[1:] - c[:-1] >= 1
    return mask


def pow_diff_array(ns, gamma: RationalExponent) -> np.ndarray:
    """(n+1)**gamma - n**gamma without cancellation: n**g * expm1(g*log1p(1/n))."""
    x = np.asarray(ns, dtype=np.float64)
    g = gamma.num / gamma.den
    return np.power(x, g) * np.expm1(g * np.log1p(1.0 / x))
