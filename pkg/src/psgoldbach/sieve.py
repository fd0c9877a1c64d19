"""Segmented Eratosthenes sieve and linear-sieve arithmetic tables.

PrimeTable stores an odd-only bitset (bit i stands for 2*i + 1) plus the
prime count of each fixed-size segment, so pi(x) needs one popcount over a
partial segment.  ArithTables holds the smallest prime factor, mu and d for
every n up to its limit; Lambda is derived from factor data on demand.
"""
from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEFAULT_SEGMENT = 1 << 20
MEMORY_CAP = 4 * 10 ** 9

CACHE_MAGIC = b"PSGSIEVE"
CACHE_VERSION = 1
_HEADER = struct.Struct("<8sHQQ")


class CapacityError(ValueError):
    """Requested limit exceeds the configured memory cap."""


class RangeError(ValueError):
    """Query outside the range covered by a table."""


def small_primes(limit: int) -> np.ndarray:
    """Plain Eratosthenes, used for the base primes of the segmented sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_odd_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Odd-number primality flags for [lo, hi), lo odd; flags[i] <-> lo + 2*i.

    1 is reported as not prime.  `base` must hold every odd prime up to
    sqrt(hi).
    """
    if lo % 2 == 0:
        raise ValueError("segment must start on an odd number")
    count = max(0, (hi - lo + 1) // 2)
    flags = np.ones(count, dtype=bool)
    if count == 0:
        return flags
    for p in base:
        p = int(p)
        if p == 2:
            continue
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, -(-lo // p) * p)
        if start % 2 == 0:
            start += p
        flags[(start - lo) // 2 :: p] = False
    if lo == 1:
        flags[0] = False
    return flags


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Immutable primality table for 1..limit."""

    limit: int
    segment_size: int
    bits: np.ndarray = field(repr=False)          # odd-only flags, bool
    segment_counts: np.ndarray = field(repr=False)  # primes per segment of odd slots

    def __post_init__(self):
        self.bits.flags.writeable = False
        self.segment_counts.flags.writeable = False

    def is_prime(self, n: int) -> bool:
        if n > self.limit or n < 0:
            raise RangeError(f"{n} outside [0, {self.limit}]")
        if n == 2:
            return True
        if n < 2 or n % 2 == 0:
            return False
        return bool(self.bits[n >> 1])

    def flags(self, upto: int | None = None) -> np.ndarray:
        """Dense boolean array f with f[n] = is_prime(n) for 0 <= n <= upto."""
        upto = self.limit if upto is None else upto
        if upto > self.limit:
            raise RangeError(f"{upto} > table limit {self.limit}")
        f = np.zeros(upto + 1, dtype=bool)
        f[1::2] = self.bits[: (upto + 1) // 2]
        if upto >= 2:
            f[2] = True
        return f

    def primes(self, upto: int | None = None, start: int = 0) -> np.ndarray:
        upto = self.limit if upto is None else upto
        if upto > self.limit:
            raise RangeError(f"{upto} > table limit {self.limit}")
        odd = 2 * np.flatnonzero(self.bits[: (upto + 1) // 2]).astype(np.int64) + 1
        if upto >= 2:
            odd = np.concatenate(([2], odd))
        if start > 0:
            odd = odd[odd >= start]
        return odd

    def pi(self, x: int) -> int:
        """Number of primes <= x."""
        if x > self.limit:
            raise RangeError(f"{x} > table limit {self.limit}")
        if x < 2:
            return 0
        nslots = (x + 1) // 2
        full, rest = divmod(nslots, self.segment_size)
        total = int(self.segment_counts[:full].sum())
        total += int(np.count_nonzero(self.bits[full * self.segment_size : nslots]))
        return total + 1

    def iter_segments(self):
        """Yield (first_odd, flags) per segment of odd slots."""
        for s in range(0, self.bits.size, self.segment_size):
            yield 2 * s + 1, self.bits[s : s + self.segment_size]

    # -- binary cache ------------------------------------------------------

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, self.limit, self.segment_size)
        return header + np.packbits(self.bits, bitorder="little").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "PrimeTable":
        if len(data) < _HEADER.size:
            raise ValueError("sieve cache is truncated")
        magic, version, limit, seg = _HEADER.unpack_from(data)
        if magic != CACHE_MAGIC:
            raise ValueError("not a sieve cache file")
        if version != CACHE_VERSION:
            raise ValueError(f"unsupported sieve cache version {version}")
        nslots = (limit + 1) // 2
        raw = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
        if raw.size != (nslots + 7) // 8:
            raise ValueError("sieve cache payload has the wrong length")
        bits = np.unpackbits(raw, bitorder="little", count=nslots).astype(bool)
        return cls(limit, seg, bits, _segment_counts(bits, seg))

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "PrimeTable":
        return cls.from_bytes(Path(path).read_bytes())


def _segment_counts(bits: np.ndarray, seg: int) -> np.ndarray:
    n = -(-bits.size // seg)
    return np.array([np.count_nonzero(bits[i * seg : (i + 1) * seg]) for i in range(n)],
                    dtype=np.int64)


def sieve_primes(limit: int, segment_size: int = DEFAULT_SEGMENT, workers: int = 1,
                 memory_cap: int = MEMORY_CAP) -> PrimeTable:
    """Exact primality for 1..limit by a segmented odd-only sieve."""
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if limit > memory_cap:
        raise CapacityError(f"limit {limit} exceeds the memory cap {memory_cap}")
    if segment_size < 1:
        raise ValueError("segment size must be positive")
    nslots = (limit + 1) // 2
    base = small_primes(math.isqrt(limit) + 1)
    starts = list(range(0, nslots, segment_size))

    def run(s):
        lo = 2 * s + 1
        hi = 2 * min(s + segment_size, nslots) + 1
        return sieve_odd_segment(lo, hi, base)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    bits = np.concatenate(parts) if parts else np.zeros(0, dtype=bool)
    counts = np.array([np.count_nonzero(p) for p in parts], dtype=np.int64)
    return PrimeTable(limit, segment_size, bits, counts)


@dataclass(frozen=True, eq=False)
class ArithTables:
    """Linear-sieve tables: smallest prime factor, mu and d for n <= limit."""

    limit: int
    spf: np.ndarray = field(repr=False)
    mu: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    # prime p when n = p**e (e >= 1), else 0; Lambda(n) = log(lambda_base[n])
    lambda_base: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.spf, self.mu, self.d, self.lambda_base):
            arr.flags.writeable = False

    def _check(self, n: int) -> None:
        if not 1 <= n <= self.limit:
            raise RangeError(f"{n} outside [1, {self.limit}]")

    def mobius(self, n: int) -> int:
        self._check(n)
        return int(self.mu[n])

    def divisors_count(self, n: int) -> int:
        self._check(n)
        return int(self.d[n])

    def von_mangoldt(self, n: int) -> float:
        self._check(n)
        b = int(self.lambda_base[n])
        return math.log(b) if b else 0.0

    def lambda_array(self, dtype=np.float64) -> np.ndarray:
        """Lambda(n) for 0 <= n <= limit as floats (index 0 and 1 are 0)."""
        out = np.zeros(self.limit + 1, dtype=dtype)
        nz = self.lambda_base > 0
        out[nz] = np.log(self.lambda_base[nz].astype(dtype))
        return out

    def factor(self, n: int) -> list[tuple[int, int]]:
        """Prime factorisation of n as (p, e) pairs, ascending."""
        self._check(n)
        out = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out


def build_arith_tables(limit: int, memory_cap: int = MEMORY_CAP) -> ArithTables:
    """Linear sieve: each composite is struck once by its smallest prime."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if limit > memory_cap:
        raise CapacityError(f"limit {limit} exceeds the memory cap {memory_cap}")
    spf = [0] * (limit + 1)
    mu = [0] * (limit + 1)
    d = [0] * (limit + 1)
    lam = [0] * (limit + 1)
    spf_exp = [0] * (limit + 1)  # exponent of spf(n) in n
    primes: list[int] = []
    if limit >= 1:
        mu[1] = 1
        d[1] = 1
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes.append(i)
            mu[i] = -1
            d[i] = 2
            spf_exp[i] = 1
            lam[i] = i
        si = spf[i]
        for p in primes:
            ip = i * p
            if p > si or ip > limit:
                break
            spf[ip] = p
            if p == si:
                e = spf_exp[i] + 1
                spf_exp[ip] = e
                mu[ip] = 0
                d[ip] = d[i] // e * (e + 1)
                lam[ip] = p if lam[i] == p else 0
            else:
                spf_exp[ip] = 1
                mu[ip] = -mu[i]
                d[ip] = d[i] * 2
                lam[ip] = 0
    return ArithTables(
        limit,
        np.array(spf, dtype=np.int64),
        np.array(mu, dtype=np.int8),
        np.array(d, dtype=np.int64),
        np.array(lam, dtype=np.int64),
    )
