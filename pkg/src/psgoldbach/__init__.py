"""Piatetski-Shapiro primes, ternary Goldbach counts and the exponential-sum toolkit."""
from .exact_arith import (
    AmbiguousFloor, CertifiedFrac, RationalExponent, floor_pow, frac_pow, iroot, is_ps_member,
    psi,
)
from .psets import (
    AdmissibilityReport, PsProfile, check_admissibility, count_ps_primes, main_term_li,
    main_term_simple, varpi,
)
from .sieve import ArithTables, PrimeTable, build_arith_tables, sieve_primes
from .singular import SingularValue, singular_series
from .ternary import (
    TernaryReport, count_unweighted, sum_bf_weighted, sum_constrained, sum_log_weighted,
)

__version__ = "0.1.0"
