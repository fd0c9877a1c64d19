import math

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from psgoldbach.expsum.heath_brown import (
    HeathBrownRangeError, dirichlet_convolve, hb_decompose, hb_identity_residual, hb_kernel,
    hb_max_residual, hb_residuals, von_mangoldt,
)


def brute_convolve(a, b):
    limit = len(a) - 1
    out = [0] * (limit + 1)
    for n in range(1, limit + 1):
        out[n] = sum(a[d] * b[n // d] for d in sympy.divisors(n))
    return out


@given(st.lists(st.integers(-5, 5), min_size=40, max_size=40),
       st.lists(st.integers(-5, 5), min_size=40, max_size=40))
def test_dirichlet_convolve(a, b):
    a[0] = b[0] = 0
    got = dirichlet_convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
    assert got.tolist() == brute_convolve(a, b)


def test_mu_star_one_is_delta(arith):
    mu = np.asarray(arith.mu[:1001], dtype=np.int64)
    ones = np.ones(1001, dtype=np.int64)
    ones[0] = 0
    d = dirichlet_convolve(mu, ones)
    assert d[1] == 1 and not d[2:].any()


@pytest.mark.parametrize("n", [1, 2, 7, 12, 64, 97, 360, 729, 1001])
def test_decompose_reproduces_lambda(arith, n):
    assert hb_identity_residual(n, 3, 10, arith) < 1e-12
    assert hb_identity_residual(n, 3, 10) < 1e-12


def test_decompose_terms(arith):
    terms = hb_decompose(12, 2, 5, arith)
    assert all(t.factors[0] > 1 for t in terms)
    assert all(math.prod(t.factors) == 12 for t in terms)
    assert all(max(t.factors[len(t.factors) // 2:]) <= 5 for t in terms)
    assert all(t.coefficient == (-1) ** (t.j - 1) * math.comb(2, t.j) for t in terms)


def test_von_mangoldt():
    assert von_mangoldt(1) == 0.0
    assert von_mangoldt(8) == pytest.approx(math.log(2))
    assert von_mangoldt(12) == 0.0


def test_batch_matches_single(arith):
    limit = 5000
    r = hb_residuals(limit, 3, 20, arith)
    for n in (1, 2, 30, 997, 1024, 4999):
        assert r[n] == pytest.approx(hb_identity_residual(n, 3, 20, arith), abs=1e-11)
    assert r.max() < 1e-10


def test_kernel_is_integer(arith):
    k = hb_kernel(2000, 3, 15, np.asarray(arith.mu[:2001], dtype=np.int64))
    assert k.dtype == np.int64
    # for n <= z the kernel is mu(n) (the identity degenerates)
    assert k[1:16].tolist() == [arith.mobius(n) for n in range(1, 16)]


def test_range_error():
    with pytest.raises(HeathBrownRangeError):
        hb_decompose(1000, 2, 10)
    with pytest.raises(HeathBrownRangeError):
        hb_residuals(1000, 2, 10)


def test_identity_fails_outside_range(arith):
    # beyond 2 z^nu the truncated terms no longer cancel: the range check is not vacuous
    limit = 2000
    mu = np.asarray(arith.mu[: limit + 1], dtype=np.int64)
    k = hb_kernel(limit, 1, 10, mu).astype(np.float64)
    logs = np.zeros(limit + 1)
    logs[1:] = np.log(np.arange(1, limit + 1))
    combo = dirichlet_convolve(k, logs)
    lam = arith.lambda_array()[: limit + 1]
    assert np.abs(lam - combo)[1:21].max() < 1e-12
    assert np.abs(lam - combo)[21:].max() > 0.1


def test_max_residual(arith):
    res, n = hb_max_residual(10_000, 4, 10, arith)
    assert res < 1e-10 and 1 <= n <= 10_000
