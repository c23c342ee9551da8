import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st
from scipy.integrate import quad

from squeezelab.errors import DomainError, SolverError
from squeezelab.numerics import (ToleranceConfig, complete_elliptic_k, groetzsch_mu, groetzsch_mu_inv,
                                 prime_product, solve_spd)


def k_quadrature(k):
    return quad(lambda t: 1.0 / math.sqrt(1.0 - (k * math.sin(t)) ** 2), 0.0, math.pi / 2, epsabs=1e-13,
                epsrel=1e-13)[0]


def test_k_at_zero():
    assert complete_elliptic_k(0.0) == pytest.approx(math.pi / 2, abs=1e-15)


@pytest.mark.parametrize("k, frozen", [(1 / math.sqrt(2), 1.8540746773013719), (0.5, 1.6857503548125961)])
def test_k_matches_quadrature(k, frozen):
    assert k_quadrature(k) == pytest.approx(frozen, abs=1e-13)
    assert complete_elliptic_k(k) == pytest.approx(frozen, abs=1e-13)


@pytest.mark.parametrize("k", [1.0, -0.1, 1.5])
def test_k_rejects_out_of_range(k):
    with pytest.raises(DomainError):
        complete_elliptic_k(k)


def test_mu_symmetric_point():
    assert groetzsch_mu(1 / math.sqrt(2)) == pytest.approx(math.pi / 2, abs=1e-14)


def test_mu_product_identity_against_quadrature():
    r = 0.3
    rp = math.sqrt(1 - r * r)
    mu_q = math.pi / 2 * k_quadrature(rp) / k_quadrature(r)
    assert groetzsch_mu(r) == pytest.approx(mu_q, rel=1e-12)
    assert groetzsch_mu(r) * groetzsch_mu(rp) == pytest.approx(math.pi ** 2 / 4, abs=1e-12)


def test_mu_small_r_asymptotic():
    assert groetzsch_mu(0.01) == pytest.approx(math.log(4 / 0.01), rel=1e-4)


@pytest.mark.parametrize("r", [0.0, 1.0, -0.2])
def test_mu_rejects_out_of_range(r):
    with pytest.raises(DomainError):
        groetzsch_mu(r)


def test_mu_inv_examples():
    r = groetzsch_mu_inv(math.pi / 2)
    assert abs(groetzsch_mu(r) - math.pi / 2) <= 1e-12
    assert r == pytest.approx(1 / math.sqrt(2), abs=1e-11)
    assert groetzsch_mu_inv(groetzsch_mu(0.4)) == pytest.approx(0.4, abs=1e-10)
    assert groetzsch_mu_inv(10.0) == pytest.approx(4 * math.exp(-10), rel=0.05)
    with pytest.raises(DomainError):
        groetzsch_mu_inv(0.0)


@given(st.floats(0.001, 0.999), st.floats(0.001, 0.999))
def test_mu_strictly_decreasing(a, b):
    if abs(a - b) > 1e-9:
        lo, hi = min(a, b), max(a, b)
        assert groetzsch_mu(lo) > groetzsch_mu(hi)


@given(st.floats(1e-4, 0.9999))
def test_mu_inverse_round_trip(r):
    assert groetzsch_mu_inv(groetzsch_mu(r)) == pytest.approx(r, rel=1e-9, abs=1e-12)


@given(st.floats(1e-3, 0.999))
def test_mu_complementary_identity(r):
    assert groetzsch_mu(r) * groetzsch_mu(math.sqrt(1 - r * r)) == pytest.approx(math.pi ** 2 / 4, abs=1e-10)


def test_prime_product_trivial_cases():
    v, e = prime_product(1.0, 0.3)
    assert abs(v) <= e + 1e-15
    w = 0.3 - 0.7j
    v, _ = prime_product(w, 0.0)
    assert v == pytest.approx(1 - w, abs=1e-15)


def test_prime_product_functional_equation_example():
    w, q = 0.5 + 0.2j, 0.3
    p1, e1 = prime_product(q * q * w, q)
    p0, e0 = prime_product(w, q)
    assert abs(p1 + p0 / w) <= e1 + e0 / abs(w)
    # frozen reference from an independent 200-factor evaluation
    ref = (1 - w) * np.prod([(1 - q ** (2 * k) * w) * (1 - q ** (2 * k) / w) for k in range(1, 200)])
    assert abs(p0 - ref) <= e0


def test_prime_product_errors():
    with pytest.raises(DomainError):
        prime_product(0.0, 0.3)
    with pytest.raises(DomainError):
        prime_product(0.5, 1.0)


@given(st.floats(0.01, 0.6), st.floats(0.0, 2 * math.pi), st.floats(0.0, 1.0))
def test_prime_product_functional_equation_property(q, theta, s):
    w = (q + (1 - q) * s + 1e-3) * complex(math.cos(theta), math.sin(theta))
    p1, e1 = prime_product(q * q * w, q)
    p0, e0 = prime_product(w, q)
    assert abs(p1 + p0 / w) <= e1 + e0 / abs(w) + 1e-15


@given(st.floats(0.05, 0.7), st.integers(2, 30))
def test_prime_product_error_bound_holds(q, n):
    w = 0.7 * np.exp(1j * np.linspace(0, 6, 7)) + 0.1
    ref, _ = prime_product(w, q, truncation=120)
    v, e = prime_product(w, q, truncation=n)
    assert np.all(np.abs(v - ref) <= e + 1e-13)


def laplace_3x3():
    # 3x3 interior of a 5x5 grid; boundary zero except the node left of (0, 0), which is 1
    n = 3
    idx = lambda i, j: i * n + j
    a = sp.lil_matrix((9, 9))
    b = np.zeros(9)
    for i in range(n):
        for j in range(n):
            a[idx(i, j), idx(i, j)] = 4
            for di, dj in ((0, 1), (0, -1), (1, 0), (-1, 0)):
                ii, jj = i + di, j + dj
                if 0 <= ii < n and 0 <= jj < n:
                    a[idx(i, j), idx(ii, jj)] = -1
    b[idx(0, 0)] = 1.0
    return a.tocsr(), b


def test_solve_spd_dense_oracle():
    a, b = laplace_3x3()
    x = solve_spd(a, b)
    assert np.allclose(x, np.linalg.solve(a.toarray(), b), atol=1e-10)


def test_solve_spd_trivial():
    assert solve_spd(sp.csr_matrix([[4.0]]), np.array([2.0]))[0] == pytest.approx(0.5)
    b = np.arange(1.0, 6.0)
    assert np.allclose(solve_spd(sp.identity(5), b), b)


def test_solve_spd_large_uses_multigrid():
    n = 80
    t = sp.diags([-1, 2, -1], [-1, 0, 1], shape=(n, n))
    a = (sp.kron(sp.identity(n), t) + sp.kron(t, sp.identity(n))).tocsr()
    b = np.random.default_rng(0).normal(size=n * n)
    x = solve_spd(a, b)
    assert np.linalg.norm(a @ x - b) <= 1e-9 * np.linalg.norm(b)


def test_solve_spd_reports_nonconvergence():
    a, b = laplace_3x3()
    with pytest.raises(SolverError) as info:
        solve_spd(a, b, ToleranceConfig(solver_rel_tol=1e-15), maxiter=1)
    assert info.value.residual > 0
