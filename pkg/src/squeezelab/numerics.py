"""Special functions and the sparse SPD solver.

Everything here is a pure function of its inputs.  The elliptic integral and
the Groetzsch ring function are computed with the arithmetic-geometric mean,
the annulus prime product by truncation with an explicit tail bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DomainError, SolverError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ToleranceConfig:
    solver_rel_tol: float = 1e-10
    product_truncation: int = 30
    mu_inv_tol: float = 1e-12

    def __post_init__(self):
        if not (self.solver_rel_tol > 0 and self.mu_inv_tol > 0):
            raise DomainError("tolerances must be strictly positive")
        if int(self.product_truncation) != self.product_truncation or self.product_truncation < 1:
            raise DomainError("product_truncation must be an integer >= 1")


DEFAULT_TOLERANCES = ToleranceConfig()


def _agm(a: float, b: float, rel_tol: float) -> float:
    for _ in range(64):
        if abs(a - b) <= rel_tol * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_elliptic_k(k: float, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Complete elliptic integral of the first kind K(k), modulus convention.

    K(k) = pi / (2 AGM(1, sqrt(1 - k^2))).
    """
    k = float(k)
    if not (0.0 <= k < 1.0):
        raise DomainError(f"complete_elliptic_k needs 0 <= k < 1, got {k!r}")
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * _agm(1.0, kp, tol.solver_rel_tol))


def groetzsch_mu(r: float, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Groetzsch ring function mu(r) = (pi/2) K(sqrt(1-r^2)) / K(r).

    2*pi times the module of the unit disk slit along [0, r].  Written as a
    ratio of two AGMs so that neither end of (0, 1) loses precision.
    """
    r = float(r)
    if not (0.0 < r < 1.0):
        raise DomainError(f"groetzsch_mu needs 0 < r < 1, got {r!r}")
    rp = math.sqrt((1.0 - r) * (1.0 + r))
    return 0.5 * math.pi * _agm(1.0, rp, tol.solver_rel_tol) / _agm(1.0, r, tol.solver_rel_tol)


def groetzsch_mu_inv(m: float, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Inverse of :func:`groetzsch_mu` by monotone bisection.

    For m < pi/2 the complementary identity mu(r) mu(r') = pi^2/4 is used so
    that the bisection always runs on the small-r branch, in log r, where
    log(1/r) < mu(r) < log(4/r) gives a guaranteed bracket.
    """
    m = float(m)
    if not m > 0.0 or not math.isfinite(m):
        raise DomainError(f"groetzsch_mu_inv needs m > 0, got {m!r}")
    if m < 0.5 * math.pi:
        rp = _mu_inv_small(0.25 * math.pi**2 / m, tol)
        return math.sqrt((1.0 - rp) * (1.0 + rp))
    return _mu_inv_small(m, tol)


def _mu_inv_small(m: float, tol: ToleranceConfig) -> float:
    lo = -m  # mu(e^-m) > m
    hi = min(math.log(4.0) - m, -0.5 * math.log(2.0))
    if hi <= lo:
        hi = -0.5 * math.log(2.0)
    best = math.exp(0.5 * (lo + hi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = math.exp(mid)
        val = groetzsch_mu(min(r, 1.0 - 1e-16), tol)
        best = r
        if abs(val - m) <= tol.mu_inv_tol:
            break
        if val > m:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * _EPS * max(1.0, abs(mid)):
            break
    return best


def prime_product(w, q: float, truncation: int | None = None,
                  tol: ToleranceConfig = DEFAULT_TOLERANCES):
    """Truncated annulus prime product and a bound on its error.

    P(w, q) = (1 - w) prod_{k=1..N} (1 - q^{2k} w)(1 - q^{2k}/w).

    Returns ``(value, error_bound)``; both are arrays when ``w`` is.  The
    bound covers the omitted tail, |prod_{k>N}(1 + e_k) - 1| <= exp(sum|e_k|) - 1
    with |e_k| <= q^{2k}(|w| + 1/|w|), plus accumulated floating-point
    rounding over the 2N+1 factors.
    """
    q = float(q)
    if not (0.0 <= q < 1.0):
        raise DomainError(f"prime_product needs 0 <= q < 1, got {q!r}")
    n = tol.product_truncation if truncation is None else int(truncation)
    if n < 1:
        raise DomainError("truncation must be >= 1")
    w_arr = np.asarray(w, dtype=complex)
    if np.any(w_arr == 0):
        raise DomainError("prime_product is undefined at w = 0")
    aw = np.abs(w_arr)
    value = 1.0 - w_arr
    magnitude = 1.0 + aw
    q2 = q * q
    qk = 1.0
    for _ in range(n):
        qk *= q2
        value = value * (1.0 - qk * w_arr) * (1.0 - qk / w_arr)
        magnitude = magnitude * (1.0 + qk * aw) * (1.0 + qk / aw)
    tail_sum = (aw + 1.0 / aw) * q2 ** (n + 1) / (1.0 - q2)
    err = np.abs(value) * np.expm1(tail_sum) + 8.0 * (2 * n + 2) * _EPS * magnitude
    if np.ndim(w) == 0:
        return complex(value), float(err)
    return value, err


def solve_spd(matrix, rhs, tol: ToleranceConfig = DEFAULT_TOLERANCES,
              maxiter: int | None = None, x0=None) -> np.ndarray:
    """Preconditioned conjugate gradients for a sparse SPD system.

    Small systems use a Jacobi preconditioner, large ones an algebraic
    multigrid V-cycle.  Raises :class:`SolverError` with the final relative
    residual when ``solver_rel_tol`` is not reached.
    """
    a = sp.csr_matrix(matrix, dtype=float)
    b = np.asarray(rhs, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise DomainError("solve_spd needs a square matrix and a matching vector")
    bnorm = np.linalg.norm(b)
    if n == 0:
        return np.zeros(0)
    if bnorm == 0.0:
        return np.zeros(n)
    rel = tol.solver_rel_tol
    if maxiter is None:
        maxiter = max(200, 20 * n) if n < 5000 else 2000
    if n < 5000:
        d = a.diagonal()
        if np.any(d <= 0):
            raise DomainError("matrix is not positive definite (non-positive diagonal)")
        precond = spla.LinearOperator((n, n), matvec=lambda v: v / d)
    else:
        import pyamg

        ml = pyamg.smoothed_aggregation_solver(a, symmetry="symmetric", max_coarse=500)
        precond = ml.aspreconditioner(cycle="V")
    it = [0]

    def count(_):
        it[0] += 1

    x, _info = spla.cg(a, b, x0=x0, rtol=rel, atol=0.0, maxiter=maxiter, M=precond, callback=count)
    res = np.linalg.norm(b - a @ x) / bnorm
    if not res <= rel * 1.0001:
        # One restart from the current iterate recovers from stagnation in
        # the preconditioned recurrence on badly scaled cut-cell rows.
        x, _info = spla.cg(a, b, x0=x, rtol=rel, atol=0.0, maxiter=maxiter, M=precond, callback=count)
        res = np.linalg.norm(b - a @ x) / bnorm
    if not res <= rel * 1.0001:
        raise SolverError(f"conjugate gradients stalled at relative residual {res:.3e} "
                          f"(target {rel:.1e}) after {it[0]} iterations", residual=res, iterations=it[0])
    return x
