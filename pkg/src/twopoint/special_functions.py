"""Jacobi polynomials, Gamma quotients, the Gauss hypergeometric series,
the Poisson generating formula and Gauss-Jacobi quadrature.

Conventions: ``P_k^{a,b}`` is normalised by ``P_k(1) = (a+1)_k / k!`` and is
orthogonal against ``(1-t)^a (1+t)^b`` on [-1, 1] with squared norm
:func:`jacobi_norm_h`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _backend
from .config import DEFAULTS
from .errors import DomainError, NonConvergenceError, QuadratureError
from .linalg import eigvalsh


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(f"Jacobi parameters need alpha, beta > -1; got ({self.alpha}, {self.beta})")

    @property
    def swapped(self) -> JacobiParams:
        return JacobiParams(self.beta, self.alpha)


# --------------------------------------------------------------------------
# Gamma and Pochhammer


def _gamma_quotient(num, den):
    """prod(Gamma(x) for x in num) / prod(Gamma(y) for y in den), all args > 0."""
    args = list(num) + list(den)
    if min(args) <= 0:
        raise ValueError("Gamma quotient requires positive arguments")
    if max(args) < 150:
        out = 1.0
        for x in num:
            out *= math.gamma(x)
        for y in den:
            out /= math.gamma(y)
        return out
    return math.exp(sum(math.lgamma(x) for x in num) - sum(math.lgamma(y) for y in den))


def pochhammer(lam: float, n: int) -> float:
    """Rising factorial (lam)_n = lam (lam+1) ... (lam+n-1), with (lam)_0 = 1.

    Integer ``lam`` is multiplied out exactly. Raises OverflowError when the
    product leaves the double range.
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    n = int(n)
    if float(lam).is_integer():
        return float(math.prod(range(int(lam), int(lam) + n)))
    out = 1.0
    for j in range(n):
        out *= lam + j
    if not math.isfinite(out):
        raise OverflowError(f"({lam})_{n} overflows a double")
    return out


# --------------------------------------------------------------------------
# Jacobi polynomials


def jacobi_table(params: JacobiParams, kmax: int, t, backend=None) -> np.ndarray:
    """Array of shape ``(kmax + 1,) + shape(t)`` holding P_0..P_kmax at ``t``."""
    t = np.asarray(t, dtype=float)
    rows = _backend.get(backend).jacobi_table(float(params.alpha), float(params.beta), int(kmax), t)
    return rows.reshape((kmax + 1,) + t.shape)


def jacobi_eval(params: JacobiParams, k: int, t):
    """P_k^{alpha,beta}(t) by the three-term recurrence in k."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    out = jacobi_table(params, k, t)[k]
    return float(out) if np.ndim(out) == 0 else out


def jacobi_at_one(params: JacobiParams, k: int) -> float:
    """P_k^{alpha,beta}(1) = (alpha+1)_k / k!."""
    out = 1.0
    for j in range(1, k + 1):
        out *= (params.alpha + j) / j
    return out


def jacobi_at_one_table(params: JacobiParams, kmax: int) -> np.ndarray:
    j = np.arange(1, kmax + 1, dtype=float)
    return np.concatenate(([1.0], np.cumprod((params.alpha + j) / j)))


def jacobi_norm_h(params: JacobiParams, k: int) -> float:
    """Squared weighted L2 norm of P_k^{alpha,beta} on [-1, 1]."""
    a, b = params.alpha, params.beta
    if k == 0:
        # limit form; avoids the removable 0 * Gamma(0) when a + b = -1
        return 2.0 ** (a + b + 1) * _gamma_quotient([a + 1, b + 1], [a + b + 2])
    return (2.0 ** (a + b + 1) / (2 * k + a + b + 1)
            * _gamma_quotient([k + a + 1, k + b + 1], [k + 1, k + a + b + 1]))


def jacobi_normalized(params: JacobiParams, k: int, t):
    """R_k(t) = P_k(t) / P_k(1)."""
    return jacobi_eval(params, k, t) / jacobi_at_one(params, k)


def jacobi_derivative(params: JacobiParams, k: int, t):
    """d/dt P_k^{a,b}(t) = (k+a+b+1)/2 * P_{k-1}^{a+1,b+1}(t)."""
    if k == 0:
        return np.zeros_like(np.asarray(t, dtype=float))
    shifted = JacobiParams(params.alpha + 1, params.beta + 1)
    return 0.5 * (k + params.alpha + params.beta + 1) * jacobi_eval(shifted, k - 1, t)


# --------------------------------------------------------------------------
# Gauss hypergeometric function


def _is_nonpositive_integer(x):
    return x <= 0 and float(x).is_integer()


def hypergeometric_2f1(a, b, c, z, tol=None, max_terms=None, full_output=False):
    """Partial sum of the Gauss series for 2F1(a, b; c; z), real arguments.

    Summation stops once a term, and the geometric estimate of the tail
    after it, are both below ``tol`` in absolute value. Domain: |z| < 1, or |z| = 1 with c - a - b > 0.

    Returns the value, or ``(value, terms_used)`` if ``full_output``.
    """
    tol = DEFAULTS.series_tol if tol is None else tol
    max_terms = DEFAULTS.series_max_terms if max_terms is None else max_terms
    if _is_nonpositive_integer(c):
        raise DomainError(f"c = {c} is a nonpositive integer")
    if abs(z) > 1:
        raise DomainError(f"|z| = {abs(z)} > 1 is outside the series domain")
    if abs(z) == 1 and not c - a - b > 0:
        raise DomainError(f"series diverges at |z| = 1 since c - a - b = {c - a - b} <= 0")

    total, term, n = 1.0, 1.0, 0
    # past this index no factor (a+n), (b+n), (c+n) changes sign
    settle = max(0.0, -a, -b, -c)
    while term != 0.0:
        if n + 1 >= max_terms:
            raise NonConvergenceError(
                f"2F1({a}, {b}; {c}; {z}) still has |term| = {abs(term):.3e} after {max_terms} terms")
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        term *= ratio
        total += term
        n += 1
        # geometric estimate of the remaining tail must also be below tol
        q = abs(ratio)
        if abs(term) < tol and n > settle and q < 1 and abs(term) * q < tol * (1 - q):
            break
    return (total, n + 1) if full_output else total


def hypergeometric_2f1_real(a, b, c, z, tol=None, max_terms=None):
    """2F1 on the real half-line z < 1.

    For z < 0 the Pfaff transformation
    ``F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1))`` maps the argument into
    [0, 1), where the Gauss series converges; this covers z < -1 as well.
    """
    if z >= 1:
        raise DomainError(f"z = {z} >= 1")
    if z < 0:
        return (1.0 - z) ** (-a) * hypergeometric_2f1(a, c - b, c, z / (z - 1.0), tol, max_terms)
    return hypergeometric_2f1(a, b, c, z, tol, max_terms)


def f21_derivative_check(a, b, c, z, h=1e-5):
    """Central difference of F at z versus (ab/c) F(a+1, b+1; c+1; z)."""
    fd = (hypergeometric_2f1(a, b, c, z + h) - hypergeometric_2f1(a, b, c, z - h)) / (2 * h)
    closed = a * b / c * hypergeometric_2f1(a + 1, b + 1, c + 1, z)
    return fd, closed


# --------------------------------------------------------------------------
# Poisson generating formula


def _check_poisson(params, r):
    if not params.alpha >= params.beta >= -0.5:
        raise DomainError(f"need alpha >= beta >= -1/2, got ({params.alpha}, {params.beta})")
    if not -1 < r < 1:
        raise DomainError(f"need |r| < 1, got r = {r}")


def _tail_negligible(recent, total, dps):
    """Geometric bound on the remaining majorant sum is below 10^(15-dps) |total|."""
    if not all(u > v for u, v in zip(recent, recent[1:])):
        return False
    q = recent[-1] / recent[-2]
    return recent[-1] * q / (1 - q) < mpmath.mpf(10) ** (15 - dps) * abs(total)


def poisson_lhs(params: JacobiParams, t: float, r: float, truncation: int = 2000, dps=None) -> float:
    """Truncated series sum_n P_n(1) P_n(t) r^n / h_n.

    Terms are formed in ``dps``-digit arithmetic: near t = -1 (r > 0) or
    t = 1 (r < 0) the series alternates and cancels by many orders of
    magnitude. Summation stops early once the majorant P_n(1)^2 |r|^n / h_n
    has decreased over 10 consecutive terms and its geometric tail is
    negligible; at ``truncation`` the majorant must at least be decreasing,
    else NonConvergenceError.
    """
    _check_poisson(params, r)
    if not -1 <= t <= 1:
        raise DomainError(f"t = {t} outside [-1, 1]")
    if truncation < 11:
        raise ValueError("truncation must be at least 11")
    dps = DEFAULTS.poisson_dps if dps is None else dps
    with mpmath.workdps(dps):
        a, b = mpmath.mpf(params.alpha), mpmath.mpf(params.beta)
        ab = a + b
        x, rr = mpmath.mpf(t), mpmath.mpf(r)
        # 1 / h_n, n = 0 via its limit form
        inv_h = mpmath.gamma(ab + 2) / (2 ** (ab + 1) * mpmath.gamma(a + 1) * mpmath.gamma(b + 1))
        p_prev, p_cur = mpmath.mpf(1), mpmath.mpf(1)
        at_one = mpmath.mpf(1)
        rn = mpmath.mpf(1)
        total = inv_h
        majorants = [inv_h]
        for n in range(1, truncation + 1):
            if n == 1:
                p_prev, p_cur = p_cur, (a + 1) + (ab + 2) * (x - 1) / 2
            else:
                c2 = 2 * n + ab
                p_prev, p_cur = p_cur, (
                    (c2 - 1) * (c2 * (c2 - 2) * x + a * a - b * b) * p_cur
                    - 2 * (n + a - 1) * (n + b - 1) * c2 * p_prev
                ) / (2 * n * (n + ab) * (c2 - 2))
            at_one *= (a + n) / n
            rn *= rr
            if n == 1:
                q = mpmath.gamma(ab + 2) / (mpmath.gamma(a + 2) * mpmath.gamma(b + 2))
            else:
                q *= n * (n + ab) / ((n + a) * (n + b))
            inv_h = (2 * n + ab + 1) / 2 ** (ab + 1) * q
            total += at_one * p_cur * rn * inv_h
            majorants.append(at_one * at_one * abs(rn) * inv_h)
            if n >= 11 and _tail_negligible(majorants[-11:], total, dps):
                break
        tail = majorants[-11:]
        if r != 0 and not all(u > v for u, v in zip(tail, tail[1:])):
            raise NonConvergenceError(
                f"Poisson series terms not decreasing at truncation {truncation} (r = {r})")
        return float(total)


def poisson_g(params: JacobiParams, r: float) -> float:
    """Prefactor G^{alpha,beta}(r) of the Poisson closed form."""
    a, b = params.alpha, params.beta
    return (2.0 ** (-(a + b + 1)) * _gamma_quotient([a + b + 2], [a + 1, b + 1])
            * (1 - r) / (1 + r) ** (a + b + 2))


def poisson_rhs(params: JacobiParams, t: float, r: float) -> float:
    """Closed form G(r) * F((a+b+2)/2, (a+b+3)/2; b+1; 2r(1+t)/(1+r)^2)."""
    _check_poisson(params, r)
    a, b = params.alpha, params.beta
    z = 2 * r * (1 + t) / (1 + r) ** 2
    return poisson_g(params, r) * hypergeometric_2f1_real((a + b + 2) / 2, (a + b + 3) / 2, b + 1, z)


# --------------------------------------------------------------------------
# Gauss-Jacobi quadrature


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    params: JacobiParams

    @property
    def order(self) -> int:
        return len(self.nodes)

    def integrate(self, f):
        """Sum of weights * f(nodes); ``f`` must accept an array."""
        return float(np.dot(self.weights, f(self.nodes)))


def recurrence_coefficients(params: JacobiParams, order: int):
    """Diagonal and off-diagonal of the Jacobi matrix for the monic recurrence."""
    a, b = params.alpha, params.beta
    ab = a + b
    n = np.arange(order, dtype=float)
    diag = np.empty(order)
    diag[0] = (b - a) / (ab + 2)
    if order > 1:
        m = n[1:]
        diag[1:] = (b * b - a * a) / ((2 * m + ab) * (2 * m + ab + 2))
    off = np.empty(max(order - 1, 0))
    if order > 1:
        off[0] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
        m = n[2:]
        off[1:] = (4 * m * (m + a) * (m + b) * (m + ab)
                   / ((2 * m + ab) ** 2 * (2 * m + ab + 1) * (2 * m + ab - 1)))
        off = np.sqrt(off)
    return diag, off


def gauss_jacobi_rule(params: JacobiParams, order: int) -> QuadratureRule:
    """Golub-Welsch nodes, Newton-polished, with Christoffel weights.

    Exact for polynomials of degree up to ``2 * order - 1`` against the
    Jacobi weight.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    diag, off = recurrence_coefficients(params, order)
    jm = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    nodes = eigvalsh(jm)
    # polish against P_order; eigenvalue error is absolute, roots near +-1 want relative
    for _ in range(2):
        step = jacobi_eval(params, order, nodes) / jacobi_derivative(params, order, nodes)
        step = np.where(np.abs(step) < 1e-6, step, 0.0)
        nodes = nodes - step
    if np.any(np.diff(nodes) <= 0) or nodes[0] <= -1 or nodes[-1] >= 1:
        raise QuadratureError(f"Gauss-Jacobi nodes not strictly inside (-1, 1) at order {order}")
    table = jacobi_table(params, order - 1, nodes)
    inv_h = np.array([1.0 / jacobi_norm_h(params, k) for k in range(order)])
    weights = 1.0 / np.einsum("kn,k->n", table * table, inv_h)
    return QuadratureRule(nodes, weights, params)
