"""Identity suites run by ``twopoint selftest`` and ``twopoint poisson-check``.

Each check returns a :class:`CheckResult`; a suite passes iff every check
passes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expansions import KernelSpec, kernel_eval_points
from .spaces import SpaceFamily, make_space, sample_point
from .special_functions import (JacobiParams, f21_derivative_check, gauss_jacobi_rule,
                                jacobi_norm_h, jacobi_table, poisson_lhs, poisson_rhs)

# (alpha, beta) for S^2, P^3(R), P^4(C), P^8(H) and the Cayley plane
WANG_PAIRS = ((0.0, 0.0), (0.5, -0.5), (1.0, 0.0), (3.0, 1.0), (7.0, 3.0))
POISSON_R = (-0.7, -0.3, 0.3, 0.7)
POISSON_T = (-1.0, -0.5, 0.0, 0.5, 1.0)
F21_TRIPLES = ((0.5, 1.5, 2.5), (1.0, 2.0, 3.5), (-0.5, 0.75, 1.25))
F21_Z = (-0.6, -0.2, 0.1, 0.45, 0.8)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tol: float
    cases: int

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "max_error": self.max_error,
                "tol": self.tol, "cases": self.cases}


def orthogonality_errors(params: JacobiParams, kmax=20, order=None) -> np.ndarray:
    """|<P_k, P_l> - delta_{kl} h_k| / sqrt(h_k h_l) for 0 <= k, l <= kmax."""
    rule = gauss_jacobi_rule(params, order or kmax + 5)
    p = jacobi_table(params, kmax, rule.nodes)
    gram = (p * rule.weights) @ p.T
    h = np.array([jacobi_norm_h(params, k) for k in range(kmax + 1)])
    return np.abs(gram - np.diag(h)) / np.sqrt(np.outer(h, h))


def check_orthogonality(tol=1e-9, kmax=20) -> CheckResult:
    err = max(float(orthogonality_errors(JacobiParams(a, b), kmax).max()) for a, b in WANG_PAIRS)
    return CheckResult("orthogonality", err <= tol, err, tol, len(WANG_PAIRS) * (kmax + 1) ** 2)


def poisson_errors():
    """Relative lhs/rhs mismatch over the (params, r, t) grid, as a list of tuples."""
    out = []
    for a, b in WANG_PAIRS:
        params = JacobiParams(a, b)
        for r in POISSON_R:
            for t in POISSON_T:
                lhs, rhs = poisson_lhs(params, t, r), poisson_rhs(params, t, r)
                out.append(((a, b), r, t, lhs, rhs, abs(lhs - rhs) / abs(rhs)))
    return out


def check_poisson(tol=1e-7) -> CheckResult:
    rows = poisson_errors()
    err = max(row[-1] for row in rows)
    return CheckResult("poisson", err <= tol, err, tol, len(rows))


def check_derivative(tol=1e-6) -> CheckResult:
    err, cases = 0.0, 0
    for a, b, c in F21_TRIPLES:
        for z in F21_Z:
            fd, closed = f21_derivative_check(a, b, c, z)
            err = max(err, abs(fd - closed) / abs(closed))
            cases += 1
    return CheckResult("f21-derivative", err <= tol, err, tol, cases)


def check_symmetry(tol=1e-14, seed=0) -> CheckResult:
    """K((x,w),(y,z)) == K((y,z),(x,w)) on random points over several space pairs."""
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = [(("sphere", 2), ("real_projective", 3)),
             (("complex_projective", 4), ("quaternion_projective", 8)),
             (("real_projective", 3), ("sphere", 3))]
    err, cases = 0.0, 0
    for (f1, d1), (f2, d2) in pairs:
        s1, s2 = make_space(f1, d1), make_space(f2, d2)
        spec = KernelSpec(s1, s2, {(0, 0): 1.0, (1, 2): 0.5, (3, 1): 0.25, (4, 4): 0.125})
        for _ in range(10):
            x, y = sample_point(s1, rng), sample_point(s1, rng)
            w, z = sample_point(s2, rng), sample_point(s2, rng)
            u = kernel_eval_points(spec, x, w, y, z)
            v = kernel_eval_points(spec, y, z, x, w)
            err = max(err, abs(u - v))
            cases += 1
    return CheckResult("symmetry", err <= tol, err, tol, cases)


def run_selftest() -> list[CheckResult]:
    return [check_orthogonality(), check_poisson(), check_derivative(), check_symmetry()]


__all__ = ["CheckResult", "WANG_PAIRS", "SpaceFamily", "check_orthogonality", "check_poisson",
           "check_derivative", "check_symmetry", "run_selftest", "poisson_errors",
           "orthogonality_errors"]
