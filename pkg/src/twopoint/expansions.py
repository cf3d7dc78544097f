"""Coefficient schemes a_{k,l}, truncated kernel series and coefficient recovery.

A product kernel on ``space1 x space2`` is

    K(t, s) = sum_{k,l} a_{k,l} P_k^{(alpha,beta)}(t) P_l^{(alpha',beta')}(s)

with t, s the cosines of half the distances in each factor. Coefficients come
from a finite table plus symbolic families carrying a_{k,l} = C rho^(k+l) on
every member of a generator.
"""
from __future__ import annotations

import functools
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from .classification import FiniteSet, Generator, Grid, IndexSet, Ray, generator_from_json
from .config import DEFAULTS
from .errors import NonConvergenceError, QuadratureError, SchemaError
from .spaces import Point, Space, SpaceFamily, cos_half_distance, space_from_json
from .special_functions import (JacobiParams, _gamma_quotient, gauss_jacobi_rule,
                                jacobi_at_one_table, jacobi_norm_h, jacobi_table)


class CoefficientTable(Mapping):
    """Immutable sparse map (k, l) -> a with every stored a > 0.

    Zero entries are dropped on construction; negative or non-finite values
    raise :class:`SchemaError`.
    """

    def __init__(self, entries=()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data = {}
        for item in items:
            if len(item) == 3:
                k, l, a = item
            else:
                (k, l), a = item
            if int(k) != k or int(l) != l or k < 0 or l < 0:
                raise SchemaError(f"coefficient index must be a nonnegative integer pair, got ({k}, {l})")
            a = float(a)
            if not math.isfinite(a) or a < 0:
                raise SchemaError(f"coefficient a[{k},{l}] must be finite and >= 0, got {a}")
            if a > 0:
                key = (int(k), int(l))
                data[key] = data.get(key, 0.0) + a
        self._data = dict(sorted(data.items()))

    def __getitem__(self, key):
        return self._data[tuple(key)]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def __repr__(self):
        return f"CoefficientTable({self._data!r})"

    def __eq__(self, other):
        if isinstance(other, CoefficientTable):
            return self._data == other._data
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._data.items()))

    def to_json(self):
        return [{"k": k, "l": l, "a": a} for (k, l), a in self._data.items()]


@dataclass(frozen=True)
class FamilyTerm:
    """a_{k,l} = amplitude * ratio^(k+l) on every member of ``generator``."""

    generator: Generator
    amplitude: float = DEFAULTS.family_amplitude
    ratio: float = DEFAULTS.family_ratio

    def __post_init__(self):
        if not (self.amplitude > 0 and math.isfinite(self.amplitude)):
            raise SchemaError(f"family amplitude C must be > 0, got {self.amplitude}")
        if not 0 < self.ratio < 1:
            raise SchemaError(f"family ratio rho must lie in (0, 1), got {self.ratio}")

    def to_json(self):
        return {**self.generator.to_json(), "C": self.amplitude, "rho": self.ratio}


def _family_from_json(data) -> FamilyTerm:
    gen = generator_from_json(data)
    return FamilyTerm(gen, float(data.get("C", DEFAULTS.family_amplitude)),
                      float(data.get("rho", DEFAULTS.family_ratio)))


# --------------------------------------------------------------------------
# tail sums of sum rho^(k+l) P_k(1) Q_l(1) along arithmetic progressions


def _log_at_one(alpha, k):
    return math.lgamma(k + alpha + 1) - math.lgamma(alpha + 1) - math.lgamma(k + 1)


def _progression_sum(alpha1, alpha2, rho, k, l, dk, dl, rel=1e-16, max_terms=10_000_000):
    """Upper bound for sum_{r>=0} rho^(k_r+l_r) P_{k_r}(1) Q_{l_r}(1), (k_r, l_r) = (k+r dk, l+r dl).

    Terms are summed until the geometric remainder, bounded with the
    non-increasing ratio majorant, drops below ``rel`` of the partial sum.
    With dk = dl = 0 the single term is returned.
    """
    term = math.exp((k + l) * math.log(rho) + _log_at_one(alpha1, k) + _log_at_one(alpha2, l))
    if dk == 0 and dl == 0:
        return term
    rho_step = rho ** (dk + dl)
    total = 0.0
    for _ in range(max_terms):
        total += term
        q, qbar = rho_step, rho_step
        for j in range(1, dk + 1):
            f = (alpha1 + k + j) / (k + j)
            q *= f
            qbar *= max(f, 1.0)
        for j in range(1, dl + 1):
            f = (alpha2 + l + j) / (l + j)
            q *= f
            qbar *= max(f, 1.0)
        # factors (alpha + m)/m are monotone in m, so qbar majorises every later ratio
        if term == 0.0:
            return total
        if qbar < 1 and term * qbar / (1 - qbar) <= rel * total:
            return total + term * qbar / (1 - qbar)
        term *= q
        k += dk
        l += dl
    raise NonConvergenceError("tail series did not settle; ratio too close to 1")


def _generator_mass(gen, alpha1, alpha2, rho, kmax, lmax):
    """(inside, outside) sums of rho^(k+l) P_k(1) Q_l(1) over members of ``gen``
    inside / outside the box [0, kmax] x [0, lmax]."""
    if isinstance(gen, FiniteSet):
        inside = outside = 0.0
        for k, l in gen.members:
            v = _progression_sum(alpha1, alpha2, rho, k, l, 0, 0)
            if k <= kmax and l <= lmax:
                inside += v
            else:
                outside += v
        return inside, outside
    if isinstance(gen, Ray):
        (k0, l0), (dk, dl) = gen.start, gen.step
        limits = []
        if dk:
            limits.append((kmax - k0) // dk)
        elif k0 > kmax:
            limits.append(-1)
        if dl:
            limits.append((lmax - l0) // dl)
        elif l0 > lmax:
            limits.append(-1)
        rmax = max(min(limits), -1)
        total = _progression_sum(alpha1, alpha2, rho, k0, l0, dk, dl)
        r1 = rmax + 1
        outside = _progression_sum(alpha1, alpha2, rho, k0 + r1 * dk, l0 + r1 * dl, dk, dl)
        return max(total - outside, 0.0), outside
    if isinstance(gen, Grid):
        (k0, l0), (a, b) = gen.start, gen.steps

        def axis(alpha, start, step, top):
            full = _progression_sum(alpha, 0.0, rho, start, 0, step, 0)
            u = max((top - start) // step + 1, 0)
            tail = _progression_sum(alpha, 0.0, rho, start + u * step, 0, step, 0)
            return max(full - tail, 0.0), tail

        in1, out1 = axis(alpha1, k0, a, kmax)
        in2, out2 = axis(alpha2, l0, b, lmax)
        return in1 * in2, out1 * (in2 + out2) + in1 * out2
    raise TypeError(f"not a generator: {gen!r}")


# --------------------------------------------------------------------------
# KernelSpec


def _truncation(value):
    if value is None:
        return DEFAULTS.truncation, DEFAULTS.truncation
    if isinstance(value, int):
        value = (value, value)
    kmax, lmax = (int(v) for v in value)
    if kmax < 0 or lmax < 0:
        raise SchemaError(f"truncation must be nonnegative, got {value}")
    return kmax, lmax


@dataclass(frozen=True, eq=False)
class KernelSpec:
    space1: Space
    space2: Space
    finite: CoefficientTable = field(default_factory=CoefficientTable)
    families: tuple[FamilyTerm, ...] = ()
    truncation: tuple[int, int] = (DEFAULTS.truncation, DEFAULTS.truncation)

    def __post_init__(self):
        if not isinstance(self.finite, CoefficientTable):
            object.__setattr__(self, "finite", CoefficientTable(self.finite))
        fams = tuple(f if isinstance(f, FamilyTerm) else FamilyTerm(f) for f in self.families)
        object.__setattr__(self, "families", fams)
        object.__setattr__(self, "truncation", _truncation(self.truncation))

    # -- coefficients -----------------------------------------------------

    def coefficient(self, k: int, l: int) -> float:
        """Effective a_{k,l}: finite entry plus every family containing (k, l)."""
        out = self.finite.get((k, l), 0.0)
        for fam in self.families:
            if fam.generator.contains(k, l):
                out += fam.amplitude * fam.ratio ** (k + l)
        return out

    @functools.cached_property
    def coefficient_matrix(self) -> np.ndarray:
        """Dense (K+1) x (L+1) array of effective coefficients within the truncation."""
        kmax, lmax = self.truncation
        a = np.zeros((kmax + 1, lmax + 1))
        for (k, l), v in self.finite.items():
            if k <= kmax and l <= lmax:
                a[k, l] += v
        for fam in self.families:
            for k, l in fam.generator.members_in_box(kmax, lmax):
                a[k, l] += fam.amplitude * fam.ratio ** (k + l)
        a.flags.writeable = False
        return a

    def support(self) -> IndexSet:
        """J_K in generator form."""
        gens = [f.generator for f in self.families]
        if self.finite:
            gens.insert(0, FiniteSet(tuple(self.finite)))
        return IndexSet(tuple(gens))

    @functools.cached_property
    def _masses(self):
        kmax, lmax = self.truncation
        a1, a2 = self.space1.alpha, self.space2.alpha
        inside = outside = 0.0
        for (k, l), v in self.finite.items():
            p = v * _progression_sum(a1, a2, 1.0, k, l, 0, 0)
            if k <= kmax and l <= lmax:
                inside += p
            else:
                outside += p
        for fam in self.families:
            i, o = _generator_mass(fam.generator, a1, a2, fam.ratio, kmax, lmax)
            inside += fam.amplitude * i
            outside += fam.amplitude * o
        return inside, outside

    def tail_bound(self) -> float:
        """Upper bound for sum of a_{k,l} P_k(1) P_l(1) over indices outside the truncation."""
        return self._masses[1]

    def summability_bound(self) -> float:
        """sum over all (k, l) of a_{k,l} P_k(1) P_l(1), finite by geometric decay."""
        return sum(self._masses)

    # -- evaluation -------------------------------------------------------

    @functools.cached_property
    def _active(self):
        a = self.coefficient_matrix
        rows = np.flatnonzero(a.any(axis=1))
        cols = np.flatnonzero(a.any(axis=0))
        if rows.size == 0:
            return None
        return a[: rows[-1] + 1, : cols[-1] + 1]

    def evaluate(self, t, s):
        """Truncated series at broadcastable arrays ``t``, ``s`` in [-1, 1]."""
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        if np.any(np.abs(t) > 1 + 1e-12) or np.any(np.abs(s) > 1 + 1e-12):
            raise ValueError("kernel arguments must lie in [-1, 1]")
        a = self._active
        if a is None:
            return np.zeros(t.shape) if t.ndim else 0.0
        p = jacobi_table(self.space1.params, a.shape[0] - 1, t.ravel())
        q = jacobi_table(self.space2.params, a.shape[1] - 1, s.ravel())
        out = np.einsum("kn,kl,ln->n", p, a, q).reshape(t.shape)
        return out if t.ndim else float(out)

    @functools.cached_property
    def corner_value(self) -> float:
        """K(1, 1) of the truncated series."""
        a = self._active
        if a is None:
            return 0.0
        p1 = jacobi_at_one_table(self.space1.params, a.shape[0] - 1)
        q1 = jacobi_at_one_table(self.space2.params, a.shape[1] - 1)
        return float(p1 @ a @ q1)

    # -- serialisation ----------------------------------------------------

    def with_truncation(self, truncation) -> KernelSpec:
        return KernelSpec(self.space1, self.space2, self.finite, self.families, truncation)

    def to_json(self) -> dict:
        return {
            "space1": self.space1.to_json(),
            "space2": self.space2.to_json(),
            "finite": self.finite.to_json(),
            "families": [f.to_json() for f in self.families],
            "truncation": list(self.truncation),
        }


@functools.lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """One of the bundled JSON schemas (``kernel_spec``, ``classification`` ...)."""
    text = resources.files("twopoint").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def validate_json(data, schema_name: str):
    try:
        jsonschema.validate(data, load_schema(schema_name))
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise SchemaError(f"{schema_name}: {exc.message} at {where}") from None


def spec_from_json(data) -> KernelSpec:
    """Parse and validate a KernelSpec JSON object."""
    validate_json(data, "kernel_spec")
    return KernelSpec(
        space_from_json(data["space1"]),
        space_from_json(data["space2"]),
        CoefficientTable((e["k"], e["l"], e["a"]) for e in data.get("finite", [])),
        tuple(_family_from_json(f) for f in data.get("families", [])),
        _truncation(data.get("truncation")),
    )


def load_spec(path) -> KernelSpec:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return spec_from_json(data)


# --------------------------------------------------------------------------
# evaluation entry points


def kernel_eval(spec: KernelSpec, t, s):
    """Truncated kernel value and the truncation tail bound.

    Returns
    -------
    value : float or ndarray
    tail : float
        Bound on the contribution of every coefficient outside the
        truncation box, valid uniformly in (t, s).
    """
    return spec.evaluate(t, s), spec.tail_bound()


def kernel_eval_points(spec: KernelSpec, x: Point, w: Point, y: Point, z: Point) -> float:
    """K((x, w), (y, z)) through the half-distance cosines of each factor."""
    t = cos_half_distance(spec.space1, x, y)
    s = cos_half_distance(spec.space2, w, z)
    return float(spec.evaluate(t, s))


# --------------------------------------------------------------------------
# coefficient recovery


@functools.lru_cache(maxsize=256)
def _rule(params: JacobiParams, order: int):
    return gauss_jacobi_rule(params, order)


def _projection_2d(f, p1, p2, k, l, order):
    r1, r2 = _rule(p1, order), _rule(p2, order)
    tt, ss = np.meshgrid(r1.nodes, r2.nodes, indexing="ij")
    vals = np.asarray(f(tt, ss), dtype=float)
    if vals.shape != tt.shape:
        vals = np.broadcast_to(vals, tt.shape)
    pk = jacobi_table(p1, k, r1.nodes)[k]
    ql = jacobi_table(p2, l, r2.nodes)[l]
    integral = (r1.weights * pk) @ vals @ (r2.weights * ql)
    return integral / (jacobi_norm_h(p1, k) * jacobi_norm_h(p2, l))


def _adaptive(project, start, tol, doublings):
    order = start
    prev = project(order)
    for _ in range(doublings):
        order *= 2
        cur = project(order)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"coefficient did not stabilise up to quadrature order {order}")


def compute_coefficient(f, space1: Space, space2: Space, k: int, l: int, order=None, tol=None) -> float:
    """a_{k,l}(f) by tensor Gauss-Jacobi quadrature.

    Parameters
    ----------
    f : callable
        ``f(t, s)`` accepting broadcast 2-D arrays.
    order : int, optional
        Starting quadrature order, default ``max(k, l) + 10``. The order is
        doubled (at most twice by default) until successive values agree to
        ``tol``; otherwise :class:`QuadratureError`.
    """
    tol = DEFAULTS.quadrature_tol if tol is None else tol
    start = max(k, l) + DEFAULTS.quadrature_extra if order is None else int(order)
    if start < max(k, l) + 1:
        raise ValueError(f"quadrature order {start} too low for degrees ({k}, {l})")
    p1, p2 = space1.params, space2.params
    return _adaptive(lambda n: _projection_2d(f, p1, p2, k, l, n), start, tol, DEFAULTS.quadrature_doublings)


def coefficient_table(f, space1: Space, space2: Space, kmax: int, lmax: int, order=None, tol=None) -> np.ndarray:
    """All a_{k,l}(f) for k <= kmax, l <= lmax from one tensor rule per order.

    Same order schedule and stopping rule as :func:`compute_coefficient`,
    applied to the whole table at once.
    """
    tol = DEFAULTS.quadrature_tol if tol is None else tol
    start = max(kmax, lmax) + DEFAULTS.quadrature_extra if order is None else int(order)
    p1, p2 = space1.params, space2.params
    h1 = np.array([jacobi_norm_h(p1, k) for k in range(kmax + 1)])
    h2 = np.array([jacobi_norm_h(p2, l) for l in range(lmax + 1)])

    def project(n):
        r1, r2 = _rule(p1, n), _rule(p2, n)
        tt, ss = np.meshgrid(r1.nodes, r2.nodes, indexing="ij")
        vals = np.broadcast_to(np.asarray(f(tt, ss), dtype=float), tt.shape)
        pk = jacobi_table(p1, kmax, r1.nodes) * r1.weights
        ql = jacobi_table(p2, lmax, r2.nodes) * r2.weights
        return (pk @ vals @ ql.T) / np.outer(h1, h2)

    n = start
    prev = project(n)
    for _ in range(DEFAULTS.quadrature_doublings):
        n *= 2
        cur = project(n)
        if np.all(np.abs(cur - prev) <= tol * np.maximum(1.0, np.abs(cur))):
            return cur
        prev = cur
    raise QuadratureError(f"coefficient table did not stabilise up to quadrature order {n}")


def _projection_1d(f, params, k, order):
    rule = _rule(params, order)
    vals = np.broadcast_to(np.asarray(f(rule.nodes), dtype=float), rule.nodes.shape)
    pk = jacobi_table(params, k, rule.nodes)[k]
    return float(np.dot(rule.weights, vals * pk)) / jacobi_norm_h(params, k)


def gangolli_coefficient_1d(f, space, k: int, order=None, tol=None) -> float:
    """a_k of a single-variable function in the Jacobi basis of ``space``.

    ``space`` may be a :class:`Space` or bare :class:`JacobiParams`.
    """
    params = space.params if isinstance(space, Space) else space
    tol = DEFAULTS.quadrature_tol if tol is None else tol
    start = k + DEFAULTS.quadrature_extra if order is None else int(order)
    return _adaptive(lambda n: _projection_1d(f, params, k, n), start, tol, DEFAULTS.quadrature_doublings)


def embedding_sphere_dimension(space: Space) -> int:
    """Dimension q of the sphere whose Gegenbauer basis receives the connection.

    Spheres keep their own dimension; every projective family reaches S^2
    through the chain of isometric embeddings starting at P^2(R).
    """
    return space.d if space.is_sphere else 2


def connection_coefficients(source: JacobiParams, q: int, l: int, order=None) -> np.ndarray:
    """b_0..b_l with P_l^{source}(s) = sum_j b_j P_{l-j}^{((q-2)/2, (q-2)/2)}(s).

    Exact Gauss-Jacobi projection in the target weight (the integrands are
    polynomials of degree <= 2l).
    """
    if q < 2 or l < 0:
        raise ValueError("need q >= 2 and l >= 0")
    g = (q - 2) / 2
    target = JacobiParams(g, g)
    rule = _rule(target, max(l + 1, int(order or 0)))
    src = jacobi_table(source, l, rule.nodes)[l]
    tgt = jacobi_table(target, l, rule.nodes)
    inv_h = np.array([1.0 / jacobi_norm_h(target, m) for m in range(l + 1)])
    coeffs = (tgt * rule.weights) @ src * inv_h  # indexed by target degree m
    return coeffs[::-1].copy()  # b_j multiplies degree l - j


def addition_constant(space: Space, k: int) -> float:
    """c_k^{d,beta} = Gamma(b+1)(2k+a+b+1)Gamma(k+a+b+1) / (Gamma(a+b+2)Gamma(k+b+1))."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    a, b = space.alpha, space.beta
    if k == 0:
        # (a+b+1) Gamma(a+b+1) = Gamma(a+b+2) for every Wang pair, including a+b+1 = 0
        return 1.0
    return (2 * k + a + b + 1) * _gamma_quotient([b + 1, k + a + b + 1], [a + b + 2, k + b + 1])


__all__ = [
    "CoefficientTable", "FamilyTerm", "KernelSpec", "kernel_eval", "kernel_eval_points",
    "compute_coefficient", "coefficient_table", "gangolli_coefficient_1d", "connection_coefficients",
    "addition_constant", "embedding_sphere_dimension", "spec_from_json", "load_spec",
    "validate_json", "load_schema", "SpaceFamily",
]
