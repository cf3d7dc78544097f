"""Compact two-point homogeneous spaces and concrete point models.

A space of dimension ``d`` carries Jacobi parameters ``alpha = (d-2)/2`` and
``beta`` fixed by its family. Kernels only see points through the variable
``t = cos(|xy|/2)``:

* sphere ``S^d``: ``t = <x, y>`` for unit vectors in R^{d+1};
* projective spaces over R, C, H: ``t = 2 |<x, y>|^2 - 1`` for unit
  representatives of the lines, with ``<x, y> = sum conj(x_i) y_i``.

Quaternions are stored as trailing length-4 arrays ``(a, b, c, d)`` meaning
``a + b i + c j + d k``. Quaternionic lines are right-modules, so the gauge
is ``x -> x q`` with ``|q| = 1``. The Cayley plane has parameters but no
point model.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SchemaError, UnsupportedFamilyError
from .special_functions import JacobiParams


class SpaceFamily(enum.Enum):
    SPHERE = "sphere"
    REAL_PROJECTIVE = "real_projective"
    COMPLEX_PROJECTIVE = "complex_projective"
    QUATERNION_PROJECTIVE = "quaternion_projective"
    CAYLEY_PLANE = "cayley_plane"

    @classmethod
    def parse(cls, value) -> SpaceFamily:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_").replace(" ", "_")
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise SchemaError(f"unknown space family {value!r}") from None


_ALIASES = {
    "s": "sphere", "rp": "real_projective", "cp": "complex_projective",
    "hp": "quaternion_projective", "cay": "cayley_plane", "cayley": "cayley_plane",
    "oct": "cayley_plane",
}

_BETA = {
    SpaceFamily.REAL_PROJECTIVE: -0.5,
    SpaceFamily.COMPLEX_PROJECTIVE: 0.0,
    SpaceFamily.QUATERNION_PROJECTIVE: 1.0,
    SpaceFamily.CAYLEY_PLANE: 3.0,
}

_SYMBOL = {
    SpaceFamily.SPHERE: "S^{d}",
    SpaceFamily.REAL_PROJECTIVE: "P^{d}(R)",
    SpaceFamily.COMPLEX_PROJECTIVE: "P^{d}(C)",
    SpaceFamily.QUATERNION_PROJECTIVE: "P^{d}(H)",
    SpaceFamily.CAYLEY_PLANE: "P^{d}(Cay)",
}


@dataclass(frozen=True)
class Space:
    family: SpaceFamily
    d: int

    @property
    def alpha(self) -> float:
        return (self.d - 2) / 2

    @property
    def beta(self) -> float:
        if self.family is SpaceFamily.SPHERE:
            return (self.d - 2) / 2
        return _BETA[self.family]

    @property
    def params(self) -> JacobiParams:
        return JacobiParams(self.alpha, self.beta)

    @property
    def is_sphere(self) -> bool:
        return self.family is SpaceFamily.SPHERE

    @property
    def has_point_model(self) -> bool:
        return self.family is not SpaceFamily.CAYLEY_PLANE

    @property
    def components(self) -> int:
        """Number of base-field entries in a point representative."""
        f = self.family
        if f in (SpaceFamily.SPHERE, SpaceFamily.REAL_PROJECTIVE):
            return self.d + 1
        if f is SpaceFamily.COMPLEX_PROJECTIVE:
            return self.d // 2 + 1
        if f is SpaceFamily.QUATERNION_PROJECTIVE:
            return self.d // 4 + 1
        raise UnsupportedFamilyError("the Cayley plane has no point model")

    def to_json(self) -> dict:
        return {"family": self.family.value, "d": self.d}

    def __str__(self):
        return _SYMBOL[self.family].format(d=self.d)


def make_space(family, d: int) -> Space:
    """Validated :class:`Space`; raises DimensionError for inadmissible ``d``."""
    family = SpaceFamily.parse(family)
    if isinstance(d, bool) or int(d) != d:
        raise DimensionError(f"dimension must be an integer, got {d!r}")
    d = int(d)
    ok = {
        SpaceFamily.SPHERE: d >= 1,
        SpaceFamily.REAL_PROJECTIVE: d >= 2,
        SpaceFamily.COMPLEX_PROJECTIVE: d >= 4 and d % 2 == 0,
        SpaceFamily.QUATERNION_PROJECTIVE: d >= 8 and d % 4 == 0,
        SpaceFamily.CAYLEY_PLANE: d == 16,
    }[family]
    if not ok:
        raise DimensionError(f"d = {d} is not a valid dimension for {family.value}")
    return Space(family, d)


def space_from_json(data) -> Space:
    try:
        return make_space(data["family"], data["d"])
    except (KeyError, TypeError):
        raise SchemaError(f"space must be an object with 'family' and 'd', got {data!r}") from None


# --------------------------------------------------------------------------
# quaternion arithmetic


def _quaternion_structure():
    # table[s, u, v]: coefficient of basis s in e_u * e_v, basis (1, i, j, k)
    table = np.zeros((4, 4, 4))
    prod = {
        (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
        (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
        (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
        (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
    }
    for (u, v), (s, sign) in prod.items():
        table[s, u, v] = sign
    return table


_QTABLE = _quaternion_structure()
_QCONJ = np.array([1.0, -1.0, -1.0, -1.0])


def qmul(p, q):
    """Quaternion product, broadcasting over leading axes."""
    return np.einsum("suv,...u,...v->...s", _QTABLE, p, q)


def qconj(q):
    return np.asarray(q) * _QCONJ


# --------------------------------------------------------------------------
# points


@dataclass(frozen=True, eq=False)
class Point:
    """Unit representative: real ``(n,)``, complex ``(n,)`` or quaternion ``(n, 4)``."""

    coords: np.ndarray

    def __neg__(self):
        return Point(-self.coords)


def _stack(points):
    return np.stack([p.coords for p in points])


def _inner_matrix(space: Space, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Real inner products (sphere, RP) or moduli squared of Hermitian ones."""
    f = space.family
    if f is SpaceFamily.SPHERE:
        return xs @ ys.T
    if f is SpaceFamily.REAL_PROJECTIVE:
        return (xs @ ys.T) ** 2
    if f is SpaceFamily.COMPLEX_PROJECTIVE:
        return np.abs(xs.conj() @ ys.T) ** 2
    if f is SpaceFamily.QUATERNION_PROJECTIVE:
        g = np.einsum("suv,niu,miv->nms", _QTABLE, xs * _QCONJ, ys)
        return np.sum(g * g, axis=-1)
    raise UnsupportedFamilyError("the Cayley plane has no point model")


def cos_half_distance_matrix(space: Space, xs, ys=None) -> np.ndarray:
    """Matrix of ``t = cos(|x_i y_j|/2)`` between two point lists, clamped to [-1, 1]."""
    xs = _stack(xs)
    ys = xs if ys is None else _stack(ys)
    g = _inner_matrix(space, xs, ys)
    t = g if space.is_sphere else 2.0 * g - 1.0
    return np.clip(t, -1.0, 1.0)


def cos_half_distance(space: Space, x: Point, y: Point) -> float:
    """Kernel variable ``t = cos(|xy|/2)`` for two points of ``space``.

    Symmetrised so that swapping ``x`` and ``y`` gives the identical float.
    """
    t = cos_half_distance_matrix(space, [x, y])
    return float(0.5 * (t[0, 1] + t[1, 0]))


def _as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.PCG64(rng))


def _gaussian_coords(space: Space, rng) -> np.ndarray:
    f = space.family
    n = space.components
    if f in (SpaceFamily.SPHERE, SpaceFamily.REAL_PROJECTIVE):
        return rng.standard_normal(n)
    if f is SpaceFamily.COMPLEX_PROJECTIVE:
        z = rng.standard_normal((n, 2))
        return z[:, 0] + 1j * z[:, 1]
    return rng.standard_normal((n, 4))


def _normalize(coords):
    return coords / np.sqrt(np.sum(np.abs(coords) ** 2))


def sample_point(space: Space, rng) -> Point:
    """Uniform point: a normalised standard Gaussian over the base field.

    ``rng`` is a :class:`numpy.random.Generator` (PCG64) or a seed for one.
    """
    if not space.has_point_model:
        raise UnsupportedFamilyError("cannot sample the Cayley plane")
    return Point(_normalize(_gaussian_coords(space, _as_rng(rng))))


def hermitian_inner(space: Space, x: Point, y: Point):
    """``sum conj(x_i) y_i`` in the base field (quaternions as length-4 arrays)."""
    if space.family is SpaceFamily.QUATERNION_PROJECTIVE:
        return np.sum(qmul(qconj(x.coords), y.coords), axis=0)
    if space.family is SpaceFamily.CAYLEY_PLANE:
        raise UnsupportedFamilyError("the Cayley plane has no point model")
    return np.vdot(x.coords, y.coords)


def sample_antipodal(space: Space, x: Point, rng) -> Point:
    """A point at ``t = -1`` from ``x``.

    On the sphere this is ``-x``. On a projective space it is a uniformly
    drawn line orthogonal to ``x``.
    """
    if not space.has_point_model:
        raise UnsupportedFamilyError("cannot sample the Cayley plane")
    if space.is_sphere:
        return Point(-x.coords)
    rng = _as_rng(rng)
    for _ in range(100):
        g = _gaussian_coords(space, rng)
        ip = hermitian_inner(space, x, Point(g))
        if space.family is SpaceFamily.QUATERNION_PROJECTIVE:
            y = g - qmul(x.coords, ip)
        else:
            y = g - x.coords * ip
        if np.sqrt(np.sum(np.abs(y) ** 2)) > 1e-8:
            return Point(_normalize(y))
    raise RuntimeError("could not draw an orthogonal direction")  # pragma: no cover


def scale_point(space: Space, x: Point, scalar) -> Point:
    """Representative of the same line multiplied by a unit scalar (right action)."""
    if space.family is SpaceFamily.QUATERNION_PROJECTIVE:
        return Point(qmul(x.coords, np.asarray(scalar, dtype=float)))
    return Point(x.coords * scalar)


def embed_point(x: Point, source: Space, target: Space) -> Point:
    """Isometric inclusion along P(R) -> P(C) -> P(H), padding with zeros.

    Real entries become complex with zero imaginary part; complex entries
    ``a + bi`` become quaternions ``(a, b, 0, 0)``.
    """
    order = [SpaceFamily.REAL_PROJECTIVE, SpaceFamily.COMPLEX_PROJECTIVE,
             SpaceFamily.QUATERNION_PROJECTIVE]
    if source.family not in order or target.family not in order:
        raise UnsupportedFamilyError("embedding defined between real, complex and quaternionic projective spaces")
    if order.index(target.family) < order.index(source.family) or target.components < source.components:
        raise DimensionError(f"no embedding {source} -> {target}")
    c = x.coords
    if source.family is SpaceFamily.REAL_PROJECTIVE:
        c = c.astype(complex)
    if target.family is SpaceFamily.QUATERNION_PROJECTIVE and np.iscomplexobj(c):
        c = np.stack([c.real, c.imag, np.zeros(len(c)), np.zeros(len(c))], axis=-1)
    pad = target.components - len(c)
    c = np.concatenate([c, np.zeros((pad,) + c.shape[1:], dtype=c.dtype)])
    return Point(c)


# --------------------------------------------------------------------------
# JSON


def point_to_json(space: Space, x: Point) -> list:
    """Real spaces: list of floats. Complex: ``[re, im]`` pairs. Quaternionic: quadruples."""
    if space.family is SpaceFamily.COMPLEX_PROJECTIVE:
        return [[float(z.real), float(z.imag)] for z in x.coords]
    return np.asarray(x.coords, dtype=float).tolist()


def point_from_json(space: Space, data) -> Point:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"point components must be numbers: {data!r}") from None
    f = space.family
    expected = {
        SpaceFamily.SPHERE: (space.components,),
        SpaceFamily.REAL_PROJECTIVE: (space.components,),
        SpaceFamily.COMPLEX_PROJECTIVE: (space.components, 2),
        SpaceFamily.QUATERNION_PROJECTIVE: (space.components, 4),
    }.get(f)
    if expected is None:
        raise UnsupportedFamilyError("the Cayley plane has no point model")
    if arr.shape != expected:
        raise SchemaError(f"{space} point needs shape {expected}, got {arr.shape}")
    coords = arr[:, 0] + 1j * arr[:, 1] if f is SpaceFamily.COMPLEX_PROJECTIVE else arr
    norm = np.sqrt(np.sum(np.abs(coords) ** 2))
    if abs(norm - 1) > 1e-9:
        raise SchemaError(f"point representative has norm {norm}, expected 1")
    return Point(coords / norm)
