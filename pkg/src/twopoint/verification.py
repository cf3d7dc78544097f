"""Gram-matrix experiments and explicit null configurations.

Experiments sample point configurations on ``space1 x space2``, assemble
the Gram matrix of a truncated kernel and report its smallest eigenvalue
and numerical rank. Every report carries the truncation tail bound so a
small negative eigenvalue is never mistaken for a counterexample.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS
from .errors import SamplingError, SchemaError, UnsupportedFamilyError
from .expansions import KernelSpec, spec_from_json
from .linalg import jacobi_eigh
from .spaces import (Point, Space, _as_rng, cos_half_distance_matrix, point_from_json,
                     point_to_json, sample_antipodal, sample_point)

MODES = ("generic", "dc", "with_antipodal")
CSV_COLUMNS = ("experiment_id", "family1", "d1", "family2", "d2", "n", "seed", "mode",
               "min_eig", "rank", "tail_bound", "elapsed_s")


def _mode(mode: str) -> str:
    mode = {"antipodal": "with_antipodal"}.get(mode, mode)
    if mode not in MODES:
        raise SchemaError(f"unknown mode {mode!r}; choose from {MODES}")
    return mode


# --------------------------------------------------------------------------
# Gram matrices and spectra


def assemble_gram(spec: KernelSpec, points) -> np.ndarray:
    """Gram matrix [K((x_mu, w_mu), (x_nu, w_nu))] for a list of (x, w) pairs.

    Off-diagonal entries are evaluated once on the upper triangle and
    mirrored, so the result is exactly symmetric. The diagonal is K(1, 1).
    """
    n = len(points)
    if n == 0:
        return np.zeros((0, 0))
    t = cos_half_distance_matrix(spec.space1, [p[0] for p in points])
    s = cos_half_distance_matrix(spec.space2, [p[1] for p in points])
    iu = np.triu_indices(n, 1)
    gram = np.empty((n, n))
    vals = spec.evaluate(t[iu], s[iu]) if iu[0].size else np.zeros(0)
    gram[iu] = vals
    gram[iu[1], iu[0]] = vals
    np.fill_diagonal(gram, spec.corner_value)
    return gram


def min_eigenvalue(matrix, tol=None, backend=None):
    """Smallest eigenvalue and the full ascending spectrum (cyclic Jacobi)."""
    w, _ = jacobi_eigh(matrix, tol=tol, vectors=False, backend=backend)
    return (float(w[0]) if w.size else float("nan")), w


def numerical_rank(spectrum, tol_rel=None) -> int:
    """Count of eigenvalues above ``tol_rel * max |eigenvalue|`` (default 1e-9)."""
    tol_rel = DEFAULTS.rank_tol if tol_rel is None else tol_rel
    w = np.asarray(spectrum, dtype=float)
    if w.size == 0:
        return 0
    top = float(np.max(np.abs(w)))
    if top == 0.0:
        return 0
    return int(np.sum(w > tol_rel * top))


# --------------------------------------------------------------------------
# sampling


def _distinct_from(space, cand, others, tol):
    if not others:
        return True
    t = cos_half_distance_matrix(space, [cand], others)
    return bool(np.all(t < 1.0 - tol))


def sample_configuration(spec: KernelSpec, n: int, mode: str, rng, tol=None, retries=None):
    """``n`` product-space points for an experiment ``mode``.

    ``dc`` redraws each new point until both of its components are
    distinct (t < 1 - tol) from all earlier ones. ``with_antipodal`` makes
    the second point antipodal to the first in the sphere factor (the first
    factor when neither is a sphere) and keeps the other component.
    """
    mode = _mode(mode)
    tol = DEFAULTS.distinct_tol if tol is None else tol
    retries = DEFAULTS.sampling_retries if retries is None else retries
    s1, s2 = spec.space1, spec.space2
    for s in (s1, s2):
        if not s.has_point_model:
            raise UnsupportedFamilyError(f"{s} has no point model")
    rng = _as_rng(rng)
    pts: list[tuple[Point, Point]] = []
    if mode == "with_antipodal":
        if n < 2:
            raise SchemaError("with_antipodal mode needs n >= 2")
        x, w = sample_point(s1, rng), sample_point(s2, rng)
        if s2.is_sphere and not s1.is_sphere:
            pts = [(x, w), (x, sample_antipodal(s2, w, rng))]
        else:
            pts = [(x, w), (sample_antipodal(s1, x, rng), w)]
    while len(pts) < n:
        for _ in range(retries):
            x, w = sample_point(s1, rng), sample_point(s2, rng)
            if mode != "dc" or (_distinct_from(s1, x, [p[0] for p in pts], tol)
                                and _distinct_from(s2, w, [p[1] for p in pts], tol)):
                break
        else:
            raise SamplingError(f"no distinct-component point after {retries} draws")
        pts.append((x, w))
    return pts


# --------------------------------------------------------------------------
# experiments


@dataclass(frozen=True, eq=False)
class GramExperiment:
    spec: KernelSpec
    n: int
    seed: int
    mode: str = "generic"
    experiment_id: str = ""

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise SchemaError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "mode", _mode(self.mode))
        for s in (self.spec.space1, self.spec.space2):
            if not s.has_point_model:
                raise UnsupportedFamilyError(f"{s} has no point model; experiments are impossible")


@dataclass(frozen=True)
class GramReport:
    experiment_id: str
    space1: Space
    space2: Space
    n: int
    seed: int
    mode: str
    min_eigenvalue: float
    numerical_rank: int
    tail_bound: float
    corner_value: float
    elapsed: float = field(default=0.0, compare=False)

    def row(self, timing=False) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "family1": self.space1.family.value, "d1": self.space1.d,
            "family2": self.space2.family.value, "d2": self.space2.d,
            "n": self.n, "seed": self.seed, "mode": self.mode,
            "min_eig": repr(self.min_eigenvalue), "rank": self.numerical_rank,
            "tail_bound": repr(self.tail_bound),
            "elapsed_s": f"{self.elapsed:.6f}" if timing else "",
        }

    def to_json(self, timing=False) -> dict:
        out = self.row(timing)
        out["min_eig"] = self.min_eigenvalue
        out["tail_bound"] = self.tail_bound
        out["corner_value"] = self.corner_value
        out["elapsed_s"] = self.elapsed if timing else None
        return out


def run_experiment(exp: GramExperiment, rank_tol=None, backend=None) -> GramReport:
    """Sample, assemble, and eigensolve one experiment; deterministic in ``exp.seed``."""
    start = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(exp.seed))
    pts = sample_configuration(exp.spec, exp.n, exp.mode, rng)
    gram = assemble_gram(exp.spec, pts)
    lo, spectrum = min_eigenvalue(gram, backend=backend)
    return GramReport(
        experiment_id=exp.experiment_id or f"{exp.mode}-n{exp.n}-s{exp.seed}",
        space1=exp.spec.space1, space2=exp.spec.space2,
        n=exp.n, seed=exp.seed, mode=exp.mode,
        min_eigenvalue=lo, numerical_rank=numerical_rank(spectrum, rank_tol),
        tail_bound=exp.spec.tail_bound(), corner_value=exp.spec.corner_value,
        elapsed=time.perf_counter() - start,
    )


def run_batch(experiments, workers: int | None = None, **kwargs) -> list[GramReport]:
    """Run independent experiments, optionally on a thread pool; output order is input order."""
    experiments = list(experiments)
    if not workers or workers <= 1 or len(experiments) < 2:
        return [run_experiment(e, **kwargs) for e in experiments]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda e: run_experiment(e, **kwargs), experiments))


def psd_tolerance(report: GramReport) -> float:
    """Allowed negativity of ``min_eigenvalue`` before a report signals non-PSD."""
    return max(1e-8 * max(report.corner_value, 1.0), 10 * report.tail_bound)


def reports_to_csv(reports, timing=False) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row(timing))
    return buf.getvalue()


# --------------------------------------------------------------------------
# null configurations


@dataclass(frozen=True, eq=False)
class NullCertificate:
    """Points and a nonzero c with c^T A c (numerically) zero."""

    spec: KernelSpec
    construction: str
    points: list
    c: np.ndarray
    quadratic_form: float
    reason: str = ""

    @property
    def bound(self) -> float:
        return 1e-9 * float(self.c @ self.c) * max(self.spec.corner_value, 0.0)

    @property
    def holds(self) -> bool:
        return abs(self.quadratic_form) <= self.bound or self.quadratic_form == 0.0

    def __bool__(self):
        return True

    def to_json(self) -> dict:
        s1, s2 = self.spec.space1, self.spec.space2
        return {
            "spec": self.spec.to_json(),
            "construction": self.construction,
            "points": [[point_to_json(s1, x), point_to_json(s2, w)] for x, w in self.points],
            "c": [float(v) for v in self.c],
            "quadratic_form": self.quadratic_form,
            "bound": self.bound,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class NoConstruction:
    """Typed outcome when neither the parity nor the finiteness pattern applies."""

    reason: str

    def __bool__(self):
        return False

    def to_json(self) -> dict:
        return {"construction": None, "reason": self.reason}


def quadratic_form(spec: KernelSpec, points, c) -> float:
    c = np.asarray(c, dtype=float)
    return float(c @ assemble_gram(spec, points) @ c)


def _parity_construction(spec, rng):
    """Parity pattern in a sphere factor: returns (points, c, label) or None."""
    jk = spec.support()
    for first in (True, False):
        sphere = spec.space1 if first else spec.space2
        if not sphere.is_sphere:
            continue
        par = (jk if first else jk.swapped()).first_parities()
        if len(par) != 1:
            continue
        x, w = sample_point(spec.space1, rng), sample_point(spec.space2, rng)
        other = (-x, w) if first else (x, -w)
        if par == {0}:
            return [(x, w), other], np.array([1.0, -1.0]), "parity-even"
        return [(x, w), other], np.array([1.0, 1.0]), "parity-odd"
    return None


def rank_plateau(spec: KernelSpec, seed=0, start=8, max_points=None, rank_tol=None):
    """Numerical rank once doubling n leaves it unchanged twice in a row.

    Returns ``(plateau, history)`` with history the list of (n, rank).
    """
    max_points = DEFAULTS.rank_plateau_max_points if max_points is None else max_points
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = sample_configuration(spec, max_points, "dc", rng)
    history = []
    n = start
    while n <= max_points:
        lo, spectrum = min_eigenvalue(assemble_gram(spec, pts[:n]))
        history.append((n, numerical_rank(spectrum, rank_tol)))
        if len(history) >= 3 and history[-1][1] == history[-2][1] == history[-3][1]:
            return history[-1][1], history
        n *= 2
    return None, history


def construct_null_config(spec: KernelSpec, reason=None, seed=0):
    """Explicit points and coefficients annihilating the quadratic form.

    Parameters
    ----------
    spec : KernelSpec
    reason : str or dict, optional
        Failed clause from a classification result; recorded in the output.
    seed : int
        Seed for the random base point(s).

    Returns
    -------
    NullCertificate or NoConstruction
        Parity pattern (all sphere-factor degrees even, or all odd) gives two
        antipodal points with c = (1, -1) or (1, 1). A finite support gives
        ``plateau + 1`` generic points with c the bottom eigenvector.
    """
    if isinstance(reason, dict):
        reason = reason.get("failed", "")
    reason = reason or ""
    rng = np.random.Generator(np.random.PCG64(seed))
    found = _parity_construction(spec, rng)
    if found is not None:
        pts, c, label = found
        return NullCertificate(spec, label, pts, c, quadratic_form(spec, pts, c), reason)
    if not spec.support().is_finite:
        return NoConstruction("support is infinite and no sphere factor has single-parity degrees")
    plateau, history = rank_plateau(spec, seed=seed)
    if plateau is None:
        return NoConstruction(f"numerical rank did not plateau: {history}")
    pts = sample_configuration(spec, plateau + 1, "dc", rng)
    gram = assemble_gram(spec, pts)
    w, v = jacobi_eigh(gram)
    c = v[:, 0]
    return NullCertificate(spec, "finiteness", pts, c, float(c @ gram @ c), reason)


def certificate_from_json(data) -> NullCertificate:
    """Rebuild a certificate and recompute its quadratic form from the stored points."""
    try:
        spec = spec_from_json(data["spec"])
        pts = [(point_from_json(spec.space1, x), point_from_json(spec.space2, w))
               for x, w in data["points"]]
        c = np.asarray(data["c"], dtype=float)
        construction = data["construction"]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"malformed certificate: {exc}") from None
    if c.shape != (len(pts),):
        raise SchemaError("certificate c must have one entry per point")
    return NullCertificate(spec, construction, pts, c, quadratic_form(spec, pts, c), data.get("reason", ""))
