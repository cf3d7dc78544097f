"""Numeric defaults shared by the library and the CLI.

Every CLI flag that tunes numerics overrides one of these fields; nothing
else in the package hard-codes a tolerance.
"""
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Defaults:
    # series
    series_tol: float = 1e-12
    series_max_terms: int = 10_000
    poisson_dps: int = 50
    # kernel expansions
    truncation: int = 60
    family_amplitude: float = 1.0
    family_ratio: float = 0.5
    # coefficient recovery: order = max(k, l) + extra, doubled up to max_doublings times
    quadrature_extra: int = 10
    quadrature_doublings: int = 2
    quadrature_tol: float = 1e-11
    # eigen-solver / rank
    eig_tol: float = 1e-12
    eig_max_sweeps: int = 100
    rank_tol: float = 1e-9
    # sampling
    distinct_tol: float = 1e-9
    sampling_retries: int = 100
    rank_plateau_max_points: int = 256


DEFAULTS = Defaults()


def with_overrides(**changes):
    """Copy of :data:`DEFAULTS` with the non-``None`` entries of ``changes`` applied."""
    return replace(DEFAULTS, **{k: v for k, v in changes.items() if v is not None})
