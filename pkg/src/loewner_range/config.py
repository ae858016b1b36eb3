"""Solver configuration passed explicitly to builders, integrators and checks."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class SolverConfig:
    """Numerical tolerances and discretisation sizes.

    Attributes
    ----------
    tol_root : float
        Target residual of the potential equation after Newton polishing.
    n_curve : int
        Number of Chebyshev nodes used to sample a boundary curve.
    boundary_tol : float
        Width of the band around a boundary polyline classified as ``Boundary``.
    h_max : float
        Largest RK4 step used by the Loewner integrators.
    blowup_eps : float
        Inverse trajectories stop once ``|w| > 1 - blowup_eps``.
    seed : int
        Master seed for random drivers.
    step_c : float
        Step-control constant; steps shrink near the unit circle.
    step_kappa : float
        Steps are also kept below ``step_kappa / |d(w p)/dw|``, the inverse
        local rate of the vector field, which grows like ``|k - w|^-2`` near
        the control ``k``.
    near_one : float
        Inverse radii above ``1 - near_one`` are not resolved (``RootNearOne``).
    chord_tol : float
        Polylines are refined until the curve deviates from every chord by
        less than this.
    """

    tol_root: float = 1e-12
    n_curve: int = 1024
    boundary_tol: float = 1e-6
    h_max: float = 1e-3
    blowup_eps: float = 1e-9
    seed: int = 0
    step_c: float = 0.1
    step_kappa: float = 0.005
    near_one: float = 1e-12
    chord_tol: float = 1e-7

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "seed":
                if value < 0:
                    raise ValueError("seed must be non-negative")
            elif not value > 0:
                raise ValueError(f"{f.name} must be positive, got {value!r}")
        if self.n_curve < 16:
            raise ValueError("n_curve must be at least 16")

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)


DEFAULT_CONFIG = SolverConfig()
