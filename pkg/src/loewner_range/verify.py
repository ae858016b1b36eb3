"""Cross-checks between the closed forms and direct Loewner integration.

Each check returns a :class:`VerifyReport`. ``worst_margin`` is the headroom
of the tightest sample (negative means a failure); ``max_error`` is the
largest observed deviation. Both are filled in whether or not the check
passes. Reports depend only on their inputs and seeds, apart from
``elapsed``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import NumericalFailure
from .loewner import (
    Driver, ExtremalInit, extremal_endpoints, hamiltonian, integrate_costate,
    integrate_driven_endpoints, integrate_extremal, free_time_endpoints,
    random_driver, trial_seed,
)
from .regions import Verdict, build_preimage_region, build_value_region, contains
from .scalar import (
    BranchDirection, Direction, FORWARD_PLUS, ProblemParams, Sign, free_time_modulus,
    sigma_from_radius, solve_radius_forward, solve_radius_inverse, _solve_inverse, OK,
)

__all__ = [
    "VerifyReport", "check_inclusion", "check_extremal_consistency",
    "check_hamiltonian_constancy", "check_duality", "check_free_time", "merge_reports",
    "EXTREMAL_TOL", "HAMILTONIAN_TOL", "MAXIMIZATION_SLACK", "DUALITY_TOL", "FREE_TIME_TOL",
]

EXTREMAL_TOL = 1e-6
HAMILTONIAN_TOL = 1e-6
MAXIMIZATION_SLACK = 1e-12
N_CONTROLS = 360
DUALITY_TOL = 1e-10
FREE_TIME_TOL = 1e-8
FREE_HAMILTONIAN_TOL = 1e-10
KOEBE_TOL = 1e-8


@dataclass
class VerifyReport:
    name: str
    trials: int
    failures: int
    worst_margin: float
    max_error: float
    elapsed: float
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self, timing: bool = True) -> dict:
        doc = {
            "name": self.name,
            "trials": self.trials,
            "failures": self.failures,
            "max_error": self.max_error,
            "worst_margin": self.worst_margin,
        }
        if timing:
            doc["elapsed_ms"] = round(self.elapsed * 1e3, 3)
        doc["details"] = self.details
        return doc


def _signed(m) -> float:
    return -m.margin if m.verdict is Verdict.OUTSIDE else m.margin


def check_inclusion(p: ProblemParams, trials: int, seed: int,
                    d: BranchDirection = FORWARD_PLUS, n_pieces: int = 8,
                    cfg: SolverConfig = DEFAULT_CONFIG) -> VerifyReport:
    """Random piecewise-constant drivers must never land outside the region.

    Inverse trajectories that blow up have left the disc and are skipped.
    Two constant drivers are added whose endpoints must sit on the real-axis
    boundary points; their deviation from the closed form is ``max_error``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    t0 = time.perf_counter()
    z0, T = p.z0, p.T
    forward = d.direction is Direction.FORWARD
    region = build_value_region(p, cfg) if forward else build_preimage_region(p, cfg)
    drivers = [random_driver(trial_seed(seed, i), n_pieces, T) for i in range(trials)]
    ends, blow = integrate_driven_endpoints(z0, drivers, T, d.direction, cfg)
    details, worst, failures = [], math.inf, 0
    for drv, w, tb in zip(drivers, ends, blow):
        if not np.isnan(tb):
            continue
        m = contains(region, w, cfg.boundary_tol)
        worst = min(worst, _signed(m))
        if m.verdict is Verdict.OUTSIDE:
            failures += 1
            details.append({"driver": drv.to_dict(), "endpoint": [w.real, w.imag],
                            "margin": m.margin})

    # constant controls 1 and -1 realise the labels x0 = -1 and x0 = 1 (forward)
    max_err = 0.0
    consts = [Driver.constant(0.0), Driver.constant(math.pi)]
    w_const, b_const = integrate_driven_endpoints(z0, consts, T, d.direction, cfg)
    for drv, w, tb, x0 in zip(consts, w_const, b_const, (-1.0, 1.0) if forward else (1.0, -1.0)):
        if not np.isnan(tb):
            continue
        try:
            r = solve_radius_forward(p, x0, cfg) if forward else solve_radius_inverse(p, x0, cfg)
        except NumericalFailure:
            continue
        err = abs(w - r)
        max_err = max(max_err, err)
        if err > KOEBE_TOL or contains(region, w, cfg.boundary_tol).verdict is not Verdict.BOUNDARY:
            failures += 1
            details.append({"driver": drv.to_dict(), "endpoint": [w.real, w.imag],
                            "expected": r, "error": err})
    return VerifyReport("inclusion", trials + 2, failures, float(worst), float(max_err),
                        time.perf_counter() - t0, details)


def _closed_form(p, x0, d, cfg):
    """Closed-form endpoints; NaN where the inverse root is not resolvable."""
    x0 = np.asarray(x0, dtype=float)
    if d.direction is Direction.FORWARD:
        r = solve_radius_forward(p, x0, cfg)
        s = sigma_from_radius(p.z0, x0, r, Direction.FORWARD)
    else:
        r, u, status = _solve_inverse(p.z0, p.T, x0, cfg)
        s = sigma_from_radius(p.z0, x0, r, Direction.INVERSE, complement=u)
        r = np.where(status == OK, r, np.nan)
    return r * np.exp(1j * d.sign.value * s)


def check_extremal_consistency(p: ProblemParams, x0_grid: Sequence[float],
                               d: BranchDirection = FORWARD_PLUS,
                               cfg: SolverConfig = DEFAULT_CONFIG) -> VerifyReport:
    """Endpoints of integrated extremals against ``r e^{+-i sigma}``.

    For the inverse flow, labels whose closed-form root is too close to 1 to
    resolve, or whose integration reaches the circle, are skipped.
    """
    t0 = time.perf_counter()
    x0 = np.asarray(x0_grid, dtype=float)
    ode, blow = extremal_endpoints(p.z0, x0, p.T, d, cfg)
    exact = _closed_form(p, x0, d, cfg)
    err = np.abs(ode - exact)
    ok = np.isfinite(err) & np.isnan(blow)
    details = [{"x0": float(x), "ode": [o.real, o.imag], "closed_form": [e.real, e.imag],
                "error": float(v)}
               for x, o, e, v, k in zip(x0, ode, exact, err, ok) if k and v >= EXTREMAL_TOL]
    max_err = float(err[ok].max()) if ok.any() else 0.0
    return VerifyReport("extremal", int(ok.sum()), len(details), EXTREMAL_TOL - max_err, max_err,
                        time.perf_counter() - t0, details)


def _drift(h):
    h = np.real(h)
    return float(np.max(np.abs(h - h[0])) / (1.0 + abs(h[0])))


def _max_slack(lam, w, kap, d):
    """Largest amount by which a discretised control beats the optimal one."""
    u = np.exp(2j * np.pi * np.arange(N_CONTROLS) / N_CONTROLS)
    best = hamiltonian(kap, lam, w, d).real
    grid = hamiltonian(u[None, :], lam[:, None], w[:, None], d).real
    return float(np.max(grid.max(axis=1) - best))


def check_hamiltonian_constancy(p: ProblemParams, init: ExtremalInit,
                                d: BranchDirection = FORWARD_PLUS,
                                cfg: SolverConfig = DEFAULT_CONFIG) -> VerifyReport:
    """Constancy of Re H along the extremal, plus pointwise maximisation.

    Drift is measured on the reduced system and on the full costate system.
    Maximisation is tested at every accepted step of the costate system
    against equispaced controls on the circle.
    """
    t0 = time.perf_counter()
    red = integrate_extremal(p.z0, init, p.T, d, cfg)
    cos = integrate_costate(p.z0, init, p.T, d, cfg)
    drift = max(_drift(red.aux["hamiltonian"]), _drift(cos.aux["hamiltonian"]))
    slack = _max_slack(cos.aux["lambda"], cos.points, cos.aux["kappa"], d)
    details = []
    if drift >= HAMILTONIAN_TOL:
        details.append({"x0": init.x0, "beta": init.beta, "drift": drift})
    if slack > MAXIMIZATION_SLACK:
        details.append({"x0": init.x0, "beta": init.beta, "slack": slack})
    return VerifyReport("hamiltonian", len(cos.times), len(details), -slack, drift,
                        time.perf_counter() - t0, details)


def check_duality(z0: float, T: float, cfg: SolverConfig = DEFAULT_CONFIG) -> VerifyReport:
    """Forward then inverse along the real axis must return to ``z0``.

    The forward label ``x0`` pairs with the inverse label ``-x0``.
    """
    t0 = time.perf_counter()
    p = ProblemParams(z0, T)
    details, max_err = [], 0.0
    for x0 in (1.0, -1.0):
        r = solve_radius_forward(p, x0, cfg)
        back = solve_radius_inverse(ProblemParams(r, T), -x0, cfg)
        err = abs(back - z0)
        max_err = max(max_err, err)
        if err >= DUALITY_TOL:
            details.append({"x0": x0, "forward": r, "back": back, "error": err})
    return VerifyReport("duality", 2, len(details), DUALITY_TOL - max_err, max_err,
                        time.perf_counter() - t0, details)


def check_free_time(z0: float, t_grid: Sequence[float],
                    cfg: SolverConfig = DEFAULT_CONFIG) -> VerifyReport:
    """The explicit modulus formula against the zero-Hamiltonian extremal.

    Also checks that the formula returns ``z0`` exactly at ``t = 0``, that it
    increases along the grid, and that Re H vanishes along the extremal.
    """
    t0 = time.perf_counter()
    ts = np.sort(np.asarray(t_grid, dtype=float))
    details = []
    ends, ham = free_time_endpoints(z0, ts, cfg)
    exact = free_time_modulus(z0, ts)
    errs = np.abs(np.abs(ends) - exact)
    max_err = float(errs.max()) if errs.size else 0.0
    max_h = float(np.abs(ham).max()) if ham.size else 0.0
    for t, o, e, v in zip(ts, ends, exact, errs):
        if v >= FREE_TIME_TOL:
            details.append({"t": float(t), "ode": abs(o), "formula": float(e), "error": float(v)})
    if free_time_modulus(z0, 0.0) != z0:
        details.append({"t": 0.0, "formula": free_time_modulus(z0, 0.0), "expected": z0})
    values = free_time_modulus(z0, ts)
    if np.any(np.diff(values) <= 0) or np.any(values >= 1.0):
        details.append({"monotone": False, "values": values.tolist()})
    if max_h >= FREE_HAMILTONIAN_TOL:
        details.append({"hamiltonian": max_h})
    return VerifyReport("freetime", len(ts), len(details), FREE_TIME_TOL - max_err, max_err,
                        time.perf_counter() - t0, details)


def merge_reports(name: str, reports: Sequence[VerifyReport]) -> VerifyReport:
    """Aggregate reports by sums and extremes; the order of ``reports`` does
    not affect anything except the order of ``details``."""
    return VerifyReport(
        name,
        sum(r.trials for r in reports),
        sum(r.failures for r in reports),
        min((r.worst_margin for r in reports), default=math.inf),
        max((r.max_error for r in reports), default=0.0),
        sum(r.elapsed for r in reports),
        [d for r in reports for d in r.details],
    )
