"""Direct integration of the radial Loewner equation.

The forward flow ``dw/dt = -w (k + w)/(k - w)`` with ``|k| = 1`` contracts
the disc. The inverse flow has the opposite sign and may reach the unit
circle in finite time, which is reported as a blow-up rather than raised.

Two kinds of control are supported:

* piecewise-constant drivers (:class:`Driver`), used as test controls;
* the optimal feedback control of the extremal problem, integrated either in
  the reduced real variables ``(|w|, psi, arg w, log|lambda|)`` with
  ``psi = arg(lambda) + arg(w)``, or in the full complex ``(w, lambda)`` pair.

All integrators are classical RK4 with per-trajectory step control and work
on batches: every array operation acts on all live trajectories at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import DomainError, StepUnderflow
from .scalar import BranchDirection, Direction, FORWARD_PLUS, Sign, _check_z0

__all__ = [
    "Driver", "ExtremalInit", "Trajectory",
    "herglotz_point", "optimal_kappa", "hamiltonian",
    "integrate_radial", "integrate_inverse", "integrate_driven_endpoints",
    "integrate_extremal", "extremal_endpoints", "integrate_costate", "integrate_free_time",
    "free_time_endpoints",
    "free_time_x0", "random_driver", "trial_seed",
]

# Inverse flows whose step control asks for less than this are a fraction of
# MIN_STEP away from reaching the circle and are reported as blown up.
MIN_STEP = 1e-14
BISECT_ITERS = 60
TWO_PI = 2.0 * math.pi


# --- types -----------------------------------------------------------------

@dataclass(frozen=True)
class Driver:
    """Piecewise-constant control ``k(t) = exp(i * angles[j])`` on
    ``[breakpoints[j], breakpoints[j + 1])``; the last piece runs to ``T``."""

    breakpoints: tuple
    angles: tuple
    seed: Optional[int] = None

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        angs = tuple(float(a) for a in self.angles)
        if not bps or len(bps) != len(angs):
            raise DomainError("need one angle per breakpoint")
        if bps[0] != 0.0:
            raise DomainError("breakpoints must start at 0")
        if any(b1 < b0 for b0, b1 in zip(bps, bps[1:])):
            raise DomainError("breakpoints must be ascending")
        if not all(math.isfinite(a) for a in angs) or not all(math.isfinite(b) for b in bps):
            raise DomainError("driver values must be finite")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "angles", angs)

    @classmethod
    def constant(cls, angle: float) -> "Driver":
        return cls((0.0,), (angle,))

    @property
    def n_pieces(self) -> int:
        return len(self.angles)

    def kappa(self, t: float) -> complex:
        j = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return complex(np.exp(1j * self.angles[max(j, 0)]))

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "angles": list(self.angles),
                "seed": self.seed}

    @classmethod
    def from_dict(cls, doc: dict) -> "Driver":
        return cls(tuple(doc["breakpoints"]), tuple(doc["angles"]), doc.get("seed"))


@dataclass(frozen=True)
class ExtremalInit:
    """Initial costate ``lambda(0) = exp(i beta)`` with ``x0 = cos(beta)``.

    ``Sign.PLUS`` is the branch ending at positive argument, which needs
    ``sin(beta) <= 0``.
    """

    x0: float
    beta: float
    branch: Sign = Sign.PLUS

    def __post_init__(self):
        if not -1.0 <= self.x0 <= 1.0:
            raise DomainError(f"x0 must lie in [-1, 1], got {self.x0!r}")
        if not 0.0 <= self.beta < TWO_PI:
            raise DomainError(f"beta must lie in [0, 2pi), got {self.beta!r}")
        if abs(math.cos(self.beta) - self.x0) > 1e-12:
            raise DomainError("x0 must equal cos(beta)")
        s = math.sin(self.beta)
        if abs(s) > 1e-15 and (s < 0) != (self.branch is Sign.PLUS):
            raise DomainError("branch inconsistent with the sign of sin(beta)")

    @classmethod
    def from_x0(cls, x0: float, branch: Sign = Sign.PLUS) -> "ExtremalInit":
        x0 = float(x0)
        if not -1.0 <= x0 <= 1.0:
            raise DomainError(f"x0 must lie in [-1, 1], got {x0!r}")
        beta = math.acos(x0)
        if branch is Sign.PLUS:
            beta = (TWO_PI - beta) % TWO_PI
        return cls(x0, beta, branch)

    @property
    def lambda0(self) -> complex:
        return complex(math.cos(self.beta), math.sin(self.beta))


@dataclass(frozen=True)
class Trajectory:
    """Sampled trajectory. ``blow_up`` is the exit time of an inverse flow."""

    times: np.ndarray
    points: np.ndarray
    blow_up: Optional[float] = None
    aux: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("times", "points"):
            a = np.array(getattr(self, name))
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        if self.aux is not None:
            frozen = {}
            for k, v in self.aux.items():
                a = np.array(v)
                a.flags.writeable = False
                frozen[k] = a
            object.__setattr__(self, "aux", frozen)

    @property
    def endpoint(self) -> complex:
        return complex(self.points[-1])


# --- pointwise formulas ----------------------------------------------------

def herglotz_point(kappa, w):
    """``(k + w)/(k - w)``, which has positive real part for ``|w| < 1``."""
    return (kappa + w) / (kappa - w)


def optimal_kappa(lam, w):
    """Control on the unit circle maximising ``Re(-lam * w * p_k(w))``."""
    lam = np.asarray(lam, dtype=complex)
    w = np.asarray(w, dtype=complex)
    a = np.abs(lam)
    c = np.conj(lam * w)
    den = a * np.abs(w) ** 2 - c
    if np.any(den == 0):
        raise DomainError("optimal_kappa needs lam != 0 and 0 < |w| < 1")
    k = w * (a - c) / den
    return complex(k) if k.ndim == 0 else k


def hamiltonian(kappa, lam, w, d: BranchDirection = FORWARD_PLUS):
    """``-lam * w * p`` for the forward flow, ``+lam * w * p`` for the inverse."""
    s = -1.0 if d.direction is Direction.FORWARD else 1.0
    return s * lam * w * herglotz_point(kappa, w)


def _dlogp(kappa, w):
    # d(w p)/dw: the Jacobian of the flow and the costate rate
    return (kappa * kappa + 2 * kappa * w - w * w) / (kappa - w) ** 2


# --- RK4 machinery ---------------------------------------------------------

def _rk4(f: Callable, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _step_size(rho, rate, t, t_end, cfg, speed=None):
    """RK4 step for the current state.

    ``rate`` is ``|d(w p)/dw|``, the local Lipschitz rate of the flow, which
    blows up like ``|k - w|^-2`` near the control. Forward flows add the cap
    ``step_c (1 - |w|^2)``; inverse flows that approach the circle pass their
    radial ``speed`` and are capped at ``step_c (1 - |w|) / speed``.
    """
    with np.errstate(divide="ignore"):
        h = np.minimum(cfg.h_max, cfg.step_kappa / rate)
        if speed is None:
            h = np.minimum(h, cfg.step_c * (1.0 - rho * rho))
        else:
            h = np.minimum(h, cfg.step_c * (1.0 - rho) / np.abs(speed))
    remaining = t_end - t
    last = h >= remaining
    return np.where(last, remaining, h), last


def _bisect_exit(advance, h, limit):
    """Bracket ``(lo, hi)`` on the fraction of ``h`` at which ``advance``
    first exceeds ``limit``; ``lo`` is still inside."""
    lo, hi = 0.0, float(h)
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        r = advance(mid)
        if np.isfinite(r) and r <= limit:
            lo = mid
        else:
            hi = mid
    return lo, hi


# --- driven flows ----------------------------------------------------------

def _pack_drivers(drivers: Sequence[Driver], T: float):
    P = max(d.n_pieces for d in drivers)
    m = len(drivers)
    ends = np.full((m, P), float(T))
    angles = np.zeros((m, P))
    for i, d in enumerate(drivers):
        n = d.n_pieces
        ends[i, : n - 1] = np.minimum(d.breakpoints[1:], T)
        angles[i, :n] = d.angles
    return ends, np.exp(1j * angles)


def _driven(z0, drivers, T, direction, cfg, record=False):
    s = -1.0 if direction is Direction.FORWARD else 1.0
    ends, kappas = _pack_drivers(drivers, T)
    m, P = ends.shape
    rows = np.arange(m)
    w = np.full(m, complex(z0))
    t = np.zeros(m)
    piece = np.zeros(m, dtype=int)
    done = np.zeros(m, dtype=bool)
    blow = np.full(m, np.nan)
    limit = 1.0 - cfg.blowup_eps
    hist_t, hist_w = [0.0], [complex(z0)]

    def settle():
        while True:
            moved = ~done & (t >= ends[rows, piece])
            if not moved.any():
                return
            piece[moved] += 1
            finished = piece >= P
            done[finished] = True
            piece[finished] = P - 1

    if T > 0:
        settle()
    else:
        done[:] = True
    while not done.all():
        idx = np.flatnonzero(~done)
        k = kappas[idx, piece[idx]]
        wi, ti, te = w[idx], t[idx], ends[idx, piece[idx]]
        h, last = _step_size(np.abs(wi), np.abs(_dlogp(k, wi)), ti, te, cfg,
                             None if s < 0 else 0.0)
        f = lambda y: s * y * (k + y) / (k - y)
        stalled = (h < MIN_STEP) & ~last
        if stalled.any():
            if s < 0:
                raise StepUnderflow(f"step {h[stalled].min():.3g} at t={ti[stalled][0]:.6g}")
            # the circle is nearer than one minimal step
            j = idx[stalled]
            blow[j], done[j] = ti[stalled], True
        wn = _rk4(f, wi, h)
        out = ~stalled & (~np.isfinite(wn) | (np.abs(wn) > limit))
        for a in np.flatnonzero(out):
            ka, wa = k[a], wi[a]
            g = lambda y: s * y * (ka + y) / (ka - y)
            lo, hi = _bisect_exit(lambda hh: abs(_rk4(g, wa, hh)), h[a], limit)
            blow[idx[a]] = ti[a] + hi
            done[idx[a]] = True
            w[idx[a]] = _rk4(g, wa, lo)
            if record and idx[a] == 0:
                hist_t.append(float(blow[0]))
                hist_w.append(complex(w[0]))
        ok = ~stalled & ~out
        j = idx[ok]
        w[j] = wn[ok]
        t[j] = np.where(last[ok], te[ok], ti[ok] + h[ok])
        if record and ok[0]:
            hist_t.append(float(t[0]))
            hist_w.append(complex(w[0]))
        settle()
    return w, blow, (np.array(hist_t), np.array(hist_w))


def integrate_driven_endpoints(z0: float, drivers: Sequence[Driver], T: float,
                               direction: Direction = Direction.FORWARD,
                               cfg: SolverConfig = DEFAULT_CONFIG):
    """Batch endpoints for many drivers at once.

    Returns ``(endpoints, t_max)``; ``t_max`` is NaN where no blow-up happened.
    """
    _check_z0(z0)
    if T < 0:
        raise DomainError("T must be non-negative")
    w, blow, _ = _driven(z0, list(drivers), T, direction, cfg)
    return w, blow


def _single(z0, drv, T, direction, cfg):
    _check_z0(z0)
    if T < 0:
        raise DomainError("T must be non-negative")
    _, blow, (ts, ws) = _driven(z0, [drv], T, direction, cfg, record=True)
    t_max = None if np.isnan(blow[0]) else float(blow[0])
    return Trajectory(ts, ws, t_max)


def integrate_radial(z0: float, drv: Driver, T: float,
                     cfg: SolverConfig = DEFAULT_CONFIG) -> Trajectory:
    """RK4 solution of ``dw/dt = -w (k + w)/(k - w)``, ``w(0) = z0``."""
    return _single(z0, drv, T, Direction.FORWARD, cfg)


def integrate_inverse(z0: float, drv: Driver, T: float,
                      cfg: SolverConfig = DEFAULT_CONFIG) -> Trajectory:
    """RK4 solution of ``dw/dt = +w (k + w)/(k - w)``.

    Stops at ``|w| > 1 - blowup_eps`` and reports the exit time in
    ``blow_up``; the last recorded point is the last accepted step.
    """
    return _single(z0, drv, T, Direction.INVERSE, cfg)


# --- optimal control: reduced real system ----------------------------------

def _reduced_rhs(forward: bool):
    def f(y):
        rho, psi = y[0], y[1]
        c = np.cos(psi)
        # keep the real-axis extremals (cos psi = +-1) exactly real
        sn = np.where(np.abs(c) == 1.0, 0.0, np.sin(psi))
        den = 1.0 - rho * rho
        if forward:
            drho = -rho * (1.0 + rho * rho - 2.0 * rho * c) / den
            dpsi = -2.0 * sn * drho / den
            e = -np.exp(-1j * psi)
        else:
            drho = rho * (1.0 + rho * rho + 2.0 * rho * c) / den
            dpsi = 2.0 * sn * drho / den
            e = np.exp(-1j * psi)
        dtheta = -2.0 * rho * sn / den
        q = _reduced_q(rho, e)
        dell = q.real if forward else -q.real
        return np.array([drho, dpsi, dtheta, dell])
    return f


def _reduced_q(rho, e):
    """``d(w p)/dw`` in the frame ``arg w = 0``, with ``e = exp(i phi)`` the
    phase that places the optimal control."""
    den = 1.0 - rho * rho
    return ((1 + rho * rho + 2 * rho * e) ** 2 - 2 * rho * rho * (e + rho) ** 2) / (den * den)


def _reduced_rate(rho, psi, forward):
    e = -np.exp(-1j * psi) if forward else np.exp(-1j * psi)
    return np.abs(_reduced_q(rho, e))


def _reduced_h(y, forward):
    rho, psi, _, ell = y
    m = (1 + rho * rho) / (1 - rho * rho)
    r = 2 * rho / (1 - rho * rho)
    x = np.cos(psi)
    scale = np.exp(ell) * rho
    return scale * (r - m * x) if forward else scale * (m * x + r)


def _extremal_batch(z0, beta, T, direction, cfg, record=False):
    forward = direction is Direction.FORWARD
    f = _reduced_rhs(forward)
    beta, T = np.broadcast_arrays(np.atleast_1d(np.asarray(beta, dtype=float)),
                                  np.asarray(T, dtype=float))
    m = beta.size
    y = np.zeros((4, m))
    y[0], y[1] = z0, beta
    t = np.zeros(m)
    done = T <= 0
    blow = np.full(m, np.nan)
    limit = 1.0 - cfg.blowup_eps
    hist = [(0.0, y[:, 0].copy())]
    while not done.all():
        idx = np.flatnonzero(~done)
        yi, ti = y[:, idx], t[idx]
        speed = None if forward else f(yi)[0]
        h, last = _step_size(yi[0], _reduced_rate(yi[0], yi[1], forward), ti, T[idx], cfg, speed)
        stalled = (h < MIN_STEP) & ~last
        if stalled.any():
            if forward:
                raise StepUnderflow("extremal step below time resolution")
            blow[idx[stalled]], done[idx[stalled]] = ti[stalled], True
        yn = _rk4(f, yi, h)
        out = ~stalled & (~np.isfinite(yn[0]) | (yn[0] > limit))
        if forward and out.any():
            raise StepUnderflow("forward extremal left the disc")
        for a in np.flatnonzero(out):
            ya = yi[:, a:a + 1]
            lo, hi = _bisect_exit(lambda hh: _rk4(f, ya, hh)[0, 0], h[a], limit)
            blow[idx[a]], done[idx[a]] = ti[a] + hi, True
            y[:, idx[a]] = _rk4(f, ya, lo)[:, 0]
            if record and idx[a] == 0:
                hist.append((float(blow[0]), y[:, 0].copy()))
        ok = ~stalled & ~out
        j = idx[ok]
        y[:, j] = yn[:, ok]
        t[j] = np.where(last[ok], T[j], ti[ok] + h[ok])
        done[j] |= last[ok]
        if record and ok[0]:
            hist.append((float(t[0]), y[:, 0].copy()))
    return y, blow, hist


def extremal_endpoints(z0: float, x0, T: float, d: BranchDirection = FORWARD_PLUS,
                       cfg: SolverConfig = DEFAULT_CONFIG):
    """Batch endpoints of the extremals labelled by ``x0`` on the branch ``d.sign``.

    Returns ``(points, t_max)`` with NaN in ``t_max`` where no blow-up occurred.
    """
    _check_z0(z0)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    beta = np.arccos(np.clip(x0, -1.0, 1.0))
    if d.sign is Sign.PLUS:
        beta = -beta
    y, blow, _ = _extremal_batch(z0, beta, T, d.direction, cfg)
    return y[0] * np.exp(1j * y[2]), blow


def integrate_extremal(z0: float, init: ExtremalInit, T: float,
                       d: BranchDirection = FORWARD_PLUS,
                       cfg: SolverConfig = DEFAULT_CONFIG) -> Trajectory:
    """Extremal trajectory under the optimal feedback control.

    Only ``d.direction`` is used; the branch comes from ``init``. The aux
    record holds ``x``, ``abs_lambda``, ``arg_lambda`` and ``hamiltonian``
    (the real part, which the maximum principle keeps constant).
    """
    _check_z0(z0)
    if T < 0:
        raise DomainError("T must be non-negative")
    y, blow, hist = _extremal_batch(z0, init.beta, T, d.direction, cfg, record=True)
    times = np.array([h[0] for h in hist])
    ys = np.array([h[1] for h in hist]).T
    forward = d.direction is Direction.FORWARD
    aux = {
        "x": np.cos(ys[1]),
        "abs_lambda": np.exp(ys[3]),
        "arg_lambda": ys[1] - ys[2],
        "hamiltonian": _reduced_h(ys, forward),
    }
    t_max = None if np.isnan(blow[0]) else float(blow[0])
    return Trajectory(times, ys[0] * np.exp(1j * ys[2]), t_max, aux)


def free_time_x0(z0: float) -> float:
    """Label of the inverse extremal with vanishing Hamiltonian."""
    return -2.0 * z0 / (1.0 + z0 * z0)


def free_time_endpoints(z0: float, times, cfg: SolverConfig = DEFAULT_CONFIG):
    """Batch endpoints of the zero-Hamiltonian extremal at each of ``times``.

    Returns ``(points, hamiltonian)`` with Re H evaluated at each endpoint.
    """
    _check_z0(z0)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    beta = ExtremalInit.from_x0(free_time_x0(z0), Sign.PLUS).beta
    y, _, _ = _extremal_batch(z0, beta, times, Direction.INVERSE, cfg)
    return y[0] * np.exp(1j * y[2]), _reduced_h(y, forward=False)


def integrate_free_time(z0: float, T: float, cfg: SolverConfig = DEFAULT_CONFIG) -> Trajectory:
    """Inverse extremal along which ``x = -2|w|/(1 + |w|^2)`` throughout."""
    init = ExtremalInit.from_x0(free_time_x0(z0), Sign.PLUS)
    return integrate_extremal(z0, init, T, BranchDirection(Direction.INVERSE, Sign.PLUS), cfg)


# --- optimal control: full complex costate ---------------------------------

def integrate_costate(z0: float, init: ExtremalInit, T: float,
                      d: BranchDirection = FORWARD_PLUS,
                      cfg: SolverConfig = DEFAULT_CONFIG) -> Trajectory:
    """Integrate ``(w, lambda)`` with the control re-optimised at every stage.

    Slower and less well conditioned than :func:`integrate_extremal`; used to
    test pointwise maximisation. aux carries ``lambda`` and ``kappa`` per step.
    """
    _check_z0(z0)
    forward = d.direction is Direction.FORWARD
    s = -1.0 if forward else 1.0

    def control(w, lam):
        return optimal_kappa(lam if forward else -lam, w)

    def f(y):
        w, lam = y
        k = control(w, lam)
        return np.array([s * w * herglotz_point(k, w), -s * lam * _dlogp(k, w)])

    y = np.array([complex(z0), init.lambda0])
    t = 0.0
    ts, ys = [0.0], [y.copy()]
    limit = 1.0 - cfg.blowup_eps
    t_max = None
    while t < T:
        k = control(y[0], y[1])
        h, last = _step_size(abs(y[0]), abs(_dlogp(k, y[0])), t, T, cfg,
                             None if forward else 0.0)
        h, last = float(h), bool(last)
        if h < MIN_STEP:
            if forward:
                raise StepUnderflow("costate step below time resolution")
            t_max = t
            break
        yn = _rk4(f, y, h)
        if not np.all(np.isfinite(yn)) or abs(yn[0]) > limit:
            if forward:
                raise StepUnderflow("forward costate trajectory left the disc")
            lo, hi = _bisect_exit(lambda hh: abs(_rk4(f, y, hh)[0]), h, limit)
            t_max = t + hi
            ts.append(t_max)
            ys.append(_rk4(f, y, lo))
            break
        y = yn
        t = T if last else t + h
        ts.append(t)
        ys.append(y.copy())
    ys = np.array(ys)
    lam = ys[:, 1]
    kap = control(ys[:, 0], lam)
    aux = {
        "lambda": lam,
        "kappa": kap,
        "hamiltonian": hamiltonian(kap, lam, ys[:, 0], d),
    }
    return Trajectory(np.array(ts), ys[:, 0], t_max, aux)


# --- random controls -------------------------------------------------------

def random_driver(seed: int, n_pieces: int, T: float) -> Driver:
    """Sorted uniform breakpoints on ``[0, T]`` and uniform angles."""
    if n_pieces < 1:
        raise DomainError("n_pieces must be at least 1")
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.uniform(0.0, T, n_pieces - 1))
    angles = rng.uniform(0.0, TWO_PI, n_pieces)
    return Driver((0.0, *cuts.tolist()), tuple(angles.tolist()), seed)


def trial_seed(master: int, i: int) -> int:
    """Independent per-trial seed mixed from the master seed and trial index."""
    return int(np.random.SeedSequence((master, i)).generate_state(1, np.uint64)[0])
