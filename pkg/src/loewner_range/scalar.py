"""Closed-form scalar machinery behind the extremal boundary curves.

Along an extremal trajectory of the radial Loewner equation the modulus
``|w(t)|`` is the inverse of a monotone logarithmic potential evaluated on
a straight line in ``t``:

* forward flow (value sets ``V_T``)::

      psi(y) = (A + B) log(1 - y) - B log(y) + (B - A) log(1 + y)
      psi(r) = B*T + psi(z0)

* inverse flow (preimage sets ``W_T``)::

      theta(y) = (H - G) log(1 - y) - H log(y) + (G + H) log(1 + y)
      theta(r) = theta(z0) - H*T

with ``x0 = cos(beta)`` labelling the extremal. Everything here accepts
either Python floats or numpy arrays for ``x0`` and returns the same kind.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import DomainError, NoRoot, NumericalFailure, RootNearOne

__all__ = [
    "Direction", "Sign", "BranchDirection", "FORWARD_PLUS", "INVERSE_PLUS", "ProblemParams",
    "ForwardCoefficients", "InverseCoefficients",
    "coeffs_forward", "coeffs_inverse", "psi", "theta", "psi_prime", "theta_prime",
    "solve_radius_forward", "solve_radius_inverse",
    "sigma_forward", "sigma_inverse", "sigma_from_radius",
    "theta_complement", "free_time_modulus", "t_star", "hyp_dist", "arctanh", "x_along", "forward_sigma_argmax",
]

# Bisection stops once the bracket is this narrow; Newton polishes the rest.
BISECT_WIDTH = 1e-14
LOG2 = math.log(2.0)
MAX_NEWTON = 5


class Direction(Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


class Sign(Enum):
    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class BranchDirection:
    """Which family (V_T or W_T) and which conjugate branch of a curve."""

    direction: Direction = Direction.FORWARD
    sign: Sign = Sign.PLUS

    @property
    def forward(self) -> bool:
        return self.direction is Direction.FORWARD


FORWARD_PLUS = BranchDirection(Direction.FORWARD, Sign.PLUS)
INVERSE_PLUS = BranchDirection(Direction.INVERSE, Sign.PLUS)


def _check_z0(z0):
    if not (isinstance(z0, (int, float, np.floating)) and 0.0 < z0 < 1.0):
        raise DomainError(f"z0 must lie in (0, 1), got {z0!r}")


def _check_x0(x0):
    a = np.asarray(x0, dtype=float)
    if not np.all(np.isfinite(a)) or np.any(a < -1.0) or np.any(a > 1.0):
        raise DomainError("x0 must lie in [-1, 1]")


@dataclass(frozen=True)
class ProblemParams:
    """Base point ``z0`` in (0, 1) and time ``T >= 0`` (so ``f'(0) = exp(-T)``)."""

    z0: float
    T: float

    def __post_init__(self):
        _check_z0(self.z0)
        if not (math.isfinite(self.T) and self.T >= 0.0):
            raise DomainError(f"T must be finite and >= 0, got {self.T!r}")


@dataclass(frozen=True)
class ForwardCoefficients:
    """``A = x0 - 2 z0 + x0 z0**2`` and ``B = 1 - 2 x0 z0 + z0**2``.

    ``total`` and ``gap`` hold ``A + B`` and ``B - A`` in their factored
    forms ``(1 + x0)(1 - z0)**2`` and ``(1 - x0)(1 + z0)**2`` so that they
    vanish exactly at ``x0 = -1`` and ``x0 = 1``.
    """

    A: float
    B: float
    total: float
    gap: float


@dataclass(frozen=True)
class InverseCoefficients:
    """``G = x0 + 2 z0 + x0 z0**2`` and ``H = 1 + 2 x0 z0 + z0**2``.

    ``gap = H - G = (1 - x0)(1 - z0)**2``, ``total = G + H = (1 + x0)(1 + z0)**2``.
    """

    G: float
    H: float
    gap: float
    total: float


def coeffs_forward(z0, x0) -> ForwardCoefficients:
    _check_z0(z0)
    _check_x0(x0)
    return _coeffs_forward(z0, x0)


def _coeffs_forward(z0, x0):
    A = x0 - 2.0 * z0 + x0 * z0 * z0
    B = 1.0 - 2.0 * x0 * z0 + z0 * z0
    return ForwardCoefficients(A, B, (1.0 + x0) * (1.0 - z0) ** 2, (1.0 - x0) * (1.0 + z0) ** 2)


def coeffs_inverse(z0, x0) -> InverseCoefficients:
    _check_z0(z0)
    _check_x0(x0)
    return _coeffs_inverse(z0, x0)


def _coeffs_inverse(z0, x0):
    G = x0 + 2.0 * z0 + x0 * z0 * z0
    H = 1.0 + 2.0 * x0 * z0 + z0 * z0
    return InverseCoefficients(G, H, (1.0 - x0) * (1.0 - z0) ** 2, (1.0 + x0) * (1.0 + z0) ** 2)


def _check_open_unit(y):
    a = np.asarray(y, dtype=float)
    if np.any(~(a > 0.0)) or np.any(~(a < 1.0)):
        raise DomainError("argument must lie in the open interval (0, 1)")


def _psi(y, c):
    return c.total * np.log1p(-y) - c.B * np.log(y) + c.gap * np.log1p(y)


def _theta(y, c):
    return c.gap * np.log1p(-y) - c.H * np.log(y) + c.total * np.log1p(y)


def psi(y, c: ForwardCoefficients):
    """Forward potential; strictly decreasing on (0, 1) with ``psi(0+) = +inf``."""
    _check_open_unit(y)
    return _psi(y, c)


def theta(y, c: InverseCoefficients):
    """Inverse potential; strictly decreasing on (0, 1) with ``theta(0+) = +inf``."""
    _check_open_unit(y)
    return _theta(y, c)


def psi_prime(y, c: ForwardCoefficients):
    # closed form of d(psi)/dy
    return -(c.B * (1.0 + y * y) + 2.0 * c.A * y) / (y * (1.0 - y * y))


def theta_prime(y, c: InverseCoefficients):
    return -(c.H * (1.0 + y * y) - 2.0 * c.G * y) / (y * (1.0 - y * y))


def arctanh(r):
    """``arctanh`` via ``log1p`` for accuracy near 1."""
    return 0.5 * (np.log1p(r) - np.log1p(-r))


def hyp_dist(r):
    """Hyperbolic distance ``2 arctanh r`` from 0 to a point of modulus ``r``."""
    a = np.asarray(r, dtype=float)
    if np.any(~(a >= 0.0)) or np.any(~(a < 1.0)):
        raise DomainError("hyp_dist needs 0 <= r < 1")
    out = 2.0 * arctanh(a)
    return float(out) if np.ndim(r) == 0 else out


def free_time_modulus(z0: float, t):
    """Modulus at time ``t`` of the inverse extremal with zero Hamiltonian.

    Solves ``|w| / (1 - |w|^2) = e^t z0 / (1 - z0^2)``. Written around
    ``expm1(2t)`` so that ``t = 0`` returns ``z0`` exactly.
    """
    _check_z0(z0)
    t = np.asarray(t, dtype=float)
    s = z0 * z0
    a = 1.0 + s
    e = np.expm1(2.0 * t)
    out = z0 * np.exp(t) / (1.0 + 2.0 * s * e / (np.sqrt(a * a + 4.0 * s * e) + a))
    return float(out) if out.ndim == 0 else out


def t_star(z0: float) -> float:
    """First time at which the inverse boundary curves reach the unit circle."""
    _check_z0(z0)
    return math.log((1.0 + z0) ** 2 / (4.0 * z0))


def _newton_bisect(f, fprime, target, lo, hi, tol, geometric=False):
    """Root of a decreasing ``f`` with ``f(lo) >= target >= f(hi)`` (elementwise).

    ``geometric`` bisects in log space down to a relative width, for
    unknowns that may be many orders of magnitude below 1.
    """
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(400):
        if geometric:
            open_ = hi - lo > BISECT_WIDTH * np.minimum(lo, 1.0)
        else:
            open_ = hi - lo > BISECT_WIDTH
        if not open_.any():
            break
        mid = np.sqrt(lo * hi) if geometric else 0.5 * (lo + hi)
        right = f(mid) > target
        lo = np.where(open_ & right, mid, lo)
        hi = np.where(open_ & ~right, mid, hi)
    else:
        raise NumericalFailure("bisection did not reach the requested width")
    r = 0.5 * (lo + hi)
    for _ in range(MAX_NEWTON):
        res = f(r) - target
        if np.all(np.abs(res) <= tol):
            break
        step = res / fprime(r)
        r = np.clip(r - np.where(np.isfinite(step), step, 0.0), lo, hi)
    return r


def _as_output(x0, r):
    return float(np.asarray(r).reshape(-1)[0]) if np.ndim(x0) == 0 else r


def _solve_forward(z0, T, x0, cfg):
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    if T == 0.0:
        return np.full_like(x, z0)
    c = _coeffs_forward(z0, x)
    f = lambda y: _psi(y, c)
    target = c.B * T + _psi(np.full_like(x, z0), c)
    hi = np.full_like(x, z0)
    lo = np.full_like(x, 0.5 * z0)
    for _ in range(1100):
        short = f(lo) < target
        if not short.any():
            break
        lo = np.where(short, 0.5 * lo, lo)
    else:
        raise NumericalFailure("could not bracket the forward radius")
    if np.any(lo <= 0.0):
        raise NumericalFailure("forward radius underflows double precision")
    r = _newton_bisect(f, lambda y: psi_prime(y, c), target, lo, hi, cfg.tol_root)
    return r


def solve_radius_forward(p: ProblemParams, x0, cfg: SolverConfig = DEFAULT_CONFIG):
    """Modulus ``r(T, x0)`` of the forward extremal endpoint, in ``(0, z0]``."""
    _check_x0(x0)
    return _as_output(x0, _solve_forward(p.z0, p.T, x0, cfg))


# status codes of _solve_inverse
OK, NEAR_ONE, NO_ROOT = 0, 1, 2


def _theta_c(u, c):
    return c.gap * np.log(u) - c.H * np.log1p(-u) + c.total * (LOG2 + np.log1p(-0.5 * u))


def _theta_c_prime(u, c):
    return c.gap / u + c.H / (1.0 - u) - c.total / (2.0 - u)


def theta_complement(u, c: InverseCoefficients):
    """``theta(1 - u)`` evaluated without forming ``1 - u``.

    Near the unit circle the inverse root is only representable to full
    relative precision through its distance ``u`` to 1.
    """
    _check_open_unit(u)
    return _theta_c(u, c)


def _solve_inverse(z0, T, x0, cfg):
    """Inverse radii ``r``, their complements ``u = 1 - r`` and a status array.

    Status is OK, NEAR_ONE or NO_ROOT; unresolved entries hold ``nan``.
    Roots above 1/2 are found in the ``u`` variable.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    status = np.zeros(x.shape, dtype=int)
    if T == 0.0:
        return np.full_like(x, z0), np.full_like(x, 1.0 - z0), status
    c = _coeffs_inverse(z0, x)
    target = _theta(np.full_like(x, z0), c) - c.H * T
    beyond = _theta_c(np.full_like(x, cfg.near_one), c) > target
    if beyond.any():
        no_root = beyond & (x == 1.0) & (T >= t_star(z0))
        status[beyond] = NEAR_ONE
        status[no_root] = NO_ROOT
    r = np.full_like(x, np.nan)
    u = np.full_like(x, np.nan)
    low = ~beyond & (z0 < 0.5) & (_theta(np.full_like(x, 0.5), c) <= target)
    if low.any():
        cs = _coeffs_inverse(z0, x[low])
        rl = _newton_bisect(
            lambda y: _theta(y, cs), lambda y: theta_prime(y, cs), target[low],
            np.full(cs.H.shape, z0), np.full(cs.H.shape, 0.5), cfg.tol_root,
        )
        r[low] = rl
        u[low] = 1.0 - rl
    high = ~beyond & ~low
    if high.any():
        cs = _coeffs_inverse(z0, x[high])
        # theta(1 - u) increases with u
        ul = _newton_bisect(
            lambda v: -_theta_c(v, cs), lambda v: -_theta_c_prime(v, cs), -target[high],
            np.full(cs.H.shape, cfg.near_one), np.full(cs.H.shape, min(0.5, 1.0 - z0)),
            cfg.tol_root, geometric=True,
        )
        u[high] = ul
        r[high] = 1.0 - ul
    return r, u, status


def solve_radius_inverse(p: ProblemParams, x0, cfg: SolverConfig = DEFAULT_CONFIG,
                         complement: bool = False):
    """Modulus ``r(T, x0)`` of the inverse extremal endpoint, in ``[z0, 1)``.

    With ``complement=True`` returns ``1 - r`` instead, accurate to full
    relative precision even when ``r`` rounds towards 1.

    Raises ``NoRoot`` for ``x0 = 1`` once ``T >= T*`` and ``RootNearOne``
    when the root exceeds ``1 - cfg.near_one``.
    """
    _check_x0(x0)
    r, u, status = _solve_inverse(p.z0, p.T, x0, cfg)
    if np.any(status == NO_ROOT):
        raise NoRoot(f"no inverse radius below 1 at x0 = 1 for T = {p.T} >= T* = {t_star(p.z0)}")
    if np.any(status == NEAR_ONE):
        raise RootNearOne(
            f"inverse radius exceeds 1 - {cfg.near_one} (z0={p.z0}, T={p.T})",
            estimate=1.0 - cfg.near_one,
        )
    return _as_output(x0, u if complement else r)


def sigma_from_radius(z0, x0, r, direction: Direction, complement=None):
    """Argument of the extremal endpoint given its modulus ``r``.

    For the inverse family ``complement = 1 - r`` may be passed to keep
    ``arctanh r`` accurate when ``r`` is within a few ulps of 1.
    """
    x = np.asarray(x0, dtype=float)
    root = np.sqrt((1.0 - x) * (1.0 + x))
    if direction is Direction.FORWARD:
        denom = 1.0 - 2.0 * x * z0 + z0 * z0
        span = arctanh(z0) - arctanh(r)
    else:
        denom = 1.0 + 2.0 * x * z0 + z0 * z0
        if complement is None:
            atr = arctanh(r)
        else:
            u = np.asarray(complement, dtype=float)
            atr = 0.5 * (LOG2 + np.log1p(-0.5 * u) - np.log(u))
        span = atr - arctanh(z0)
    s = 2.0 * (1.0 - z0 * z0) * root / denom * span
    # sqrt(1 - x0^2) vanishes exactly at the endpoints
    s = np.where(np.abs(x) == 1.0, 0.0, s)
    return float(s) if np.ndim(s) == 0 and np.ndim(x0) == 0 else s


def sigma_forward(p: ProblemParams, x0, cfg: SolverConfig = DEFAULT_CONFIG):
    r = solve_radius_forward(p, x0, cfg)
    return sigma_from_radius(p.z0, x0, r, Direction.FORWARD)


def sigma_inverse(p: ProblemParams, x0, cfg: SolverConfig = DEFAULT_CONFIG):
    u = solve_radius_inverse(p, x0, cfg, complement=True)
    return sigma_from_radius(p.z0, x0, 1.0 - u, Direction.INVERSE, complement=u)


def x_along(w_mod, z0, x0, d: BranchDirection = FORWARD_PLUS):
    """Value of ``x = cos(arg lambda + arg w)`` once the extremal has modulus ``w_mod``."""
    q = 1.0 + w_mod * w_mod
    if d.direction is Direction.FORWARD:
        c = _coeffs_forward(z0, x0)
        return (q * c.A + 2.0 * w_mod * c.B) / (q * c.B + 2.0 * w_mod * c.A)
    c = _coeffs_inverse(z0, x0)
    return (q * c.G - 2.0 * w_mod * c.H) / (q * c.H - 2.0 * w_mod * c.G)


def forward_sigma_argmax(p: ProblemParams, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """The unique ``x*`` in [-1, 1] at which the forward ``sigma(T, .)`` peaks.

    There the extremal ends with ``x(T) = 0``, i.e. ``r = -A / (B + sqrt(B^2 - A^2))``;
    the gap between that value and ``r(T, x0)`` is strictly decreasing in x0.
    """
    z0, T = p.z0, p.T

    def gap(x):
        c = _coeffs_forward(z0, x)
        disc = np.sqrt(np.maximum(c.total * c.gap, 0.0))  # B^2 - A^2
        return -c.A / (c.B + disc) - _solve_forward(z0, T, x, cfg)

    lo, hi = -1.0, 1.0
    g_lo = float(gap(lo)[0])
    if g_lo <= 0.0:
        return lo
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if float(gap(mid)[0]) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
