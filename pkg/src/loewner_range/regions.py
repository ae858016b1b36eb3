"""Value regions V_T, preimage regions W_T and the free-time region.

The boundary of each region is assembled from the extremal curves
``x0 -> r(T, x0) exp(+-i sigma(T, x0))``. How the two conjugate branches
close up depends on whether (and where) ``sigma`` reaches ``pi``:

=====================  ==========================================================
case                   boundary
=====================  ==========================================================
Point                  ``{z0}`` (T = 0)
SimplyConnected        both branches over the full parameter range
DoublyConnected        outer loop over ``[chi, 1]``, inner loop over ``[-1, aleph]``
TouchesCircleArc       branches truncated near the circle plus an arc through +1
CircleWithInnerBoundary  unit circle outside, loop over ``[-1, chi]`` inside
=====================  ==========================================================

Membership is answered by even-odd ray casting on the polylines. Polylines
are refined until no chord is further than ``cfg.chord_tol`` from the curve,
so a band of width ``boundary_tol`` around them covers the true boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import DomainError, NumericalFailure, Unsupported
from .scalar import (
    OK, BranchDirection, Direction, ProblemParams, Sign, _check_z0, _solve_forward,
    _solve_inverse, arctanh, forward_sigma_argmax, hyp_dist, sigma_from_radius, t_star,
)

__all__ = [
    "Family", "Case", "Verdict", "CurvePoint", "Region", "Membership",
    "sample_curve", "find_sigma_pi_crossings", "build_value_region",
    "build_preimage_region", "build_free_preimage_region", "contains",
    "contains_free_exact", "chebyshev_grid",
]

CROSSING_TOL = 1e-12
FREE_BOUNDARY_TOL = 1e-12
# angular spacing used when a piece of the unit circle is written out as a polyline
ARC_STEP = 1e-3
MAX_REFINE_PASSES = 40


class Family(Enum):
    VALUE_FORWARD = "ValueForward"
    VALUE_INVERSE = "ValueInverse"
    FREE_INVERSE = "FreeInverse"


class Case(Enum):
    POINT = "Point"
    SIMPLY_CONNECTED = "SimplyConnected"
    DOUBLY_CONNECTED = "DoublyConnected"
    TOUCHES_CIRCLE_ARC = "TouchesCircleArc"
    CIRCLE_WITH_INNER_BOUNDARY = "CircleWithInnerBoundary"


class Verdict(Enum):
    INSIDE = "Inside"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class CurvePoint:
    x0: float
    r: float
    sigma: float
    point: complex


@dataclass(frozen=True)
class Membership:
    verdict: Verdict
    margin: float


def _frozen(a):
    if a is None:
        return None
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Region:
    """A closed region described by its boundary polylines.

    ``outer`` and ``inner`` are closed polylines (the last vertex connects
    back to the first). Where the boundary runs along the unit circle, the
    arc is also recorded analytically as ``circle_arc = (a0, a1)`` and the
    corresponding vertices of ``outer`` are flagged in ``arc_vertices``.
    Those vertices lie on the circumscribed polygon, up to ``1/cos(ARC_STEP/2)``
    from 0, so that the polyline contains the closed region.
    """

    family: Family
    case: Case
    z0: float
    T: Optional[float]
    outer: np.ndarray
    inner: Optional[np.ndarray] = None
    circle_arc: Optional[tuple] = None
    markers: dict = field(default_factory=dict)
    arc_vertices: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "outer", _frozen(self.outer))
        object.__setattr__(self, "inner", _frozen(self.inner))
        if self.arc_vertices is not None:
            mask = np.array(self.arc_vertices, dtype=bool)
            mask.setflags(write=False)
            object.__setattr__(self, "arc_vertices", mask)

    @property
    def params(self) -> Optional[ProblemParams]:
        return None if self.T is None else ProblemParams(self.z0, self.T)


def chebyshev_grid(n: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """``n`` ascending Chebyshev-Lobatto nodes on ``[a, b]``, endpoints included."""
    k = np.arange(n)
    x = a + (b - a) * 0.5 * (1.0 - np.cos(np.pi * k / (n - 1)))
    x[0], x[-1] = a, b
    return x


def _branch(z0, T, x, direction, cfg=DEFAULT_CONFIG):
    """Modulus, argument and complex point of the plus branch at parameters ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if direction is Direction.FORWARD:
        r = _solve_forward(z0, T, x, cfg)
        s = sigma_from_radius(z0, x, r, direction)
    else:
        r, u, status = _solve_inverse(z0, T, x, cfg)
        if np.any(status != OK):
            raise NumericalFailure("inverse curve sampled beyond its resolvable range")
        s = sigma_from_radius(z0, x, r, direction, complement=u)
    return r, s, r * np.exp(1j * s)


def _segment_distance(p, a, b):
    ab = b - a
    ap = p - a
    denom = (ab * ab.conjugate()).real
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(denom > 0, (ap * ab.conjugate()).real / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.abs(ap - t * ab)


def _refine(x, w, evaluate, tol):
    """Insert parameter midpoints until every chord is within ``tol`` of the curve."""
    for _ in range(MAX_REFINE_PASSES):
        xm = 0.5 * (x[:-1] + x[1:])
        wm = evaluate(xm)
        need = _segment_distance(wm, w[:-1], w[1:]) > tol
        need &= (xm > x[:-1]) & (xm < x[1:])
        if not need.any():
            break
        idx = np.nonzero(need)[0] + 1
        x = np.insert(x, idx, xm[need])
        w = np.insert(w, idx, wm[need])
    return x, w


def _curve(z0, T, a, b, direction, cfg):
    """Refined plus-branch polyline over ``x0 in [a, b]`` (ascending)."""
    x = chebyshev_grid(cfg.n_curve, a, b)
    w = _branch(z0, T, x, direction, cfg)[2]
    return _refine(x, w, lambda xs: _branch(z0, T, xs, direction, cfg)[2], cfg.chord_tol)


def _close(upper):
    """Closed polyline: the plus branch followed by its mirrored interior points."""
    return np.concatenate([upper, np.conj(upper[-2:0:-1])])


def _inverse_extent(z0, T, cfg):
    """Largest ``x0`` up to which the inverse radius stays below ``1 - near_one``.

    Returns ``(x_end, truncated)``; ``truncated`` is False when the whole
    range ``[-1, 1]`` resolves (the ``T < T*`` situation).
    """
    status = lambda x: int(_solve_inverse(z0, T, np.array([x]), cfg)[2][0])
    if status(1.0) == OK:
        return 1.0, False
    if status(-1.0) != OK:
        raise NumericalFailure(f"inverse curve is unresolvable in double precision (T={T})")
    lo, hi = -1.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if status(mid) == OK:
            lo = mid
        else:
            hi = mid
    return lo, True


def sample_curve(p: ProblemParams, d: BranchDirection, n: int,
                 cfg: SolverConfig = DEFAULT_CONFIG) -> list:
    """``n`` boundary samples on a Chebyshev grid in ``x0``.

    For the inverse family with ``T >= T*`` the grid ends at the largest
    ``x0`` whose radius is still resolvable instead of at 1.
    """
    if n < 16:
        raise DomainError("sample_curve needs n >= 16")
    b = 1.0
    if d.direction is Direction.INVERSE:
        b, _ = _inverse_extent(p.z0, p.T, cfg)
    x = chebyshev_grid(n, -1.0, b)
    r, s, _ = _branch(p.z0, p.T, x, d.direction, cfg)
    sign = d.sign.value
    return [CurvePoint(float(xi), float(ri), float(si), complex(ri * np.exp(1j * sign * si)))
            for xi, ri, si in zip(x, r, s)]


def _sigma_at(z0, T, x, direction):
    return float(_branch(z0, T, x, direction)[1][0])


def _bisect_pi(z0, T, lo, hi, direction):
    """Root of ``sigma - pi`` on ``[lo, hi]`` given opposite signs at the ends."""
    s_lo = _sigma_at(z0, T, lo, direction) - math.pi
    while hi - lo > CROSSING_TOL:
        mid = 0.5 * (lo + hi)
        s_mid = _sigma_at(z0, T, mid, direction) - math.pi
        if (s_mid > 0) == (s_lo > 0):
            lo, s_lo = mid, s_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_sigma_pi_crossings(p: ProblemParams, d: BranchDirection,
                            cfg: SolverConfig = DEFAULT_CONFIG) -> list:
    """All ``x0`` in (-1, 1) with ``sigma(T, x0) = pi``, ascending.

    Forward ``sigma`` rises to a single maximum at ``x*`` and falls again,
    so the roots are bracketed on either side of ``x*``. The inverse
    ``sigma`` is scanned on the sampling grid (up to the resolvable end)
    and each sign change is bisected.
    """
    z0, T = p.z0, p.T
    if T == 0.0:
        return []
    if d.direction is Direction.FORWARD:
        xs = forward_sigma_argmax(p, cfg)
        if _sigma_at(z0, T, xs, Direction.FORWARD) <= math.pi:
            return []
        return [_bisect_pi(z0, T, -1.0, xs, Direction.FORWARD),
                _bisect_pi(z0, T, xs, 1.0, Direction.FORWARD)]
    b, _ = _inverse_extent(z0, T, cfg)
    x = chebyshev_grid(cfg.n_curve, -1.0, b)
    above = _branch(z0, T, x, Direction.INVERSE, cfg)[1] > math.pi
    flips = np.nonzero(above[1:] != above[:-1])[0]
    return [_bisect_pi(z0, T, x[i], x[i + 1], Direction.INVERSE) for i in flips]


def _point_region(family, z0):
    return Region(family, Case.POINT, z0, 0.0, outer=np.array([z0 + 0j]))


def build_value_region(p: ProblemParams, cfg: SolverConfig = DEFAULT_CONFIG) -> Region:
    """The value set ``V_T(z0) = {f(z0)}`` over normalised univalent self-maps."""
    z0, T = p.z0, p.T
    if T == 0.0:
        return _point_region(Family.VALUE_FORWARD, z0)
    x_star = forward_sigma_argmax(p, cfg)
    sigma_max = _sigma_at(z0, T, x_star, Direction.FORWARD)
    markers = {"x_star": x_star, "sigma_max": sigma_max}
    if sigma_max > 2.0 * math.pi:
        raise Unsupported(
            f"sigma reaches {sigma_max:.6g} > 2*pi for z0={z0}, T={T}; "
            "the boundary is not described by two crossings"
        )
    if sigma_max <= math.pi:
        _, w = _curve(z0, T, -1.0, 1.0, Direction.FORWARD, cfg)
        return Region(Family.VALUE_FORWARD, Case.SIMPLY_CONNECTED, z0, T,
                      outer=_close(w), markers=markers)
    aleph, chi = find_sigma_pi_crossings(p, BranchDirection(Direction.FORWARD), cfg)
    _, w_out = _curve(z0, T, chi, 1.0, Direction.FORWARD, cfg)
    _, w_in = _curve(z0, T, -1.0, aleph, Direction.FORWARD, cfg)
    # the crossing points sit on the negative real axis
    w_out[0] = -abs(w_out[0])
    w_in[-1] = -abs(w_in[-1])
    markers.update(chi=chi, aleph=aleph)
    return Region(Family.VALUE_FORWARD, Case.DOUBLY_CONNECTED, z0, T,
                  outer=_close(w_out), inner=_close(w_in), markers=markers)


def _unit_circle(step=ARC_STEP):
    m = int(math.ceil(2.0 * math.pi / step))
    return np.exp(1j * np.linspace(-math.pi, math.pi, m, endpoint=False))


def build_preimage_region(p: ProblemParams, cfg: SolverConfig = DEFAULT_CONFIG) -> Region:
    """The closure of ``W_T(z0) = {f^{-1}(z0)}``; the open set is this minus the circle."""
    z0, T = p.z0, p.T
    if T == 0.0:
        return _point_region(Family.VALUE_INVERSE, z0)
    inv = BranchDirection(Direction.INVERSE)
    x_end, truncated = _inverse_extent(z0, T, cfg)
    roots = find_sigma_pi_crossings(p, inv, cfg)
    markers = {"t_star": t_star(z0)}
    if not truncated and T < t_star(z0):
        if roots:
            raise NumericalFailure("sigma reached pi before the curves touched the circle")
        _, w = _curve(z0, T, -1.0, 1.0, Direction.INVERSE, cfg)
        return Region(Family.VALUE_INVERSE, Case.SIMPLY_CONNECTED, z0, T,
                      outer=_close(w), markers=markers)
    markers["x_end"] = x_end
    if roots:
        chi = roots[0]
        _, w_in = _curve(z0, T, -1.0, chi, Direction.INVERSE, cfg)
        w_in[-1] = -abs(w_in[-1])
        markers["chi"] = float(chi)
        return Region(Family.VALUE_INVERSE, Case.CIRCLE_WITH_INNER_BOUNDARY, z0, T,
                      outer=_unit_circle(), inner=_close(w_in),
                      circle_arc=(-math.pi, math.pi), markers=markers)
    _, w = _curve(z0, T, -1.0, x_end, Direction.INVERSE, cfg)
    s_end = _sigma_at(z0, T, x_end, Direction.INVERSE)
    markers["sigma_limit"] = s_end
    if s_end == 0.0:
        # at T = T* itself the arc degenerates to the single point 1
        w[-1] = 1.0
        outer = _close(w)
        mask = np.zeros(outer.size, dtype=bool)
        mask[w.size - 1] = True
    else:
        # circumscribed vertices: the chords touch the circle from outside and
        # so never cut the curves, which end within 1e-12 of it
        m = max(2, int(math.ceil(2.0 * s_end / ARC_STEP)) + 1)
        half = s_end / (m - 1)
        arc = np.exp(1j * np.linspace(s_end, -s_end, m)) / math.cos(half)
        outer = np.concatenate([w, arc, np.conj(w[:0:-1])])
        mask = np.zeros(outer.size, dtype=bool)
        mask[w.size:w.size + m] = True
    return Region(Family.VALUE_INVERSE, Case.TOUCHES_CIRCLE_ARC, z0, T, outer=outer,
                  circle_arc=(-s_end, s_end), markers=markers, arc_vertices=mask)


def build_free_preimage_region(z0: float, cfg: SolverConfig = DEFAULT_CONFIG) -> Region:
    """``{f^{-1}(z0)}`` over all times: the disc minus the hyperbolic-spiral cap.

    The inner boundary consists of the spirals ``r(s) exp(+-i s)``,
    ``r(s) = tanh(arctanh z0 + s/2)``, for ``s in [0, pi]``.
    """
    _check_z0(z0)
    spiral = lambda s: np.tanh(arctanh(z0) + 0.5 * s) * np.exp(1j * s)
    s = np.linspace(0.0, math.pi, cfg.n_curve)
    s, w = _refine(s, spiral(s), spiral, cfg.chord_tol)
    w[0] = z0
    w[-1] = -abs(w[-1])
    return Region(Family.FREE_INVERSE, Case.CIRCLE_WITH_INNER_BOUNDARY, z0, None,
                  outer=_unit_circle(), inner=_close(w), circle_arc=(-math.pi, math.pi),
                  markers={"spiral_end_radius": float(abs(w[-1]))})


def _inside(poly, pt):
    a = poly
    b = np.roll(poly, -1)
    ay, by = a.imag, b.imag
    straddle = (ay > pt.imag) != (by > pt.imag)
    with np.errstate(invalid="ignore", divide="ignore"):
        x_cross = a.real + (pt.imag - ay) * (b.real - a.real) / (by - ay)
    return bool(np.count_nonzero(straddle & (pt.real < x_cross)) % 2)


def _poly_distance(poly, pt, skip=None):
    a = poly
    b = np.roll(poly, -1)
    d = _segment_distance(pt, a, b)
    if skip is not None:
        d = d[~skip]
    return float(d.min()) if d.size else math.inf


def _arc_distance(pt, a0, a1):
    ang = math.atan2(pt.imag, pt.real)
    if a0 <= ang <= a1:
        return 1.0 - abs(pt)
    return min(abs(pt - complex(math.cos(a0), math.sin(a0))),
               abs(pt - complex(math.cos(a1), math.sin(a1))))


def _verdict(inside, margin, tol):
    if margin <= tol:
        return Membership(Verdict.BOUNDARY, margin)
    return Membership(Verdict.INSIDE if inside else Verdict.OUTSIDE, margin)


def contains(reg: Region, pt: complex, boundary_tol: float = DEFAULT_CONFIG.boundary_tol) -> Membership:
    """Classify ``pt`` as inside, on (within ``boundary_tol``) or outside ``reg``.

    A ``Point`` region reports ``Inside`` when ``|pt - z0| <= boundary_tol``.
    The free-time family uses the exact inequality instead of polylines.
    """
    pt = complex(pt)
    if not abs(pt) < 1.0:
        raise DomainError("membership queries need |pt| < 1")
    if reg.family is Family.FREE_INVERSE:
        return contains_free_exact(reg.z0, pt)
    case = reg.case
    if case is Case.POINT:
        gap = abs(pt - reg.z0)
        return Membership(Verdict.INSIDE if gap <= boundary_tol else Verdict.OUTSIDE, gap)
    if case is Case.SIMPLY_CONNECTED:
        return _verdict(_inside(reg.outer, pt), _poly_distance(reg.outer, pt), boundary_tol)
    if case is Case.DOUBLY_CONNECTED:
        inside = _inside(reg.outer, pt) and not _inside(reg.inner, pt)
        margin = min(_poly_distance(reg.outer, pt), _poly_distance(reg.inner, pt))
        return _verdict(inside, margin, boundary_tol)
    if case is Case.CIRCLE_WITH_INNER_BOUNDARY:
        margin = min(_poly_distance(reg.inner, pt), 1.0 - abs(pt))
        return _verdict(not _inside(reg.inner, pt), margin, boundary_tol)
    # TouchesCircleArc: arc chords lie outside the disc, so distances to them
    # are replaced by the distance to the exact arc
    mask = reg.arc_vertices
    arc_edges = mask & np.roll(mask, -1)
    margin = min(_poly_distance(reg.outer, pt, skip=arc_edges), _arc_distance(pt, *reg.circle_arc))
    return _verdict(_inside(reg.outer, pt), margin, boundary_tol)


def contains_free_exact(z0: float, pt: complex) -> Membership:
    """Exact membership in the free-time preimage region.

    ``pt`` belongs to it iff ``d(0, |pt|) >= |arg pt| + d(0, z0)`` with the
    hyperbolic distance ``d``. The margin is the gap between the two sides.
    """
    _check_z0(z0)
    pt = complex(pt)
    if not abs(pt) < 1.0:
        raise DomainError("membership queries need |pt| < 1")
    ang = abs(math.atan2(pt.imag, pt.real)) if pt != 0 else 0.0
    gap = hyp_dist(abs(pt)) - ang - hyp_dist(z0)
    if abs(gap) <= FREE_BOUNDARY_TOL:
        return Membership(Verdict.BOUNDARY, abs(gap))
    return Membership(Verdict.INSIDE if gap > 0 else Verdict.OUTSIDE, abs(gap))
