"""Independent high-precision reference values.

Everything here is written directly from the implicit radius equations in
their "(1 + x0)(1 - z0)^2 log(1 - r) + ..." form and solved with mpmath, so
it shares no code with the double-precision solvers under test.
"""
import mpmath as mp

mp.mp.dps = 60


def _lhs_forward(r, z0, x0):
    return ((1 + x0) * (1 - z0) ** 2 * mp.log(1 - r)
            + (1 - x0) * (1 + z0) ** 2 * mp.log(1 + r)
            - (1 - 2 * x0 * z0 + z0 ** 2) * mp.log(r))


def _lhs_inverse(r, z0, x0):
    return ((1 - x0) * (1 - z0) ** 2 * mp.log(1 - r)
            + (1 + x0) * (1 + z0) ** 2 * mp.log(1 + r)
            - (1 + 2 * x0 * z0 + z0 ** 2) * mp.log(r))


def _bisect(f, lo, hi, iters=400):
    flo = f(lo)
    for _ in range(iters):
        mid = (lo + hi) / 2
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def radius_forward(z0, T, x0):
    z0, T, x0 = mp.mpf(z0), mp.mpf(T), mp.mpf(x0)
    rhs = (_lhs_forward(z0, z0, x0)
           + (1 - 2 * x0 * z0 + z0 ** 2) * T)
    return _bisect(lambda r: _lhs_forward(r, z0, x0) - rhs, mp.mpf("1e-50"), z0)


def radius_inverse(z0, T, x0):
    """Returns (r, 1 - r) to working precision."""
    z0, T, x0 = mp.mpf(z0), mp.mpf(T), mp.mpf(x0)
    rhs = _lhs_inverse(z0, z0, x0) - (1 + 2 * x0 * z0 + z0 ** 2) * T
    g = lambda u: _lhs_inverse(1 - u, z0, x0) - rhs
    u = _bisect(g, mp.mpf("1e-200"), 1 - z0, iters=1200)
    return 1 - u, u


def sigma_forward(z0, T, x0):
    z0, x0 = mp.mpf(z0), mp.mpf(x0)
    r = radius_forward(z0, T, x0)
    return (2 * (1 - z0 ** 2) * mp.sqrt(1 - x0 ** 2) / (1 - 2 * x0 * z0 + z0 ** 2)
            * (mp.atanh(z0) - mp.atanh(r)))


def sigma_inverse(z0, T, x0):
    z0, x0 = mp.mpf(z0), mp.mpf(x0)
    r, u = radius_inverse(z0, T, x0)
    atanh_r = (mp.log(2 - u) - mp.log(u)) / 2
    return (2 * (1 - z0 ** 2) * mp.sqrt(1 - x0 ** 2) / (1 + 2 * x0 * z0 + z0 ** 2)
            * (atanh_r - mp.atanh(z0)))


def koebe_minus(k):
    """Root in (0, 1) of r / (1 - r)^2 = k."""
    k = mp.mpf(k)
    return ((2 * k + 1) - mp.sqrt(4 * k + 1)) / (2 * k)


def koebe_plus(k):
    """Root in (0, 1) of r / (1 + r)^2 = k, for 0 < k <= 1/4."""
    k = mp.mpf(k)
    return ((1 - 2 * k) - mp.sqrt(1 - 4 * k)) / (2 * k)


def free_time_modulus(z0, t):
    z0, t = mp.mpf(z0), mp.mpf(t)
    return (-1 + z0 ** 2 + mp.sqrt((1 - z0 ** 2) ** 2 + 4 * z0 ** 2 * mp.e ** (2 * t))) / (2 * mp.e ** t * z0)


def constant_driver_flow(z0, angle, t, sign=-1):
    """Exact Loewner flow under a constant control ``exp(i angle)``.

    ``k w / (k + w)^2`` is multiplied by ``exp(sign * t)``; ``sign = -1`` is
    the forward flow. Each step solves a quadratic whose roots have product
    ``k^2``, so exactly one lies in the disc (or both on the circle).
    """
    k = mp.expj(mp.mpf(angle))
    z0 = mp.mpc(z0)
    c = k * z0 / (k + z0) ** 2 * mp.e ** (sign * mp.mpf(t))
    # c w^2 + (2 c k - k) w + c k^2 = 0
    disc = mp.sqrt((2 * c * k - k) ** 2 - 4 * c * c * k * k)
    roots = [(-(2 * c * k - k) + s * disc) / (2 * c) for s in (1, -1)]
    return min(roots, key=lambda w: abs(w))


def piecewise_flow(z0, breakpoints, angles, T, sign=-1):
    w = mp.mpc(z0)
    ends = list(breakpoints[1:]) + [T]
    for a, b, ang in zip(breakpoints, ends, angles):
        if b > a:
            w = constant_driver_flow(w, ang, mp.mpf(b) - mp.mpf(a), sign)
    return w
