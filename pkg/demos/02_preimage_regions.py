"""
Preimages and the unit circle
=============================

The reverse question: which points w can satisfy f(w) = z0? As T grows the
region W_T(z0) of such points moves outward, first touches the unit circle
at T* = log((1 + z0)^2 / (4 z0)), and later wraps all the way around.

    python demos/02_preimage_regions.py
"""
from pathlib import Path

from loewner_range import Driver, ProblemParams, build_preimage_region, integrate_inverse, t_star
from loewner_range import io

out = Path("demo_output")
out.mkdir(exist_ok=True)
z0 = 0.4
ts = t_star(z0)
print(f"T* for z0={z0}: {ts:.6f}")

# %%
# The four snapshots of the classical picture.
for T in (0.15, ts, 0.3, 3.0):
    reg = build_preimage_region(ProblemParams(z0, T))
    extra = ""
    if "sigma_limit" in reg.markers:
        extra = f" arc half-width {reg.markers['sigma_limit']:.4f}"
    if "chi" in reg.markers:
        extra = f" chi={reg.markers['chi']:.6f}"
    print(f"W_{T:.4f}({z0}): {reg.case.value}{extra}")
    io.atomic_write(out / f"w04_T{T:.4f}.svg", io.region_svg(reg))

# %%
# Why T*? Run the inverse Loewner flow with the constant control 1. The
# point travels along the positive axis and leaves the disc exactly at T*.
tr = integrate_inverse(z0, Driver.constant(0.0), 0.5)
print(f"inverse flow with control 1 exits at t={tr.blow_up:.12f} (T*={ts:.12f})")
