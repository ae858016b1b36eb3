"""
Where can f(z0) go?
===================

For a univalent self-map f of the unit disc with f(0) = 0 and f'(0) = exp(-T),
the possible values f(z0) fill a closed region V_T(z0). Its boundary is traced
by two mirror-image curves labelled by x0 in [-1, 1].

Run from the repository root::

    python demos/01_value_regions.py

SVG pictures are written to ``demo_output/``.
"""
from pathlib import Path

import numpy as np

from loewner_range import ProblemParams, build_value_region, sample_curve
from loewner_range import io
from loewner_range.scalar import FORWARD_PLUS

out = Path("demo_output")
out.mkdir(exist_ok=True)

# %%
# A moderate base point. Below z0 = tanh(pi/2) the boundary angle can never
# reach pi, so every region in this family is simply connected.
for T in (0.2, 0.7, 1.2, 1.7, 2.2, 3.5):
    reg = build_value_region(ProblemParams(0.65, T))
    print(f"V_{T}(0.65): {reg.case.value:16s} max angle {reg.markers['sigma_max']:.4f}")
    io.atomic_write(out / f"v065_T{T}.svg", io.region_svg(reg))

# %%
# The curve itself: radius and angle along the label x0.
pts = sample_curve(ProblemParams(0.65, 1.2), FORWARD_PLUS, 17)
for p in pts[::2]:
    print(f"  x0={p.x0:+.3f}  r={p.r:.6f}  sigma={p.sigma:.6f}")

# %%
# Close to the boundary of the disc the curves wrap past the negative real
# axis. They cross it at two labels, aleph < chi, and the region becomes an
# annulus-like set that no longer contains the origin's neighbourhood.
reg = build_value_region(ProblemParams(0.95, 3.5))
m = reg.markers
print(f"V_3.5(0.95): {reg.case.value}, aleph={m['aleph']:.6f}, chi={m['chi']:.6f}, "
      f"x*={m['x_star']:.6f}")
print(f"  outer vertices {reg.outer.size}, inner vertices {reg.inner.size}, "
      f"inner radius range [{np.abs(reg.inner).min():.4f}, {np.abs(reg.inner).max():.4f}]")
io.atomic_write(out / "v095_T3.5.svg", io.region_svg(reg))
