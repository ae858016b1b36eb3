"""CSV, JSON and SVG output. Every file is written atomically."""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .loewner import Trajectory
from .regions import CurvePoint, Region

CURVE_HEADER = "x0,r,sigma,re,im"
TRAJECTORY_HEADER = "t,re,im"


def fmt(v: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return f"{float(v):.17g}"


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def curve_csv(points: Iterable[CurvePoint]) -> str:
    rows = [CURVE_HEADER]
    for p in points:
        rows.append(",".join(fmt(v) for v in (p.x0, p.r, p.sigma, p.point.real, p.point.imag)))
    return "\n".join(rows) + "\n"


def trajectory_csv(tr: Trajectory) -> str:
    rows = [TRAJECTORY_HEADER]
    for t, w in zip(tr.times, tr.points):
        rows.append(f"{fmt(t)},{fmt(w.real)},{fmt(w.imag)}")
    return "\n".join(rows) + "\n"


def _pairs(a: Optional[np.ndarray]):
    if a is None:
        return None
    return [[float(z.real), float(z.imag)] for z in a]


def region_document(reg: Region) -> dict:
    return {
        "family": reg.family.value,
        "z0": reg.z0,
        "T": reg.T,
        "case": reg.case.value,
        "outer": _pairs(reg.outer),
        "inner": _pairs(reg.inner),
        "circle_arc": None if reg.circle_arc is None else [float(a) for a in reg.circle_arc],
        "markers": {k: float(reg.markers[k]) for k in sorted(reg.markers)},
    }


def dumps(doc) -> str:
    return json.dumps(doc, allow_nan=False) + "\n"


# --- SVG --------------------------------------------------------------------

_SCALE = 200.0  # pixels per unit; the viewBox below assumes this


def _xy(z: complex):
    return f"{fmt(_SCALE * z.real)},{fmt(-_SCALE * z.imag)}"


def _path(points: np.ndarray, colour: str, width: float = 1.0) -> str:
    d = " ".join(_xy(z) for z in points)
    return (f'<polygon points="{d}" fill="none" stroke="{colour}" '
            f'stroke-width="{width}" vector-effect="non-scaling-stroke"/>')


def region_svg(reg: Region, marker_points: Optional[dict] = None) -> str:
    """Unit circle, boundary polylines and labelled marker points."""
    s = _SCALE
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-220 -220 440 440" width="440" height="440">',
        f'<title>{reg.family.value} z0={fmt(reg.z0)} T={reg.T if reg.T is None else fmt(reg.T)} '
        f'{reg.case.value}</title>',
        f'<circle cx="0" cy="0" r="{s}" fill="none" stroke="#999" stroke-dasharray="4 3"/>',
        '<line x1="-210" y1="0" x2="210" y2="0" stroke="#ddd"/>',
        _path(reg.outer, "#1f4e9c", 1.5),
    ]
    if reg.inner is not None:
        parts.append(_path(reg.inner, "#b03a2e", 1.5))
    parts.append(f'<circle cx="{fmt(s * reg.z0)}" cy="0" r="2.5" fill="black"/>')
    for name, z in sorted((marker_points or {}).items()):
        parts.append(f'<circle cx="{fmt(s * z.real)}" cy="{fmt(-s * z.imag)}" r="3" fill="#2e7d32"/>')
        parts.append(f'<text x="{fmt(s * z.real + 4)}" y="{fmt(-s * z.imag - 4)}" '
                     f'font-size="12" font-family="serif">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_label(name: str) -> str:
    return {"chi": "χ", "aleph": "ℵ", "x_star": "x*"}.get(name, name)


def finite_or_none(v) -> Optional[float]:
    return None if v is None or not math.isfinite(v) else float(v)
