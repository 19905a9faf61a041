"""Felli-Schneider and DGZ boundary curves in the ``(a, b)`` plane, as CSV or SVG."""

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateParams
from .params import critical_a, dgz_curve, fs_curve

VIEW_W, VIEW_H = 640, 480
_MARGIN = 50


@dataclass(frozen=True)
class RegionRow:
    a: float
    b_fs: float
    b_dgz: Optional[float]


def region_rows(d, a_min, a_max, steps):
    """Both curves sampled at ``steps`` equally spaced values of ``a``."""
    if d < 3:
        raise DegenerateParams("regions need d >= 3")
    if steps < 2 or not a_min < a_max or a_max >= critical_a(d):
        raise DegenerateParams(f"bad range a in [{a_min}, {a_max}] with {steps} steps")
    return [RegionRow(a=float(a), b_fs=fs_curve(float(a), d), b_dgz=dgz_curve(float(a), d))
            for a in np.linspace(a_min, a_max, steps)]


def _fmt(x):
    return "" if x is None else format(x, ".17g")


def to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["a", "b_fs", "b_dgz"])
    for r in rows:
        w.writerow([_fmt(r.a), _fmt(r.b_fs), _fmt(r.b_dgz)])
    return buf.getvalue()


def parse_csv(text):
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append(RegionRow(a=float(rec["a"]), b_fs=float(rec["b_fs"]),
                             b_dgz=float(rec["b_dgz"]) if rec["b_dgz"] else None))
    return out


def _ticks(lo, hi, count=5):
    return np.linspace(lo, hi, count)


def to_svg(rows, d):
    """Self-contained SVG: both curves and the lines ``b = a``, ``b = a + 1``."""
    a = np.array([r.a for r in rows])
    fs = np.array([r.b_fs for r in rows])
    dgz = [(r.a, r.b_dgz) for r in rows if r.b_dgz is not None]
    b_vals = np.concatenate([fs, a, a + 1] + ([np.array([b for _, b in dgz])] if dgz else []))
    a_lo, a_hi = float(a.min()), float(a.max())
    b_lo, b_hi = float(b_vals.min()), float(b_vals.max())

    def sx(x):
        return _MARGIN + (x - a_lo) / (a_hi - a_lo) * (VIEW_W - 2 * _MARGIN)

    def sy(y):
        return VIEW_H - _MARGIN - (y - b_lo) / (b_hi - b_lo) * (VIEW_H - 2 * _MARGIN)

    def pts(pairs):
        return " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in pairs)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW_W} {VIEW_H}" '
           f'width="{VIEW_W}" height="{VIEW_H}">',
           f'<title>Felli-Schneider and DGZ curves, d = {d}</title>',
           '<rect width="100%" height="100%" fill="white"/>']
    x0, x1 = sx(a_lo), sx(a_hi)
    y0, y1 = sy(b_lo), sy(b_hi)
    out.append(f'<line x1="{x0:.3f}" y1="{y0:.3f}" x2="{x1:.3f}" y2="{y0:.3f}" stroke="black"/>')
    out.append(f'<line x1="{x0:.3f}" y1="{y0:.3f}" x2="{x0:.3f}" y2="{y1:.3f}" stroke="black"/>')
    for t in _ticks(a_lo, a_hi):
        out.append(f'<line x1="{sx(t):.3f}" y1="{y0:.3f}" x2="{sx(t):.3f}" y2="{y0 + 5:.3f}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.3f}" y="{y0 + 18:.3f}" font-size="11" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(b_lo, b_hi):
        out.append(f'<line x1="{x0 - 5:.3f}" y1="{sy(t):.3f}" x2="{x0:.3f}" y2="{sy(t):.3f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8:.3f}" y="{sy(t) + 4:.3f}" font-size="11" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{VIEW_W / 2:.0f}" y="{VIEW_H - 8}" font-size="13" text-anchor="middle">a</text>')
    out.append(f'<text x="14" y="{VIEW_H / 2:.0f}" font-size="13">b</text>')
    for shift, name in ((0.0, "b = a"), (1.0, "b = a + 1")):
        out.append(f'<line class="theta" x1="{sx(a_lo):.3f}" y1="{sy(a_lo + shift):.3f}" '
                   f'x2="{sx(a_hi):.3f}" y2="{sy(a_hi + shift):.3f}" stroke="gray" '
                   f'stroke-width="1"><title>{name}</title></line>')
    out.append(f'<polyline id="b_fs" fill="none" stroke="red" stroke-dasharray="6,4" '
               f'points="{pts(zip(a, fs))}"/>')
    out.append(f'<polyline id="b_dgz" fill="none" stroke="blue" points="{pts(dgz)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def dominance_violations(rows, tol=1e-12):
    """Rows where ``b_dgz < b_fs`` beyond ``tol`` (both defined)."""
    return [r for r in rows if r.b_dgz is not None and r.b_dgz < r.b_fs - tol]
