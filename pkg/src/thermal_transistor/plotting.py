"""Static SVG line plots of sweep tables.

Written by hand rather than through a plotting library so the output is
byte-stable for a fixed table (no timestamps, ids or font metrics).
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyTable
from .sweep import SweepTable

KINDS = ("currents", "currents-by-lambda", "amplification")
# accepted spelling with the Greek letter as well
_ALIASES = {"currents-by-λ": "currents-by-lambda"}

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 150, 30, 55
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
BATH_COLOURS = {"S": "#d62728", "M": "#2ca02c", "D": "#1f77b4"}
BATH_DASH = {"S": "", "M": "6,3", "D": "2,2"}


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _range(values) -> tuple[float, float]:
    v = np.asarray([x for x in values if math.isfinite(x)])
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        pad = abs(hi) * 0.1 or 1.0
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _fmt(x: float) -> str:
    return f"{x:.3g}"


def _render(series, xlabel: str, ylabel: str, title: str) -> str:
    """``series`` is a list of (label, x, y, colour, dash)."""
    xs = [x for _, xv, _, _, _ in series for x in xv]
    ys = [y for _, _, yv, _, _ in series for y in yv]
    x0, x1 = _range(xs)
    y0, y1 = _range(ys)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT + pw / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{TOP + ph}" x2="{X:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{Y:.2f}" x2="{LEFT}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{Y + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    if y0 < 0 < y1:
        out.append(f'<line x1="{LEFT}" y1="{py(0):.2f}" x2="{LEFT + pw}" y2="{py(0):.2f}" stroke="#999" stroke-width="0.5"/>')

    for k, (label, xv, yv, colour, dash) in enumerate(series):
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xv, yv) if math.isfinite(y))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash_attr} points="{pts}">'
            f"<title>{escape(label)}</title></polyline>"
        )
        ly = TOP + 10 + 16 * k
        lx = LEFT + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{colour}" stroke-width="1.5"{dash_attr}/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(table: SweepTable, kind: str = "currents", lam: float | None = None) -> str:
    """SVG document for one of :data:`KINDS`.

    ``currents`` draws the three bath currents of one block (``lam``, default
    the last block); ``currents-by-lambda`` draws all three currents for every
    block; ``amplification`` draws alpha_S per block normalised to the peak of
    the block with the smallest lambda.
    """
    kind = _ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {KINDS}")
    if len(table) == 0:
        raise EmptyTable("cannot plot an empty sweep table")
    lambdas = table.lambdas()
    xlabel = "T_M / Omega"

    if kind == "currents":
        lam = lambdas[-1] if lam is None else lam
        if lam not in lambdas:
            raise EmptyTable(f"no rows for lambda = {lam:g}")
        T = table.column("T_M", lam)
        series = [
            (f"J_{b}", T, table.column(f"J_{b}", lam), BATH_COLOURS[b], "")
            for b in ("S", "M", "D")
        ]
        return _render(series, xlabel, "J / (R Omega^4)", f"Heat currents, lambda = {lam:g}")

    if kind == "currents-by-lambda":
        series = []
        for i, lam in enumerate(lambdas):
            T = table.column("T_M", lam)
            for b in ("S", "M", "D"):
                series.append(
                    (f"J_{b}, lambda={lam:g}", T, table.column(f"J_{b}", lam),
                     PALETTE[i % len(PALETTE)], BATH_DASH[b])
                )
        return _render(series, xlabel, "J / (R Omega^4)", "Heat currents by anharmonicity")

    ref_lam = min(lambdas)
    ref = table.column("alpha_S", ref_lam)
    finite = ref[np.isfinite(ref)]
    peak = float(np.max(finite)) if finite.size else math.nan
    series = [
        (f"lambda={lam:g}", table.column("T_M", lam), table.column("alpha_S", lam) / peak,
         PALETTE[i % len(PALETTE)], "")
        for i, lam in enumerate(lambdas)
    ]
    return _render(series, xlabel, f"alpha_S / max alpha_S(lambda={ref_lam:g})", "Normalised source amplification")
