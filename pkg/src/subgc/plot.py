"""Minimal SVG 1.1 line charts from CSV columns.

The output depends only on the input table and options: no fonts are
embedded, coordinates are printed at fixed precision, and nothing reads the
clock, so the same CSV always gives the same bytes.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 20, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class PlotError(ValueError):
    pass


def read_table(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        header = reader.fieldnames or []
    if not rows:
        raise PlotError(f"{path}: no data rows")
    return header, rows


def _number(text: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        return math.nan


def nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _label(v: float, log: bool) -> str:
    return f"1e{int(round(v))}" if log else f"{v:g}"


class Chart:
    def __init__(self, xlim, ylim, logx, logy):
        self.xlim, self.ylim = xlim, ylim
        self.logx, self.logy = logx, logy
        self.parts: list[str] = []

    def px(self, x: float) -> float:
        a, b = self.xlim
        return LEFT + (x - a) / (b - a) * (WIDTH - LEFT - RIGHT)

    def py(self, y: float) -> float:
        a, b = self.ylim
        return HEIGHT - BOTTOM - (y - a) / (b - a) * (HEIGHT - TOP - BOTTOM)

    def add(self, s: str):
        self.parts.append(s)

    def axes(self, xname: str, yname: str):
        x0, x1 = LEFT, WIDTH - RIGHT
        y0, y1 = HEIGHT - BOTTOM, TOP
        self.add(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="#333"/>')
        xt = nice_ticks(*self.xlim) if not self.logx else _int_ticks(*self.xlim)
        yt = nice_ticks(*self.ylim) if not self.logy else _int_ticks(*self.ylim)
        for t in xt:
            x = self.px(t)
            self.add(f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 5}" stroke="#333"/>')
            self.add(f'<text x="{x:.2f}" y="{y0 + 18}" text-anchor="middle" font-size="11">'
                     f'{_label(t, self.logx)}</text>')
        for t in yt:
            y = self.py(t)
            self.add(f'<line x1="{x0 - 5}" y1="{y:.2f}" x2="{x0}" y2="{y:.2f}" stroke="#333"/>')
            self.add(f'<text x="{x0 - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="11">'
                     f'{_label(t, self.logy)}</text>')
        self.add(f'<text x="{(x0 + x1) / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle" '
                 f'font-size="13">{escape(xname)}</text>')
        self.add(f'<text x="16" y="{(y0 + y1) / 2:.2f}" text-anchor="middle" font-size="13" '
                 f'transform="rotate(-90 16 {(y0 + y1) / 2:.2f})">{escape(yname)}</text>')

    def series(self, pts, color: str, name: str, slot: int):
        coords = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in pts)
        self.add(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts:
            self.add(f'<circle cx="{self.px(x):.2f}" cy="{self.py(y):.2f}" r="2.5" fill="{color}"/>')
        ly = TOP + 16 + 16 * slot
        lx = WIDTH - RIGHT - 150
        self.add(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        self.add(f'<text x="{lx + 26}" y="{ly + 4}" font-size="11">{escape(name)}</text>')

    def render(self) -> str:
        head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
                f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">\n')
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _int_ticks(lo: float, hi: float) -> list[float]:
    ticks = list(range(math.ceil(lo - 1e-9), math.floor(hi + 1e-9) + 1))
    return [float(t) for t in ticks] or [lo]


def _limits(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def render_svg(header, rows, x: str, ys: list[str], logx=False, logy=False) -> str:
    """SVG text for columns ``ys`` against ``x``.

    Rows whose values are missing, non-finite, or nonpositive on a log axis
    are skipped; an error is raised if nothing is left to draw.
    """
    missing = [c for c in [x, *ys] if c not in header]
    if missing:
        raise PlotError(f"missing column(s): {', '.join(missing)}; have {', '.join(header)}")
    series = []
    for y in ys:
        pts = []
        for r in rows:
            a, b = _number(r[x]), _number(r[y])
            if logx:
                a = math.log10(a) if a > 0 else math.nan
            if logy:
                b = math.log10(b) if b > 0 else math.nan
            if math.isfinite(a) and math.isfinite(b):
                pts.append((a, b))
        pts.sort()
        series.append(pts)
    if not any(series):
        raise PlotError("no plottable (finite) points")
    xs = [p[0] for s in series for p in s]
    yv = [p[1] for s in series for p in s]
    chart = Chart(_limits(xs), _limits(yv), logx, logy)
    chart.axes(x, ", ".join(ys))
    for i, (name, pts) in enumerate(zip(ys, series)):
        if pts:
            chart.series(pts, COLORS[i % len(COLORS)], name, i)
    return chart.render()


def plot_csv(path_in, x: str, ys: list[str], path_out, logx=False, logy=False) -> str:
    header, rows = read_table(path_in)
    svg = render_svg(header, rows, x, ys, logx, logy)
    Path(path_out).write_text(svg)
    return svg
