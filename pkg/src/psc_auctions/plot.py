"""Dependency-free SVG revenue curves."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

from .exceptions import EmptyInput

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 55
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def emit_plot(rows, path, title="total revenue vs share fraction"):
    """Write one series per (contract, estimator): lines for deterministic rows, markers for Monte Carlo."""
    rows = list(rows)
    if not rows:
        raise EmptyInput("no rows to plot")
    series = {}
    for r in rows:
        series.setdefault((r.contract, r.estimator), []).append((r.alpha, r.total, r.stderr))
    xs = [r.alpha for r in rows]
    ys = [r.total for r in rows]
    x_lo, x_hi = min(0.0, min(xs)), max(xs) if max(xs) > 0 else 1.0
    pad = 0.05 * (max(ys) - min(ys) or abs(max(ys)) or 1.0)
    y_lo, y_hi = min(ys) - pad, max(ys) + pad
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + pw * (x - x_lo) / (x_hi - x_lo)

    def sy(y):
        return TOP + ph * (1.0 - (y - y_lo) / (y_hi - y_lo))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{LEFT + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{sx(t):.2f}" y1="{TOP + ph}" x2="{sx(t):.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{TOP + ph + 18}" text-anchor="middle">{t:.2f}</text>')
    for t in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{LEFT - 5}" y1="{sy(t):.2f}" x2="{LEFT}" y2="{sy(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:.3f}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">share fraction alpha</text>')
    out.append(f'<text x="18" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {TOP + ph / 2:.1f})">expected total revenue</text>')

    contracts = list(dict.fromkeys(r.contract for r in rows))
    legend_y = TOP + 10
    for (contract, estimator), pts in series.items():
        color = COLORS[contracts.index(contract) % len(COLORS)]
        pts = sorted(pts)
        kind = "line" if estimator != "mc" and len(pts) > 1 else "markers"
        cls = f'series {escape(contract)} {escape(estimator)}'
        if kind == "line":
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y, _ in pts)
            out.append(f'<polyline class="{cls}" points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        else:
            out.append(f'<g class="{cls}" fill="{color}">')
            for x, y, se in pts:
                if se > 0:
                    out.append(f'<line x1="{sx(x):.2f}" y1="{sy(y - 3 * se):.2f}" x2="{sx(x):.2f}" '
                               f'y2="{sy(y + 3 * se):.2f}" stroke="{color}"/>')
                out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3"/>')
            out.append('</g>')
        lx = LEFT + pw + 12
        if kind == "line":
            out.append(f'<line x1="{lx}" y1="{legend_y}" x2="{lx + 20}" y2="{legend_y}" stroke="{color}" stroke-width="2"/>')
        else:
            out.append(f'<circle cx="{lx + 10}" cy="{legend_y}" r="3" fill="{color}"/>')
        out.append(f'<text x="{lx + 26}" y="{legend_y + 4}">{escape(contract)} ({escape(estimator)})</text>')
        legend_y += 18
    out.append('</svg>')
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path
