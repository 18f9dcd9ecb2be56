"""Minimal native SVG line charts (fixed 800x600 viewBox, no plotting deps).

Output is deterministic: coordinates are formatted to two decimals and
series render in insertion order. Points with a None y-value split the
polyline.
"""

from __future__ import annotations

import math

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"]
_W, _H = 800, 600
_LEFT, _RIGHT, _TOP, _BOTTOM = 80, 30, 50, 70


def _nice_range(values: list[float]) -> tuple[float, float]:
    # Snap to 0.05 steps, clamped to [0,1]; metrics live there.
    lo = max(0.0, math.floor((min(values) - 0.02) * 20.0) / 20.0)
    hi = min(1.0, math.ceil((max(values) + 0.02) * 20.0) / 20.0)
    if hi - lo < 0.05:
        lo, hi = max(0.0, lo - 0.05), min(1.0, hi + 0.05)
    if hi <= lo:
        return 0.0, 1.0
    return lo, hi


def line_chart_svg(
    series: dict[str, list[tuple[float, float | None]]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts if y is not None]
    if not xs or not ys:
        raise ValueError("chart needs at least one finite point")
    x_lo, x_hi = min(xs), max(xs)
    if x_hi <= x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = _nice_range(ys)

    plot_w = _W - _LEFT - _RIGHT
    plot_h = _H - _TOP - _BOTTOM

    def px(x: float) -> float:
        return _LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}" '
        f'font-family="sans-serif" font-size="14">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.2f}" y="28" text-anchor="middle" font-size="18">{title}</text>',
    ]
    # axes
    out.append(
        f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_TOP + plot_h}" stroke="black"/>'
    )
    out.append(
        f'<line x1="{_LEFT}" y1="{_TOP + plot_h}" x2="{_LEFT + plot_w}" '
        f'y2="{_TOP + plot_h}" stroke="black"/>'
    )
    n_ticks = 5
    for i in range(n_ticks + 1):
        xv = x_lo + (x_hi - x_lo) * i / n_ticks
        xp = px(xv)
        out.append(
            f'<line x1="{xp:.2f}" y1="{_TOP + plot_h}" x2="{xp:.2f}" '
            f'y2="{_TOP + plot_h + 6}" stroke="black"/>'
        )
        out.append(
            f'<text x="{xp:.2f}" y="{_TOP + plot_h + 24}" text-anchor="middle">{xv:.2f}</text>'
        )
        yv = y_lo + (y_hi - y_lo) * i / n_ticks
        yp = py(yv)
        out.append(
            f'<line x1="{_LEFT - 6}" y1="{yp:.2f}" x2="{_LEFT}" y2="{yp:.2f}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_LEFT - 10}" y="{yp + 5:.2f}" text-anchor="end">{yv:.2f}</text>'
        )
    out.append(
        f'<text x="{_LEFT + plot_w / 2:.2f}" y="{_H - 16}" text-anchor="middle">{x_label}</text>'
    )
    out.append(
        f'<text x="22" y="{_TOP + plot_h / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 22 {_TOP + plot_h / 2:.2f})">{y_label}</text>'
    )
    # series and legend
    for idx, (name, pts) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        runs: list[list[tuple[float, float]]] = [[]]
        for x, y in sorted(pts):
            if y is None:
                if runs[-1]:
                    runs.append([])
            else:
                runs[-1].append((px(x), py(y)))
        for run in runs:
            if len(run) >= 2:
                coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in run)
                out.append(
                    f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
                )
            for x, y in run:
                out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
        ly = _TOP + 14 + 22 * idx
        lx = _LEFT + plot_w - 150
        out.append(
            f'<line x1="{lx}" y1="{ly - 5}" x2="{lx + 28}" y2="{ly - 5}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(f'<text x="{lx + 36}" y="{ly}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
