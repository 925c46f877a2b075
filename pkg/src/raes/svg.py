"""Standalone SVG line charts for regret curves, no plotting dependency."""

from __future__ import annotations

PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
]

_MARGIN_LEFT = 64
_MARGIN_RIGHT = 24
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 48
_N_TICKS = 5


def _fmt(x: float) -> str:
    return "%.2f" % x


def render_svg(series, path: str, title: str = "", x_label: str = "round",
               y_label: str = "cumulative regret", width: int = 860,
               height: int = 520) -> str:
    """Write a line chart of the given series to path and return the path.

    series maps label -> sequence of y values plotted against 1..n. The y
    axis always starts at zero; an all-zero chart degenerates to baseline
    polylines rather than failing. Output is a single <svg> element,
    parseable as XML, with coordinates rounded to two decimals so identical
    input produces identical bytes.
    """
    if not series:
        raise ValueError("need at least one series to plot")
    items = [(str(label), [float(v) for v in vals]) for label, vals in series.items()]
    if any(len(vals) == 0 for _, vals in items):
        raise ValueError("every series needs at least one point")
    x_max = max(len(vals) for _, vals in items)
    y_max = max(max(vals) for _, vals in items)
    y_max = max(y_max, 0.0)
    y_den = y_max if y_max > 0.0 else 1.0

    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM
    x_den = max(x_max - 1, 1)

    def x_px(t: int) -> float:
        return _MARGIN_LEFT + (t - 1) / x_den * plot_w

    def y_px(v: float) -> float:
        return _MARGIN_TOP + (1.0 - v / y_den) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" '
            f'font-size="16">{_escape(title)}</text>'
        )

    axis_color = "#333333"
    x0, y0 = _MARGIN_LEFT, _MARGIN_TOP + plot_h
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" '
        f'stroke="{axis_color}" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{_MARGIN_TOP}" x2="{x0}" y2="{y0}" '
        f'stroke="{axis_color}" stroke-width="1"/>'
    )
    for i in range(_N_TICKS + 1):
        frac = i / _N_TICKS
        yv = frac * y_max
        yp = y_px(yv)
        parts.append(
            f'<line x1="{x0 - 4}" y1="{_fmt(yp)}" x2="{x0}" y2="{_fmt(yp)}" '
            f'stroke="{axis_color}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{_fmt(yp + 4)}" text-anchor="end" '
            f'font-size="11">{yv:.4g}</text>'
        )
        xv = 1 + frac * (x_max - 1)
        xp = x_px(xv)
        parts.append(
            f'<line x1="{_fmt(xp)}" y1="{y0}" x2="{_fmt(xp)}" y2="{y0 + 4}" '
            f'stroke="{axis_color}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(xp)}" y="{y0 + 18}" text-anchor="middle" '
            f'font-size="11">{xv:.4g}</text>'
        )
    parts.append(
        f'<text x="{x0 + plot_w / 2:.0f}" y="{height - 10}" text-anchor="middle" '
        f'font-size="12">{_escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_TOP + plot_h / 2:.0f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 16 {_MARGIN_TOP + plot_h / 2:.0f})">'
        f'{_escape(y_label)}</text>'
    )

    for idx, (label, vals) in enumerate(items):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(
            f"{_fmt(x_px(i + 1))},{_fmt(y_px(v))}" for i, v in enumerate(vals)
        )
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{pts}"/>'
        )

    legend_x = x0 + 12
    legend_y = _MARGIN_TOP + 8
    for idx, (label, _) in enumerate(items):
        color = PALETTE[idx % len(PALETTE)]
        ly = legend_y + 16 * idx
        parts.append(
            f'<rect x="{legend_x}" y="{ly - 9}" width="12" height="3" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{legend_x + 18}" y="{ly}" font-size="11">{_escape(label)}</text>'
        )

    parts.append("</svg>")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")
    return path


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )
