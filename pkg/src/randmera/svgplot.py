"""Minimal SVG line plots with no plotting dependency.

Good enough for descending-spectrum curves and schedule profiles: axes,
ticks at the extremes, one polyline per named series, and a legend.  Output
is a deterministic function of the input, so plots can be golden-tested
byte for byte.
"""

from __future__ import annotations

from .errors import UsageError

__all__ = ["line_plot"]

_PALETTE = ("#1f6f8b", "#c23b22", "#4a7c59", "#8c5383", "#b08904", "#4757a5")

_WIDTH, _HEIGHT = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 62, 16, 34, 46


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def line_plot(
    series: dict[str, list[tuple[float, float]]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
) -> str:
    """Render named (x, y) polylines into a standalone SVG document."""
    if not series or all(len(pts) == 0 for pts in series.values()):
        raise UsageError("nothing to plot")
    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#444" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH // 2}" y="22" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15">{_escape(title)}</text>'
        )
    # extreme ticks
    for x in (x_lo, x_hi):
        parts.append(
            f'<text x="{_fmt(px(x))}" y="{_HEIGHT - _MARGIN_B + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(x)}</text>'
        )
    for y in (y_lo, y_hi):
        parts.append(
            f'<text x="{_MARGIN_L - 6}" y="{_fmt(py(y) + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(y)}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_escape(x_label)}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="16" y="{_HEIGHT // 2}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12" transform="rotate(-90 16 {_HEIGHT // 2})">{_escape(y_label)}</text>'
        )
    for idx, (name, pts) in enumerate(series.items()):
        if not pts:
            continue
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = _MARGIN_T + 16 + 16 * idx
        parts.append(
            f'<line x1="{_WIDTH - _MARGIN_R - 150}" y1="{ly - 4}" '
            f'x2="{_WIDTH - _MARGIN_R - 126}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_WIDTH - _MARGIN_R - 120}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{_escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
