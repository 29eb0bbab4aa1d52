"""Minimal SVG line charts with optional shaded bands."""

from __future__ import annotations

from html import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def line_chart(xs, series: dict, title: str = "", xlabel: str = "", ylabel: str = "",
               width: int = 560, height: int = 360) -> str:
    """Render ``series`` as polylines over shared ``xs``.

    ``series`` maps a name to ``ys`` or to ``(ys, band)`` where ``band`` is a
    per-point half-width drawn as a translucent region.
    """
    left, right, top, bottom = 60, 130, 30, 45
    pw, ph = width - left - right, height - top - bottom
    xs = [float(x) for x in xs]
    items = []
    lo, hi = float("inf"), float("-inf")
    for name, val in series.items():
        ys, band = (val if isinstance(val, tuple) else (val, None))
        ys = [float(y) for y in ys]
        band = [float(b) for b in band] if band is not None else [0.0] * len(ys)
        items.append((name, ys, band))
        lo = min(lo, min(y - b for y, b in zip(ys, band)))
        hi = max(hi, max(y + b for y, b in zip(ys, band)))
    if not items:
        lo, hi = 0.0, 1.0
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x1 = x0 + 1

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (hi - y) / (hi - lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>']
    for k in range(5):
        v = lo + (hi - lo) * k / 4
        out.append(f'<text x="{left - 6}" y="{py(v) + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    for x in xs:
        out.append(f'<text x="{px(x):.1f}" y="{top + ph + 15}" text-anchor="middle">{x:g}</text>')
    for idx, (name, ys, band) in enumerate(items):
        color = PALETTE[idx % len(PALETTE)]
        if any(band):
            upper = [f"{px(x):.1f},{py(y + b):.1f}" for x, y, b in zip(xs, ys, band)]
            lower = [f"{px(x):.1f},{py(y - b):.1f}" for x, y, b in zip(xs, ys, band)]
            out.append(f'<polygon points="{" ".join(upper + lower[::-1])}" fill="{color}" '
                       f'fill-opacity="0.18" stroke="none"/>')
        pts = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = top + 14 * idx + 8
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 28}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 32}" y="{ly + 4}">{escape(str(name))}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {top + ph / 2})">{escape(ylabel)}</text>')
    out.append(f'<text x="{left + pw / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
