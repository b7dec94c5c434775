"""Minimal SVG line plots, so figure output needs no plotting dependency."""

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _scale(vals, lo, hi, out_lo, out_hi):
    span = (hi - lo) or 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in vals]


def write_line_svg(path, x, curves, labels=(), title="", width=720, height=480):
    """Write simple polyline curves over a shared x-axis.

    ``curves`` is a list of y-arrays; axes are linear with 5% padding and
    tick labels at the corners only.
    """
    curves = [list(map(float, c)) for c in curves]
    x = list(map(float, x))
    xlo, xhi = min(x), max(x)
    ylo = min(min(c) for c in curves)
    yhi = max(max(c) for c in curves)
    pad_x = 0.05 * ((xhi - xlo) or 1.0)
    pad_y = 0.05 * ((yhi - ylo) or 1.0)
    xlo, xhi = xlo - pad_x, xhi + pad_x
    ylo, yhi = ylo - pad_y, yhi + pad_y
    m = 50  # margin
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{m}" y="{m}" width="{width - 2 * m}" height="{height - 2 * m}" '
        f'fill="none" stroke="#444"/>',
    ]
    if title:
        parts.append(f'<text x="{width // 2}" y="{m - 16}" text-anchor="middle" '
                     f'font-size="15">{title}</text>')
    for i, c in enumerate(curves):
        xs = _scale(x, xlo, xhi, m, width - m)
        ys = _scale(c, ylo, yhi, height - m, m)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(xs, ys))
        color = COLORS[i % len(COLORS)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        if i < len(labels):
            parts.append(f'<text x="{width - m - 6}" y="{m + 18 + 16 * i}" '
                         f'text-anchor="end" font-size="12" fill="{color}">'
                         f'{labels[i]}</text>')
    for val, xpos, anchor in ((xlo, m, "start"), (xhi, width - m, "end")):
        parts.append(f'<text x="{xpos}" y="{height - m + 18}" text-anchor="{anchor}" '
                     f'font-size="11">{val:.3g}</text>')
    for val, ypos in ((ylo, height - m), (yhi, m + 4)):
        parts.append(f'<text x="{m - 6}" y="{ypos}" text-anchor="end" '
                     f'font-size="11">{val:.3g}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
