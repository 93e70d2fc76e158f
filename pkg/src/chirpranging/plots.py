"""
Self-contained SVG figures: error heatmaps and CDF curves.

The plotted numbers are embedded as XML comments so a figure can be diffed
or re-read without the run that produced it.
"""

from xml.sax.saxutils import escape

import numpy as np

from .io import fmt_float

# viridis anchors
_CMAP = np.array([
    [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
], dtype=float)
_LINE_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                "#e377c2", "#17becf"]


def _color(t):
    t = float(np.clip(t, 0.0, 1.0)) * (len(_CMAP) - 1)
    i = min(int(t), len(_CMAP) - 2)
    rgb = _CMAP[i] + (t - i) * (_CMAP[i + 1] - _CMAP[i])
    return "#%02x%02x%02x" % tuple(int(round(c)) for c in rgb)


def _num(x):
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _head(width, height, title):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
    ]


def heatmap_svg(matrix, path, title="", x0=0.0, y0=0.0, spacing=1.0, vmax=None,
                label="abs error (m)"):
    """Heatmap of a (ny, nx) matrix; row 0 is drawn at the bottom."""
    m = np.asarray(matrix, dtype=float)
    ny, nx = m.shape
    cell = max(8, min(28, 420 // max(nx, ny)))
    left, top = 60, 34
    width = left + nx * cell + 110
    height = top + ny * cell + 50
    vmax = float(np.max(m)) if vmax is None else vmax
    vmax = vmax if vmax > 0 else 1.0
    out = _head(width, height, title)
    out.append(f"<!-- data: rows={ny} cols={nx} x0={fmt_float(x0)} y0={fmt_float(y0)} "
               f"spacing={fmt_float(spacing)} vmax={fmt_float(vmax)} -->")
    for iy in range(ny):
        out.append("<!-- row %d: %s -->" % (iy, " ".join(fmt_float(v) for v in m[iy])))
    for iy in range(ny):
        for ix in range(nx):
            px = left + ix * cell
            py = top + (ny - 1 - iy) * cell
            out.append(f'<rect x="{px}" y="{py}" width="{cell}" height="{cell}" '
                       f'fill="{_color(m[iy, ix] / vmax)}"/>')
    bottom = top + ny * cell
    out.append(f'<text x="{left + nx * cell / 2}" y="{bottom + 34}" text-anchor="middle">x (m)</text>')
    out.append(f'<text x="16" y="{top + ny * cell / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ny * cell / 2})">y (m)</text>')
    for ix in range(0, nx, max(1, nx // 5)):
        out.append(f'<text x="{left + ix * cell + cell / 2}" y="{bottom + 16}" '
                   f'text-anchor="middle">{_num(x0 + ix * spacing)}</text>')
    for iy in range(0, ny, max(1, ny // 5)):
        out.append(f'<text x="{left - 6}" y="{top + (ny - 1 - iy) * cell + cell / 2 + 4}" '
                   f'text-anchor="end">{_num(y0 + iy * spacing)}</text>')
    bx = left + nx * cell + 20
    steps = 50
    bar_h = ny * cell
    for k in range(steps):
        frac = 1 - k / steps
        out.append(f'<rect x="{bx}" y="{top + k * bar_h / steps:.2f}" width="14" '
                   f'height="{bar_h / steps + 0.5:.2f}" fill="{_color(frac)}"/>')
    out.append(f'<text x="{bx + 18}" y="{top + 8}">{_num(vmax)}</text>')
    out.append(f'<text x="{bx + 18}" y="{top + bar_h}">0</text>')
    out.append(f'<text x="{bx + 18}" y="{top + bar_h / 2}">{escape(label)}</text>')
    out.append("</svg>")
    _write(out, path)


def cdf_svg(curves, path, title="", xmax=None, xlabel="abs error (m)"):
    """Step CDFs; `curves` maps a label to a sequence of error samples."""
    width, height = 560, 380
    left, right, top, bottom = 60, 150, 34, 330
    all_max = max((float(np.max(v)) for v in curves.values() if len(v)), default=1.0)
    xmax = all_max if xmax is None else xmax
    xmax = xmax if xmax > 0 else 1.0

    def sx(x):
        return left + (right_edge - left) * min(x, xmax) / xmax

    def sy(f):
        return bottom - (bottom - top) * f

    right_edge = width - right
    out = _head(width, height, title)
    out.append(f'<rect x="{left}" y="{top}" width="{right_edge - left}" '
               f'height="{bottom - top}" fill="none" stroke="black"/>')
    for k in range(6):
        f = k / 5
        out.append(f'<text x="{left - 6}" y="{sy(f) + 4:.2f}" text-anchor="end">{_num(f)}</text>')
        x = xmax * k / 5
        out.append(f'<text x="{sx(x):.2f}" y="{bottom + 16}" text-anchor="middle">{_num(x)}</text>')
    out.append(f'<text x="{(left + right_edge) / 2}" y="{bottom + 34}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    for i, (label, values) in enumerate(curves.items()):
        v = np.sort(np.asarray(values, dtype=float))
        n = len(v)
        color = _LINE_COLORS[i % len(_LINE_COLORS)]
        out.append(f"<!-- curve {escape(label)}: n={n} values={' '.join(fmt_float(x) for x in v)} -->")
        pts = [(sx(0.0), sy(0.0))]
        for k, x in enumerate(v):
            pts.append((sx(x), sy(k / n)))
            pts.append((sx(x), sy((k + 1) / n)))
        pts.append((sx(xmax), sy(1.0 if n else 0.0)))
        d = " ".join(f"{px:.2f},{py:.2f}" for px, py in pts)
        out.append(f'<polyline points="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = top + 14 + 16 * i
        out.append(f'<line x1="{right_edge + 10}" y1="{ly}" x2="{right_edge + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{right_edge + 34}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    _write(out, path)


def _write(lines, path):
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
