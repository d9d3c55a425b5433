"""Minimal SVG line plots: one polyline, optional log axes, no dependencies.
Plots are conveniences; the CSV tables are the contract."""

import math

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 20, 50


def _transform(vals, log):
    out = []
    for v in vals:
        if log:
            out.append(math.log10(v) if v > 0 else None)
        else:
            out.append(float(v))
    return out


def _ticks(lo, hi, log):
    if log:
        lo_i, hi_i = math.floor(lo), math.ceil(hi)
        return [float(k) for k in range(lo_i, hi_i + 1)]
    span = hi - lo or 1.0
    step = 10 ** math.floor(math.log10(span / 4 or 1))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * abs(step):
        ticks.append(v)
        v += step
    return ticks


def write_line_svg(path, xs, ys, xlabel="x", ylabel="y", logx=False, logy=False, title=""):
    """Write a single-series line plot; points with nonpositive values on a
    log axis are dropped."""
    tx = _transform(xs, logx)
    ty = _transform(ys, logy)
    pts = [(a, b) for a, b in zip(tx, ty) if a is not None and b is not None]
    if len(pts) < 2:
        return False
    xv = [p[0] for p in pts]
    yv = [p[1] for p in pts]
    x0, x1 = min(xv), max(xv)
    y0, y1 = min(yv), max(yv)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def sx(v):
        return _ML + pw * (v - x0) / (x1 - x0)

    def sy(v):
        return _MT + ph * (1.0 - (v - y0) / (y1 - y0))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#888" stroke-width="1"/>',
    ]
    for t in _ticks(x0, x1, logx):
        if not x0 <= t <= x1:
            continue
        px = sx(t)
        label = f"1e{int(t)}" if logx else f"{t:g}"
        lines.append(
            f'<line x1="{px:.1f}" y1="{_MT + ph}" x2="{px:.1f}" y2="{_MT + ph + 5}" '
            'stroke="#444"/>'
        )
        lines.append(
            f'<text x="{px:.1f}" y="{_MT + ph + 20}" font-size="11" '
            f'text-anchor="middle">{label}</text>'
        )
    for t in _ticks(y0, y1, logy):
        if not y0 <= t <= y1:
            continue
        py = sy(t)
        label = f"1e{int(t)}" if logy else f"{t:g}"
        lines.append(
            f'<line x1="{_ML - 5}" y1="{py:.1f}" x2="{_ML}" y2="{py:.1f}" stroke="#444"/>'
        )
        lines.append(
            f'<text x="{_ML - 8}" y="{py + 4:.1f}" font-size="11" '
            f'text-anchor="end">{label}</text>'
        )
    path_d = " ".join(
        f"{'M' if i == 0 else 'L'} {sx(a):.2f} {sy(b):.2f}" for i, (a, b) in enumerate(pts)
    )
    lines.append(f'<path d="{path_d}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
    for a, b in pts:
        lines.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="2.5" fill="#1f77b4"/>')
    lines.append(
        f'<text x="{_ML + pw / 2:.0f}" y="{_H - 12}" font-size="12" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    lines.append(
        f'<text x="16" y="{_MT + ph / 2:.0f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MT + ph / 2:.0f})">{ylabel}</text>'
    )
    if title:
        lines.append(
            f'<text x="{_ML + pw / 2:.0f}" y="14" font-size="13" '
            f'text-anchor="middle">{title}</text>'
        )
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
    return True
