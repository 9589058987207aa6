"""Minimal layered SVG output with byte-stable formatting."""

from __future__ import annotations

from pathlib import Path

import numpy as np

GRAY = "#888888"
BLACK = "#000000"
RED = "#d62728"
BLUE = "#1f77b4"
ORANGE = "#ff7f0e"


def _fmt(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _path(points, closed: bool = True) -> str:
    p = np.asarray(points, dtype=float)
    # flip y so the picture has the usual upward y axis
    coords = [f"{_fmt(x)},{_fmt(-y)}" for x, y in p]
    return "M" + " L".join(coords) + (" Z" if closed else "")


def _layer(name: str, stroke: str, paths, width: float, fill: str = "none", closed: bool = True) -> str:
    body = "".join(f'    <path d="{_path(p, closed)}"/>\n' for p in paths)
    return (
        f'  <g id="{name}" fill="{fill}" stroke="{stroke}" stroke-width="{_fmt(width)}">\n'
        f"{body}  </g>\n"
    )


def render_svg(layers, pad_fraction: float = 0.05) -> str:
    """SVG text for ``layers``: (name, colour, list of point arrays, closed, fill) tuples."""
    pts = [np.asarray(p, dtype=float) for _, _, paths, _, _ in layers for p in paths]
    if pts:
        allp = np.vstack(pts)
        lo, hi = allp.min(axis=0), allp.max(axis=0)
    else:
        lo, hi = np.zeros(2), np.ones(2)
    size = np.maximum(hi - lo, 1e-9)
    pad = pad_fraction * float(size.max())
    x0, y0 = lo[0] - pad, -(hi[1] + pad)
    w, h = size[0] + 2 * pad, size[1] + 2 * pad
    width = 0.004 * float(max(w, h))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">\n',
    ]
    for name, colour, paths, closed, fill in layers:
        out.append(_layer(name, colour, paths, width, fill or "none", closed))
    out.append("</svg>\n")
    return "".join(out)


def emit_svg(path, input_curves=(), minimizer_curves=(), witnesses=(), construction=None) -> None:
    """Write input boundary (gray), minimizer (black), reach witnesses (red) and,
    when given, the R1/R2/S* regions of a construction (blue/orange)."""
    layers = []
    if input_curves:
        layers.append(("input", GRAY, [c.vertices for c in input_curves], True, None))
    if minimizer_curves:
        layers.append(("minimizer", BLACK, [c.vertices for c in minimizer_curves], True, None))
    segs = [np.asarray(w, dtype=float) for w in witnesses if w is not None]
    if segs:
        layers.append(("witness", RED, segs, False, None))
    if construction is not None:
        layers.append(("R1", BLUE, [construction.R1.outline()], True, None))
        layers.append(("R2", BLUE, [construction.R2.outline()], True, None))
        layers.append(("Sstar", ORANGE, [construction.sstar], True, "#ff7f0e55"))
    Path(path).write_text(render_svg(layers))
