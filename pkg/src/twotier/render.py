"""Deterministic SVG drawings of a deployment.

Cells are rasterized from the owner predicate and drawn as run-length
merged rectangles. FCs are stars, APs circles and cell centroids crosses;
strong nodes are filled and weak nodes hollow.
"""
from __future__ import annotations

import colorsys
from pathlib import Path

import numpy as np

from .geometry import owners
from .model import CellMoments, Deployment, Scenario, inside_polygon

CANVAS = 500.0
MARGIN = 20.0


def _palette(n):
    out = []
    for k in range(n):
        r, g, b = colorsys.hls_to_rgb((k * 0.618033988749895) % 1.0, 0.82, 0.55)
        out.append(f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}")
    return out


def _star(cx, cy, r_out, r_in):
    pts = []
    for k in range(10):
        r = r_out if k % 2 == 0 else r_in
        ang = np.pi / 2 + k * np.pi / 5
        pts.append(f"{cx + r * np.cos(ang):.2f},{cy - r * np.sin(ang):.2f}")
    return " ".join(pts)


def render_svg(s: Scenario, d: Deployment, m: CellMoments, resolution: int = 128) -> str:
    xmin, ymin, xmax, ymax = s.bbox
    scale = (CANVAS - 2 * MARGIN) / max(xmax - xmin, ymax - ymin)
    width = (xmax - xmin) * scale + 2 * MARGIN
    height = (ymax - ymin) * scale + 2 * MARGIN

    def X(x):
        return MARGIN + (x - xmin) * scale

    def Y(y):
        return height - MARGIN - (y - ymin) * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" height="{height:.2f}" '
           f'viewBox="0 0 {width:.2f} {height:.2f}">',
           f'<rect x="0" y="0" width="{width:.2f}" height="{height:.2f}" fill="#ffffff"/>']

    colors = _palette(s.n_aps)
    dx, dy = (xmax - xmin) / resolution, (ymax - ymin) / resolution
    xs = xmin + dx * (np.arange(resolution) + 0.5)
    ys = ymin + dy * (np.arange(resolution) + 0.5)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    lab = owners(s, d, pts)
    lab[~inside_polygon(s.omega, pts)] = -1
    lab = lab.reshape(resolution, resolution)
    out.append('<g stroke="none">')
    for row in range(resolution):
        col = 0
        while col < resolution:
            n = lab[row, col]
            end = col
            while end + 1 < resolution and lab[row, end + 1] == n:
                end += 1
            if n >= 0:
                x0 = X(xmin + col * dx)
                y0 = Y(ymin + (row + 1) * dy)
                out.append(f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{(end - col + 1) * dx * scale:.2f}" '
                           f'height="{dy * scale:.2f}" fill="{colors[n]}"/>')
            col = end + 1
    out.append("</g>")

    poly = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in s.omega)
    out.append(f'<polygon points="{poly}" fill="none" stroke="#000000" stroke-width="1.5"/>')

    out.append('<g stroke="#555555" stroke-width="1">')
    for n in range(s.n_aps):
        p, q = d.p[n], d.q[d.t[n]]
        out.append(f'<line x1="{X(p[0]):.2f}" y1="{Y(p[1]):.2f}" x2="{X(q[0]):.2f}" y2="{Y(q[1]):.2f}"/>')
    out.append("</g>")

    out.append('<g stroke="#000000" stroke-width="1.2">')
    for n in range(s.n_aps):
        if np.isnan(m.c[n, 0]):
            continue
        cx, cy = X(m.c[n, 0]), Y(m.c[n, 1])
        out.append(f'<line x1="{cx - 4:.2f}" y1="{cy - 4:.2f}" x2="{cx + 4:.2f}" y2="{cy + 4:.2f}"/>')
        out.append(f'<line x1="{cx - 4:.2f}" y1="{cy + 4:.2f}" x2="{cx + 4:.2f}" y2="{cy - 4:.2f}"/>')
    out.append("</g>")

    strong_aps, strong_fcs = set(s.strong_aps), set(s.strong_fcs)
    for n in range(s.n_aps):
        fill = "#1f4e9c" if n in strong_aps else "#ffffff"
        out.append(f'<circle cx="{X(d.p[n, 0]):.2f}" cy="{Y(d.p[n, 1]):.2f}" r="4.5" '
                   f'fill="{fill}" stroke="#1f4e9c" stroke-width="1.5"/>')
    for k in range(s.n_fcs):
        fill = "#c0392b" if k in strong_fcs else "#ffffff"
        out.append(f'<polygon points="{_star(X(d.q[k, 0]), Y(d.q[k, 1]), 9, 3.6)}" '
                   f'fill="{fill}" stroke="#c0392b" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_deployment_svg(s: Scenario, d: Deployment, m: CellMoments, path, resolution: int = 128) -> Path:
    path = Path(path)
    path.write_text(render_svg(s, d, m, resolution))
    return path
