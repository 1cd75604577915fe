"""Dependency-free SVG rendering of grid snapshots."""

from __future__ import annotations

import numpy as np


def _diverging_color(x: float) -> str:
    """x ∈ [−1, 1] → blue/white/red hex color."""
    x = max(-1.0, min(1.0, x))
    if x < 0.0:
        r, g, b = 1.0 + x, 1.0 + x, 1.0
    else:
        r, g, b = 1.0, 1.0 - x, 1.0 - x
    return "#{:02x}{:02x}{:02x}".format(int(255 * r + 0.5), int(255 * g + 0.5),
                                        int(255 * b + 0.5))


def render_snapshot_svg(path: str, grid, u: np.ndarray, u_center: float,
                        title: str = "") -> None:
    """Flat-shaded plot of u over the physical grid cells (center fan plus
    quadrilateral rings), written atomically enough for our purposes."""
    size, margin = 540.0, 20.0
    pts = np.concatenate([grid.xy.reshape(-1, 2), grid.center[None, :]])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-30))
    scale = (size - 2.0 * margin) / span

    def sxy(p) -> str:
        x = margin + (p[0] - lo[0]) * scale
        y = size - margin - (p[1] - lo[1]) * scale
        return f"{x:.2f},{y:.2f}"

    umax = float(max(np.max(np.abs(u)), abs(u_center), 1e-12))
    cells = []
    for j in range(grid.n_phi):
        jn = (j + 1) % grid.n_phi
        cells.append(([grid.center, grid.xy[0, j], grid.xy[0, jn]],
                      (u_center + u[0, j] + u[0, jn]) / 3.0))
        for i in range(grid.n_r - 1):
            cells.append(([grid.xy[i, j], grid.xy[i + 1, j],
                           grid.xy[i + 1, jn], grid.xy[i, jn]],
                          (u[i, j] + u[i + 1, j] + u[i + 1, jn] + u[i, jn]) / 4.0))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" '
             f'height="{size:.0f}" viewBox="0 0 {size:.0f} {size:.0f}">']
    if title:
        parts.append(f"<title>{title}</title>")
    for poly, val in cells:
        color = _diverging_color(val / umax)
        points = " ".join(sxy(p) for p in poly)
        parts.append(f'<polygon points="{points}" fill="{color}" stroke="none"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
