"""SVG and binary PPM renderings of cylinder discs.

The SVG keeps world coordinates (imaginary axis flipped by the viewBox
transform).  The PPM is white with black discs; a pixel is inked when its
centre lies in a disc, and a disc too small to cover any pixel centre inks
the pixel holding its own centre, so no cylinder disappears.
"""
from __future__ import annotations

import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from .ccf import CylinderSet, Disc

__all__ = ["rasterize", "write_svg", "write_ppm", "render_limit_set"]


def _geometry(width: int, height: int, viewport: Disc):
    scale = min(width, height) / (2 * viewport.radius)       # pixels per unit
    x0 = viewport.center.real - width / (2 * scale)           # world x of the left edge
    y1 = viewport.center.imag + height / (2 * scale)          # world y of the top edge
    return scale, x0, y1


def rasterize(discs: Sequence[Disc], width: int, height: int, viewport: Disc) -> np.ndarray:
    """Boolean ink mask of shape ``(height, width)``."""
    scale, x0, y1 = _geometry(width, height, viewport)
    ink = np.zeros((height, width), dtype=bool)
    for d in discs:
        cx = (d.center.real - x0) * scale
        cy = (y1 - d.center.imag) * scale
        r = d.radius * scale
        c0, c1 = max(int(np.floor(cx - r)), 0), min(int(np.ceil(cx + r)), width - 1)
        r0, r1 = max(int(np.floor(cy - r)), 0), min(int(np.ceil(cy + r)), height - 1)
        hit = False
        if c0 <= c1 and r0 <= r1:
            px = np.arange(c0, c1 + 1) + 0.5
            py = np.arange(r0, r1 + 1) + 0.5
            m = (px[None, :] - cx) ** 2 + (py[:, None] - cy) ** 2 <= r * r
            if m.any():
                ink[r0:r1 + 1, c0:c1 + 1] |= m
                hit = True
        if not hit:
            i, j = int(np.floor(cy)), int(np.floor(cx))
            if 0 <= i < height and 0 <= j < width:
                ink[i, j] = True
    return ink


def write_ppm(path, ink: np.ndarray):
    h, w = ink.shape
    rgb = np.where(ink[..., None], 0, 255).astype(np.uint8).repeat(3, axis=2)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def write_svg(path, discs: Sequence[Disc], width: int, height: int, viewport: Disc):
    scale, x0, y1 = _geometry(width, height, viewport)
    vw, vh = width / scale, height / scale
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{x0!r} {-y1!r} {vw!r} {vh!r}">',
        f'<rect x="{x0!r}" y="{-y1!r}" width="{vw!r}" height="{vh!r}" fill="white"/>',
        '<g fill="black" stroke="none">',
    ]
    for d in discs:
        lines.append(f'<circle cx="{d.center.real!r}" cy="{-d.center.imag!r}" r="{d.radius!r}"/>')
    lines += ["</g>", "</svg>", ""]
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def render_limit_set(cylinders: Sequence[CylinderSet], width: int, height: int, viewport: Disc,
                     svg_path, ppm_path) -> bool:
    """Write both renderings; returns False (and warns) for an empty cylinder list."""
    if not cylinders:
        warnings.warn("no cylinders to render", stacklevel=2)
        return False
    discs = [c.image for c in cylinders]
    write_svg(svg_path, discs, width, height, viewport)
    write_ppm(ppm_path, rasterize(discs, width, height, viewport))
    return True
