#!/usr/bin/env python3
"""
plots.py

Illustrative PNG figures drawn with Pillow:
- Delta(z) along the real momentum axis with the +-1 levels
- the comb: vertical slits of height h_n at pi n
- v(t + i0) on each computed gap
"""

from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np
from loguru import logger
from PIL import Image, ImageDraw

from spectrum import BandStructure

SIZE = (960, 540)
MARGIN = 48
BACKGROUND = (255, 255, 255)
AXIS = (90, 90, 90)
CURVE = (31, 119, 180)
ACCENT = (214, 39, 40)


class _Canvas:
    """Maps data coordinates to pixels on a white RGB image."""

    def __init__(self, xlim: Tuple[float, float], ylim: Tuple[float, float], size=SIZE):
        self.image = Image.new("RGB", size, color=BACKGROUND)
        self.draw = ImageDraw.Draw(self.image)
        self.size = size
        x0, x1 = xlim
        y0, y1 = ylim
        self.xlim = (x0, x1 if x1 > x0 else x0 + 1.0)
        self.ylim = (y0, y1 if y1 > y0 else y0 + 1.0)

    def px(self, x, y):
        w, h = self.size
        (x0, x1), (y0, y1) = self.xlim, self.ylim
        u = MARGIN + (np.asarray(x) - x0) / (x1 - x0) * (w - 2 * MARGIN)
        v = h - MARGIN - (np.asarray(y) - y0) / (y1 - y0) * (h - 2 * MARGIN)
        return u, v

    def polyline(self, x, y, color=CURVE, width=2):
        u, v = self.px(x, y)
        self.draw.line(list(zip(u.tolist(), v.tolist())), fill=color, width=width)

    def segment(self, p, q, color=AXIS, width=1):
        u0, v0 = self.px(*p)
        u1, v1 = self.px(*q)
        self.draw.line([(float(u0), float(v0)), (float(u1), float(v1))], fill=color, width=width)

    def frame(self, title: str):
        w, h = self.size
        self.draw.rectangle([MARGIN, MARGIN, w - MARGIN, h - MARGIN], outline=AXIS)
        self.draw.text((MARGIN, 12), title, fill=AXIS)
        (x0, x1), (y0, y1) = self.xlim, self.ylim
        self.draw.text((MARGIN, h - MARGIN + 8), f"{x0:.3g}", fill=AXIS)
        self.draw.text((w - MARGIN - 40, h - MARGIN + 8), f"{x1:.3g}", fill=AXIS)
        self.draw.text((4, h - MARGIN - 6), f"{y0:.3g}", fill=AXIS)
        self.draw.text((4, MARGIN - 6), f"{y1:.3g}", fill=AXIS)

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.image.save(path)
        logger.info(f"Saved plot {path}")
        return path


def plot_lyapunov(z: Sequence[float], delta: Sequence[float], path: Union[str, Path]) -> Path:
    """Delta on the real axis, clipped to [-3, 3]."""
    z = np.asarray(z, dtype=float)
    d = np.clip(np.asarray(delta, dtype=float), -3.0, 3.0)
    canvas = _Canvas((float(z[0]), float(z[-1])), (-3.0, 3.0))
    for level in (-1.0, 1.0):
        canvas.segment((z[0], level), (z[-1], level), color=ACCENT)
    canvas.segment((z[0], 0.0), (z[-1], 0.0))
    canvas.polyline(z, d)
    canvas.frame("Lyapunov function on the real momentum axis")
    return canvas.save(path)


def plot_comb(bands: BandStructure, path: Union[str, Path]) -> Path:
    """Slits {pi n + i y : |y| <= h_n} of the quasimomentum domain."""
    n = np.arange(1, bands.n_gaps + 1)
    top = max(float(np.max(bands.h)) if bands.h.size else 0.0, 1e-3) * 1.2
    canvas = _Canvas((0.0, np.pi * (bands.n_gaps + 1)), (-top, top))
    canvas.segment((0.0, 0.0), (np.pi * (bands.n_gaps + 1), 0.0))
    for k, h in zip(n, bands.h):
        if h > 0:
            canvas.segment((np.pi * k, -h), (np.pi * k, h), color=CURVE, width=3)
    canvas.frame("Comb: slits of height h_n at pi n")
    return canvas.save(path)


def plot_gap_v(bands: BandStructure, path: Union[str, Path]) -> Path:
    """v(t + i0) on every resolved gap from the quadrature tables."""
    tables = bands.live_tables()
    top = max((float(np.max(t.v)) for t in tables), default=1e-3) * 1.2
    xmax = float(bands.e_plus[-1]) + 1.0
    canvas = _Canvas((0.0, xmax), (0.0, top))
    for t in tables:
        xs = np.concatenate([[t.e_plus], t.nodes, [t.e_minus]])
        vs = np.concatenate([[0.0], t.v, [0.0]])
        canvas.polyline(xs, vs)
    canvas.frame("v(t + i0) on the gaps")
    return canvas.save(path)
