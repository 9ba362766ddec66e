"""Static SVG figures for experiment grids (no plotting library needed)."""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Mapping, Sequence

DISPLAY_CAP = 1.5

_FONT = {"font-family": "sans-serif", "font-size": "11"}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _color(value: float) -> str:
    """White-to-red ramp over [0, DISPLAY_CAP]; NaN is grey."""
    if not math.isfinite(value):
        return "#bbbbbb"
    t = min(max(value / DISPLAY_CAP, 0.0), 1.0)
    g = int(round(255 * (1 - t)))
    return f"#ff{g:02x}{g:02x}" if t < 1 else "#b00000"


def _text(parent, x, y, s, anchor="middle", **extra):
    el = ET.SubElement(parent, "text", x=_fmt(x), y=_fmt(y), **{"text-anchor": anchor}, **_FONT, **extra)
    el.text = s
    return el


def _write(root: ET.Element, path) -> None:
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)


def heatmap_panels(panels: Mapping[str, Mapping[tuple, float]], rows: Sequence[float],
                   cols: Sequence[int], title: str, path, row_label="sigma", col_label="N") -> None:
    """One heatmap per panel, side by side; ``panels[name][(row, col)] = value``."""
    cell, left, top = 44, 60, 40
    pw = len(cols) * cell + left + 20
    width = pw * len(panels)
    height = top + len(rows) * cell + 50
    root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                      width=str(width), height=str(height))
    _text(root, width / 2, 16, title)
    for p, (name, values) in enumerate(panels.items()):
        ox = p * pw + left
        _text(root, ox + len(cols) * cell / 2, 32, name)
        for i, r in enumerate(rows):
            _text(root, ox - 6, top + i * cell + cell / 2 + 4, f"{r:g}", anchor="end")
            for j, c in enumerate(cols):
                v = values.get((r, c), math.nan)
                x, y = ox + j * cell, top + i * cell
                ET.SubElement(root, "rect", {"class": "cell"}, x=_fmt(x), y=_fmt(y),
                              width=str(cell), height=str(cell), fill=_color(v), stroke="#ffffff")
                label = "nan" if not math.isfinite(v) else (f">{DISPLAY_CAP:g}" if v > DISPLAY_CAP else f"{v:.2f}")
                _text(root, x + cell / 2, y + cell / 2 + 4, label)
        for j, c in enumerate(cols):
            _text(root, ox + j * cell + cell / 2, top + len(rows) * cell + 14, str(c))
        _text(root, ox + len(cols) * cell / 2, top + len(rows) * cell + 32, col_label)
        _text(root, ox - 40, top - 8, row_label)
    _write(root, path)


def bar_panel(values: Mapping[tuple, float], sigmas: Sequence[float], lambdas: Sequence[float],
              metric: str, path) -> None:
    """Values for a sigma x lambda grid: one row per sigma, value on the horizontal axis.

    Each cell is a horizontal bar centred on its value whose length grows
    with the discrepancy ``1 - lambda``. Values above the display cap are
    drawn at the cap with an overflow marker.
    """
    scale, left, top, row_h = 300.0, 70, 40, 36
    width = int(left + DISPLAY_CAP * scale + 60)
    height = top + len(sigmas) * row_h + 50
    root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                      width=str(width), height=str(height))
    _text(root, width / 2, 16, f"{metric} by sigma (rows) and lambda (bar length)")
    axis_y = top + len(sigmas) * row_h
    ET.SubElement(root, "line", x1=str(left), y1=str(axis_y), x2=_fmt(left + DISPLAY_CAP * scale),
                  y2=str(axis_y), stroke="black")
    for k in range(4):
        v = k * 0.5
        _text(root, left + v * scale, axis_y + 14, f"{v:g}")
    _text(root, left + DISPLAY_CAP * scale / 2, axis_y + 32, metric)
    for i, s in enumerate(sigmas):
        cy = top + i * row_h + row_h / 2
        _text(root, left - 8, cy + 4, f"{s:g}", anchor="end")
        for lam in lambdas:
            v = values.get((s, lam), math.nan)
            shown = min(v, DISPLAY_CAP) if math.isfinite(v) else 0.0
            half = 4 + 60 * (1 - lam)
            x0 = max(left + shown * scale - half, left)
            ET.SubElement(root, "rect", {"class": "cell"}, x=_fmt(x0), y=_fmt(cy - 3),
                          width=_fmt(2 * half), height="6", fill=_color(v), stroke="#333333",
                          **{"stroke-width": "0.5", "fill-opacity": "0.6"})
            if math.isfinite(v) and v > DISPLAY_CAP:
                xc = left + DISPLAY_CAP * scale
                ET.SubElement(root, "polygon", {"class": "overflow"},
                              points=f"{xc:.2f},{cy - 6:.2f} {xc + 8:.2f},{cy:.2f} {xc:.2f},{cy + 6:.2f}",
                              fill="black")
    _write(root, path)
