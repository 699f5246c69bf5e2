# plots.py
"""Static SVG line plots: one polyline per series, a frame, and min/max tick labels."""

import logging
import os
from typing import Dict, Sequence, Tuple

import numpy as np

from rdlab.config import OUTPUT_SETTINGS
from rdlab.errors import PersistenceError
from rdlab.simulator import Trajectory

logger = logging.getLogger(__name__)

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
MARGIN = 50


def _scale(values: np.ndarray, low: float, high: float, start: float, stop: float) -> np.ndarray:
    span = high - low if high > low else 1.0
    return start + (values - low) / span * (stop - start)


def render_svg(series: Dict[str, Tuple[Sequence[float], Sequence[float]]], title: str = "",
               xlabel: str = "t", width: int = None, height: int = None) -> str:
    """SVG document text for the given {label: (x, y)} series; non-finite points are dropped."""
    width = width or OUTPUT_SETTINGS["svg_width"]
    height = height or OUTPUT_SETTINGS["svg_height"]
    cleaned = {}
    for label, (x, y) in series.items():
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        cleaned[label] = (x[keep], y[keep])
    xs = np.concatenate([x for x, _ in cleaned.values()] or [np.zeros(1)])
    ys = np.concatenate([y for _, y in cleaned.values()] or [np.zeros(1)])
    x_lo, x_hi = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    y_lo, y_hi = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)

    left, right, top, bottom = MARGIN, width - MARGIN // 2, MARGIN // 2 + 10, height - MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
        f'fill="none" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{top - 8}" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{(left + right) / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="{left}" y="{bottom + 16}" font-size="10">{x_lo:.4g}</text>',
        f'<text x="{right}" y="{bottom + 16}" text-anchor="end" font-size="10">{x_hi:.4g}</text>',
        f'<text x="{left - 4}" y="{bottom}" text-anchor="end" font-size="10">{y_lo:.4g}</text>',
        f'<text x="{left - 4}" y="{top + 10}" text-anchor="end" font-size="10">{y_hi:.4g}</text>',
    ]
    for i, (label, (x, y)) in enumerate(cleaned.items()):
        color = PALETTE[i % len(PALETTE)]
        px = _scale(x, x_lo, x_hi, left, right)
        py = _scale(y, y_lo, y_hi, bottom, top)
        points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        parts.append(f'<text x="{right - 4}" y="{top + 14 * (i + 1)}" text-anchor="end" '
                     f'font-size="11" fill="{color}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path: str, series: Dict[str, Tuple[Sequence[float], Sequence[float]]], title: str = "",
              xlabel: str = "t") -> str:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render_svg(series, title, xlabel))
    except OSError as e:
        raise PersistenceError(f"Cannot write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def trajectory_plots(trajectory: Trajectory, out_dir: str) -> Dict[str, str]:
    """mass.svg, entropy.svg and sup_norm.svg against time."""
    t = trajectory.times
    sup = {s: (t, [r.norms[i].c0 for r in trajectory.diagnostics]) for i, s in enumerate(trajectory.species)}
    return {
        "mass": write_svg(os.path.join(out_dir, "mass.svg"), {"mass": (t, trajectory.masses)}, "Total mass"),
        "entropy": write_svg(os.path.join(out_dir, "entropy.svg"), {"entropy": (t, trajectory.entropies)},
                             "Entropy sum (1+u) log(1+u)"),
        "sup_norm": write_svg(os.path.join(out_dir, "sup_norm.svg"), sup, "Sup norm per species"),
    }
