# conditions/sampling.py
"""
Point sampling for structural condition searches.

A search minimizes a vectorized score over a box [low, u_max]^m: a log-spaced lattice first,
then uniform random points, then a hill climb from the worst point found. Growth conditions
also probe rays far outside the box.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from rdlab.config import CHECK_SETTINGS

logger = logging.getLogger(__name__)

# score(points of shape (n, m)) -> shape (n,); lower is worse, negative means violated
Score = Callable[[np.ndarray], np.ndarray]


@dataclass
class SearchResult:
    point: np.ndarray
    score: float
    evaluations: int
    far_field: List[Tuple[float, float]] = field(default_factory=list)


def lattice_axis(low: str, u_max: float, points: int, floor: float) -> np.ndarray:
    """
    Log-spaced coordinates for one lattice axis.

    Args:
        low: "zero" to include 0, "positive" for strictly positive coordinates,
            "one" for coordinates in [1, u_max]
        u_max: Upper end of the axis
        points: Number of coordinates
        floor: Smallest nonzero coordinate relative to u_max
    """
    if low == "one":
        return np.geomspace(1.0, u_max, points)
    if low == "positive":
        return np.geomspace(u_max * floor, u_max, points)
    return np.concatenate([[0.0], np.geomspace(u_max * floor, u_max, points - 1)])


def _lower_bound(low: str, u_max: float, floor: float) -> float:
    return {"zero": 0.0, "positive": u_max * floor, "one": 1.0}[low]


def _evaluate(score: Score, points: np.ndarray, batch_size: int) -> np.ndarray:
    out = np.empty(points.shape[0])
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for start in range(0, points.shape[0], batch_size):
            chunk = score(points[start:start + batch_size])
            out[start:start + batch_size] = np.where(np.isnan(chunk), -np.inf, chunk)
    return out


def search_box(score: Score, m: int, budget: int, rng: np.random.Generator, low: str = "zero",
               pinned: Optional[int] = None, settings: Optional[dict] = None) -> SearchResult:
    """
    Minimize score over [low, u_max]^m, optionally with coordinate `pinned` fixed to 0.

    The lattice takes at most half of the budget; random points fill the rest up to the
    hill-climb allowance. Results are deterministic for a given generator state.
    """
    settings = {**CHECK_SETTINGS, **(settings or {})}
    u_max = float(settings["u_max"])
    floor = float(settings["lattice_floor"])
    steps = int(settings["hill_climb_steps"])
    batch_size = int(settings["batch_size"])
    lower = _lower_bound(low, u_max, floor)

    free = [j for j in range(m) if j != pinned]
    per_axis = int(settings["lattice_points"])
    while per_axis > 2 and per_axis ** len(free) > max(budget // 2, 1):
        per_axis -= 1
    axis = lattice_axis(low, u_max, per_axis, floor)
    grids = np.meshgrid(*([axis] * len(free)), indexing="ij")
    lattice = np.zeros((grids[0].size, m))
    for j, g in zip(free, grids):
        lattice[:, j] = g.ravel()

    n_random = max(budget - lattice.shape[0] - steps, 0)
    random_points = np.zeros((n_random, m))
    random_points[:, free] = rng.uniform(lower, u_max, size=(n_random, len(free)))

    points = np.vstack([lattice, random_points])
    scores = _evaluate(score, points, batch_size)
    best = int(np.argmin(scores))
    x, best_score = points[best].copy(), float(scores[best])

    # Hill climb: multiplicative-scale Gaussian moves, accepted when the score drops
    scale = float(settings["hill_climb_scale"])
    for _ in range(steps):
        step = scale * np.maximum(np.abs(x), u_max * floor) * rng.standard_normal(m)
        candidate = np.clip(x + step, lower, u_max)
        if pinned is not None:
            candidate[pinned] = 0.0
        s = float(_evaluate(score, candidate[None, :], 1)[0])
        if s < best_score:
            x, best_score = candidate, s

    evaluations = points.shape[0] + steps
    logger.debug("Box search: %d evaluations, best score %.6g at %s", evaluations, best_score, x)
    return SearchResult(point=x, score=best_score, evaluations=evaluations)


def ray_directions(m: int, pinned: Optional[int] = None) -> np.ndarray:
    """Unit directions: the diagonal, every axis and every pair of axes."""
    candidates = [np.ones(m)]
    candidates += [np.eye(m)[j] for j in range(m)]
    candidates += [np.eye(m)[a] + np.eye(m)[b] for a, b in itertools.combinations(range(m), 2)]
    directions = []
    for c in candidates:
        c = c.copy()
        if pinned is not None:
            c[pinned] = 0.0
        norm = np.linalg.norm(c)
        if norm > 0:
            directions.append(c / norm)
    return np.unique(np.array(directions), axis=0)


def far_field_probe(score: Score, m: int, pinned: Optional[int] = None,
                    settings: Optional[dict] = None) -> SearchResult:
    """
    Evaluate score along rays at radii u_max * 10^j, j = 0..far_field_decades.

    Returns the worst point and the worst score per radius, in increasing radius order.
    """
    settings = {**CHECK_SETTINGS, **(settings or {})}
    u_max = float(settings["u_max"])
    directions = ray_directions(m, pinned)
    radii = u_max * 10.0 ** np.arange(int(settings["far_field_decades"]) + 1)

    worst_point, worst_score, per_radius = None, np.inf, []
    for r in radii:
        points = r * directions
        scores = _evaluate(score, points, len(points))
        k = int(np.argmin(scores))
        per_radius.append((float(r), float(scores[k])))
        if scores[k] < worst_score:
            worst_point, worst_score = points[k].copy(), float(scores[k])
    return SearchResult(point=worst_point, score=worst_score,
                        evaluations=len(radii) * len(directions), far_field=per_radius)
