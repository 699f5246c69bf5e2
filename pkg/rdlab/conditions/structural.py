# conditions/structural.py
"""
Sampled checks of the structural hypotheses on a reaction network.

Each check returns a CheckResult and never raises. Margins are signed slacks at the witness
(the worst point found): a point violates a condition when its margin is below -tol, with
tol = tolerance * (1 + |f(u)|_inf) for sign conditions and tolerance * M for growth bounds.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from rdlab.conditions.registry import condition
from rdlab.conditions.sampling import SearchResult, far_field_probe, search_box
from rdlab.config import CHECK_SETTINGS
from rdlab.networks.model import ReactionNetwork

logger = logging.getLogger(__name__)

# quantities(states (n, m)) -> (margin, tol, value), each of shape (n,)
Quantities = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass
class CheckResult:
    """Outcome of one structural check. holds is None for informational checks."""

    name: str
    label: str
    holds: Optional[bool]
    margin: Optional[float]
    witness: Optional[np.ndarray]
    value: Optional[float]
    fitted: Optional[float] = None
    evaluations: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "label": self.label,
            "holds": self.holds,
            "margin": self.margin,
            "witness": None if self.witness is None else [float(x) for x in self.witness],
            "value": self.value,
            "fitted": self.fitted,
            "evaluations": self.evaluations,
            "details": self.details,
        }


def _settings(settings: Optional[dict]) -> dict:
    return {**CHECK_SETTINGS, **(settings or {})}


def _budget(search_budget: Optional[int], settings: dict) -> int:
    return int(search_budget if search_budget is not None else settings["search_budget"])


def _sign_tolerance(f: np.ndarray, settings: dict) -> np.ndarray:
    return settings["tolerance"] * (1.0 + np.max(np.abs(f), axis=0))


def _scored(quantities: Quantities) -> Callable[[np.ndarray], np.ndarray]:
    def score(points: np.ndarray) -> np.ndarray:
        margin, tol, _ = quantities(points)
        return margin + tol
    return score


def _at_witness(name: str, label: str, quantities: Quantities, found: SearchResult,
                evaluations: int) -> CheckResult:
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        margin, tol, value = (float(q[0]) for q in quantities(found.point[None, :]))
    holds = bool(margin >= -tol)
    return CheckResult(name=name, label=label, holds=holds, margin=margin, witness=found.point,
                       value=value, evaluations=evaluations, details={"tolerance": tol})


def _sum_sign_check(net: ReactionNetwork, sign: float, budget: int, settings: dict,
                    name: str, label: str) -> CheckResult:
    """Search for points where sign * sum_i f_i(u) > tol."""
    def quantities(points):
        f = net.rates(points.T)
        total = f.sum(axis=0)
        return -sign * total, _sign_tolerance(f, settings), total

    rng = np.random.default_rng(settings["seed"])
    found = search_box(_scored(quantities), net.species_count, budget, rng, settings=settings)
    return _at_witness(name, label, quantities, found, found.evaluations)


@condition(
    name="quasi_positivity",
    label="(3)",
    description="f_i(u) >= 0 whenever u >= 0 and u_i = 0",
    theorem=True,
)
def check_quasi_positivity(net: ReactionNetwork, search_budget: Optional[int] = None,
                           settings: Optional[dict] = None) -> CheckResult:
    settings = _settings(settings)
    m = net.species_count
    per_species = max(_budget(search_budget, settings) // m, 1)

    worst, evaluations = None, 0
    for i in range(m):
        def quantities(points, i=i):
            f = net.rates(points.T)
            return f[i], _sign_tolerance(f, settings), f[i]

        rng = np.random.default_rng([settings["seed"], i])
        found = search_box(_scored(quantities), m, per_species, rng, pinned=i, settings=settings)
        evaluations += found.evaluations
        result = _at_witness("quasi_positivity", "(3)", quantities, found, 0)
        result.details["species"] = net.species[i]
        if worst is None or result.margin + result.details["tolerance"] < \
                worst.margin + worst.details["tolerance"]:
            worst = result
    worst.evaluations = evaluations
    return worst


@condition(
    name="mass_dissipation",
    label="(4)",
    description="sum_i f_i(u) <= 0 for u >= 0",
    theorem=True,
)
def check_mass_dissipation(net: ReactionNetwork, search_budget: Optional[int] = None,
                           settings: Optional[dict] = None) -> CheckResult:
    settings = _settings(settings)
    return _sum_sign_check(net, 1.0, _budget(search_budget, settings), settings,
                           "mass_dissipation", "(4)")


@condition(
    name="mass_conservation",
    label="(7)",
    description="sum_i f_i(u) = 0 for u >= 0",
)
def check_mass_conservation(net: ReactionNetwork, search_budget: Optional[int] = None,
                            settings: Optional[dict] = None) -> CheckResult:
    """
    Two one-sided searches: the mass dissipation search (same seed, same points) and its mirror.
    Conservation therefore never holds where dissipation fails.
    """
    settings = _settings(settings)
    budget = _budget(search_budget, settings)
    dissipation = _sum_sign_check(net, 1.0, budget, settings, "mass_conservation", "(7)")
    accumulation = _sum_sign_check(net, -1.0, budget, settings, "mass_conservation", "(7)")
    worse = min(dissipation, accumulation, key=lambda r: r.margin + r.details["tolerance"])
    # Report the conservation margin -|sum f| at the witness
    worse.margin = -abs(worse.value)
    worse.holds = dissipation.holds and accumulation.holds
    worse.evaluations = dissipation.evaluations + accumulation.evaluations
    return worse


@condition(
    name="entropy_dissipation",
    label="(8)",
    description="sum_i f_i(u) log u_i <= 0 for u > 0",
    theorem=True,
)
def check_entropy_dissipation(net: ReactionNetwork, search_budget: Optional[int] = None,
                              settings: Optional[dict] = None) -> CheckResult:
    settings = _settings(settings)

    def quantities(points):
        f = net.rates(points.T)
        production = np.sum(f * np.log(points.T), axis=0)
        return -production, _sign_tolerance(f, settings), production

    rng = np.random.default_rng(settings["seed"])
    found = search_box(_scored(quantities), net.species_count, _budget(search_budget, settings), rng,
                       low="positive", settings=settings)
    return _at_witness("entropy_dissipation", "(8)", quantities, found, found.evaluations)


def _growth_check(net: ReactionNetwork, ratio: Callable[[np.ndarray], np.ndarray], budget: int,
                  settings: dict, name: str, label: str) -> CheckResult:
    """
    Fit the smallest M with ratio(u) <= M over the box and along far-field rays.
    Holds when the fitted M is at most the declared growth constant times (1 + tolerance).
    """
    M = net.growth_constant
    tol = settings["tolerance"] * M

    def score(points):
        return -ratio(points)

    rng = np.random.default_rng(settings["seed"])
    box = search_box(score, net.species_count, budget, rng, settings=settings)
    far = far_field_probe(score, net.species_count, settings=settings)
    worst = box if box.score <= far.score else far

    fitted = -worst.score
    far_ratios = [(r, -s) for r, s in far.far_field]
    tail = [v for _, v in far_ratios[-4:]]
    growing = bool(len(tail) > 1 and all(b > a * (1 + 1e-6) for a, b in zip(tail, tail[1:])))
    if growing:
        logger.info("%s for '%s': ratio keeps growing along far-field rays", label, net.name)
    return CheckResult(
        name=name,
        label=label,
        holds=bool(np.isfinite(fitted) and fitted <= M + tol),
        margin=M - fitted,
        witness=worst.point,
        value=fitted,
        fitted=fitted,
        evaluations=box.evaluations + far.evaluations,
        details={"tolerance": tol, "declared_M": M, "far_field": far_ratios, "growing": growing},
    )


def gradient_growth_ratio(net: ReactionNetwork, points: np.ndarray) -> np.ndarray:
    """max_i |grad f_i(u)|_2 / (1 + |u|_2) for points of shape (n, m)."""
    jac = net.jacobian(points.T)
    gradient_norms = np.sqrt(np.sum(jac ** 2, axis=1))
    return np.max(gradient_norms, axis=0) / (1.0 + np.linalg.norm(points, axis=1))


def alt_growth_ratios(net: ReactionNetwork, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    The two parts of the weaker growth condition, as ratios to be bounded by M.

    Returns:
        (max_i |f_i(u)| / (1 + |u|^2), max_ij (-df_i/du_j) / (1 + |u|))
    """
    norm = np.linalg.norm(points, axis=1)
    f = net.rates(points.T)
    jac = net.jacobian(points.T)
    value_ratio = np.max(np.abs(f), axis=0) / (1.0 + norm ** 2)
    slope_ratio = np.max(-jac.reshape(-1, points.shape[0]), axis=0) / (1.0 + norm)
    return value_ratio, np.maximum(slope_ratio, 0.0)


@condition(
    name="gradient_growth",
    label="(9)",
    description="|grad f_i(u)| <= M (1 + |u|), Euclidean norms",
    theorem=True,
)
def check_gradient_growth(net: ReactionNetwork, search_budget: Optional[int] = None,
                          settings: Optional[dict] = None) -> CheckResult:
    settings = _settings(settings)
    return _growth_check(net, lambda p: gradient_growth_ratio(net, p), _budget(search_budget, settings),
                         settings, "gradient_growth", "(9)")


@condition(
    name="alt_growth_9prime",
    label="(9')",
    description="|f_i(u)| <= M (1 + |u|^2) and df_i/du_j >= -M (1 + |u|)",
)
def check_9prime(net: ReactionNetwork, search_budget: Optional[int] = None,
                 settings: Optional[dict] = None) -> CheckResult:
    settings = _settings(settings)

    def ratio(points):
        return np.maximum(*alt_growth_ratios(net, points))

    result = _growth_check(net, ratio, _budget(search_budget, settings), settings,
                           "alt_growth_9prime", "(9')")
    with np.errstate(over="ignore", invalid="ignore"):
        value_part, slope_part = (float(r[0]) for r in alt_growth_ratios(net, result.witness[None, :]))
    result.details["failing_part"] = None if result.holds else (
        "value" if value_part >= slope_part else "jacobian")
    return result


@condition(
    name="entropy_variant",
    label="(8')",
    description="sum_i f_i(u)(1 + log u_i) <= C sum_i u_i log(1 + u_i) for u_i >= 1; C is fitted",
)
def check_entropy_variant(net: ReactionNetwork, search_budget: Optional[int] = None,
                          settings: Optional[dict] = None) -> CheckResult:
    """Informational: reports the fitted constant C, no pass/fail threshold."""
    settings = _settings(settings)

    def ratio(points):
        f = net.rates(points.T)
        numerator = np.sum(f * (1.0 + np.log(points.T)), axis=0)
        return numerator / np.sum(points.T * np.log1p(points.T), axis=0)

    rng = np.random.default_rng(settings["seed"])
    found = search_box(lambda p: -ratio(p), net.species_count, _budget(search_budget, settings), rng,
                       low="one", settings=settings)
    fitted = -found.score
    return CheckResult(name="entropy_variant", label="(8')", holds=None, margin=None,
                       witness=found.point, value=fitted, fitted=fitted, evaluations=found.evaluations)
