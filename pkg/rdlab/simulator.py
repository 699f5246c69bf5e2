# simulator.py
"""
Time integration of u_t - d_i Delta u_i = f_i(u) on a Neumann box.

Strang splitting: half a step of exact spectral diffusion, one Heun step of the reaction,
another half step of diffusion. Positivity and step size are controlled by rejection: a
proposal with values below -tol_neg, a sup-norm change above the configured fraction or any
non-finite value is discarded and retried with half the step. Nothing is ever clipped.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from rdlab.callbacks import Events, callbacks
from rdlab.config import BENCHMARK, SOLVER_SETTINGS, UI_SETTINGS
from rdlab.errors import BlowupSuspectedError, NonFiniteStateError, ValidationError
from rdlab.grid import (
    Field,
    Grid,
    NormTriple,
    cosine_transform,
    heat_multipliers,
    inverse_cosine_transform,
    norm_components,
)
from rdlab.networks.model import ReactionNetwork
from rdlab.networks.registry import get_network

logger = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    """Everything simulate() needs. Solver controls default to SOLVER_SETTINGS."""

    network: ReactionNetwork
    diffusivities: Tuple[float, ...]
    grid: Grid
    initial_data: Tuple[Field, ...]
    t_end: float
    dt_init: float = SOLVER_SETTINGS["dt_init"]
    dt_min: float = SOLVER_SETTINGS["dt_min"]
    dt_max: float = SOLVER_SETTINGS["dt_max"]
    snapshot_stride: float = SOLVER_SETTINGS["snapshot_stride"]
    growth_factor: float = SOLVER_SETTINGS["growth_factor"]
    growth_interval: int = SOLVER_SETTINGS["growth_interval"]
    max_relative_change: float = SOLVER_SETTINGS["max_relative_change"]
    negativity_factor: float = SOLVER_SETTINGS["negativity_factor"]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        m = self.network.species_count
        self.diffusivities = tuple(float(d) for d in self.diffusivities)
        self.initial_data = tuple(self.initial_data)
        if len(self.diffusivities) != m:
            raise ValidationError(f"Need {m} diffusivities, got {len(self.diffusivities)}")
        if any(not np.isfinite(d) or d <= 0 for d in self.diffusivities):
            raise ValidationError(f"Diffusivities must be strictly positive, got {self.diffusivities}")
        if len(self.initial_data) != m:
            raise ValidationError(f"Need {m} initial fields, got {len(self.initial_data)}")
        for name, u0 in zip(self.network.species, self.initial_data):
            if u0.grid != self.grid:
                raise ValidationError(f"Initial data of {name} lives on a different grid")
            if u0.min() < 0:
                raise ValidationError(f"Initial data of {name} is negative somewhere (min {u0.min()})")
            if u0.max() == 0:
                raise ValidationError(f"Initial data of {name} is identically zero")
        if not np.isfinite(self.t_end) or self.t_end <= 0:
            raise ValidationError(f"t_end must be positive, got {self.t_end}")
        if not 0 < self.dt_min <= self.dt_max:
            raise ValidationError(f"Need 0 < dt_min <= dt_max, got {self.dt_min}, {self.dt_max}")
        if self.dt_init <= 0:
            raise ValidationError(f"dt_init must be positive, got {self.dt_init}")
        if self.snapshot_stride <= 0:
            raise ValidationError(f"snapshot_stride must be positive, got {self.snapshot_stride}")

    @property
    def initial_values(self) -> np.ndarray:
        return np.stack([u0.values for u0 in self.initial_data])

    def snapshot_times(self) -> np.ndarray:
        """Uniform snapshot mesh ending exactly at t_end, spacing at most snapshot_stride."""
        intervals = max(int(math.ceil(self.t_end / self.snapshot_stride - 1e-9)), 1)
        return np.linspace(0.0, self.t_end, intervals + 1)


@dataclass
class DiagnosticRecord:
    time: float
    mass: float
    entropy: float
    norms: Tuple[NormTriple, ...]
    min_value: float

    def to_row(self) -> List[float]:
        row = [self.time, self.mass, self.entropy]
        for n in self.norms:
            row += [n.c0, n.c1]
        return row + [self.min_value]


@dataclass
class Trajectory:
    """Snapshots of a run: states has shape (n_times, m, *grid.shape)."""

    grid: Grid
    species: Tuple[str, ...]
    diffusivities: Tuple[float, ...]
    times: np.ndarray
    states: np.ndarray
    diagnostics: List[DiagnosticRecord]
    completed: bool = True
    stats: Dict[str, Any] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)
    network: Optional[ReactionNetwork] = None

    @property
    def species_count(self) -> int:
        return len(self.species)

    def fields(self, index: int) -> List[Field]:
        return [Field(self.grid, u) for u in self.states[index]]

    @property
    def masses(self) -> np.ndarray:
        return np.array([r.mass for r in self.diagnostics])

    @property
    def entropies(self) -> np.ndarray:
        return np.array([r.entropy for r in self.diagnostics])

    def sup_norm(self) -> float:
        """||u||_{0,T}: max over snapshots and species of the sup norm."""
        return float(np.max(np.abs(self.states)))

    def diagnostics_header(self) -> List[str]:
        header = ["time", "mass", "entropy"]
        for s in self.species:
            header += [f"{s}_c0", f"{s}_c1"]
        return header + ["min_value"]


def entropy_density(values: np.ndarray) -> np.ndarray:
    """(1 + u) log(1 + u), pointwise."""
    values = np.asarray(values, dtype=float)
    return (1.0 + values) * np.log1p(values)


def diagnostics(state: Sequence[Field], t: float = 0.0) -> DiagnosticRecord:
    """Mass, entropy, per-species norms and global minimum of one state."""
    grid = state[0].grid
    values = np.stack([u.values for u in state])
    return _diagnostics(values, grid, t)


def _diagnostics(values: np.ndarray, grid: Grid, t: float) -> DiagnosticRecord:
    cell = grid.cell_volume
    c0, c1, c2 = norm_components(values, grid)
    return DiagnosticRecord(
        time=float(t),
        mass=float(values.sum() * cell),
        entropy=float(entropy_density(values).sum() * cell),
        norms=tuple(NormTriple(float(a), float(b), float(c)) for a, b, c in zip(c0, c1, c2)),
        min_value=float(values.min()),
    )


class SplittingStepper:
    """Strang-split diffusion/reaction steps for one network, grid and set of diffusivities."""

    def __init__(self, network: ReactionNetwork, diffusivities: Sequence[float], grid: Grid):
        self.network = network
        self.diffusivities = np.asarray(diffusivities, dtype=float)
        self.grid = grid
        self._multipliers: Dict[float, np.ndarray] = {}

    def _half_diffusion(self, values: np.ndarray, dt: float) -> np.ndarray:
        multipliers = self._multipliers.get(dt)
        if multipliers is None:
            if len(self._multipliers) > 64:
                self._multipliers.clear()
            multipliers = heat_multipliers(self.grid, self.diffusivities, 0.5 * dt)
            self._multipliers[dt] = multipliers
        return inverse_cosine_transform(cosine_transform(values, self.grid) * multipliers, self.grid)

    def _reaction(self, values: np.ndarray, dt: float) -> np.ndarray:
        # Heun: explicit trapezoid
        k1 = self.network.rates(values)
        k2 = self.network.rates(values + dt * k1)
        return values + 0.5 * dt * (k1 + k2)

    def step(self, values: np.ndarray, dt: float) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            half = self._half_diffusion(values, dt)
            reacted = self._reaction(half, dt)
            return self._half_diffusion(reacted, dt)


def step(state: Sequence[Field], dt: float, network: ReactionNetwork,
         diffusivities: Sequence[float]) -> List[Field]:
    """One Strang step on species fields. No acceptance test is made here."""
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    grid = state[0].grid
    values = np.stack([u.values for u in state])
    if values.min() < 0:
        raise ValidationError("State must be nonnegative")
    new = SplittingStepper(network, diffusivities, grid).step(values, dt)
    return [Field(grid, u) for u in new]


def _rejection(old: np.ndarray, new: np.ndarray, config: SolverConfig) -> Optional[str]:
    if not np.all(np.isfinite(new)):
        return "non-finite"
    sup_old = float(np.max(np.abs(old)))
    if new.min() < -config.negativity_factor * sup_old:
        return "negative"
    sup_new = float(np.max(np.abs(new)))
    if abs(sup_new - sup_old) > config.max_relative_change * max(sup_old, np.finfo(float).tiny):
        return "sup-change"
    return None


def simulate(config: SolverConfig, progress: Optional[bool] = None) -> Trajectory:
    """
    Integrate to config.t_end, recording a snapshot on a uniform mesh.

    Raises:
        BlowupSuspectedError: dt fell below dt_min; the error carries the trajectory so far
        NonFiniteStateError: the same, when the last rejected proposals were non-finite
    """
    progress = UI_SETTINGS["progress"] if progress is None else progress
    grid, net = config.grid, config.network
    stepper = SplittingStepper(net, config.diffusivities, grid)
    snapshot_times = config.snapshot_times()

    values = config.initial_values
    times, states, records = [0.0], [values.copy()], [_diagnostics(values, grid, 0.0)]
    stats = {"accepted": 0, "rejected": 0, "rejections": {}, "dt_final": None, "wall_time": None}
    started = time.time()
    callbacks.trigger(Events.RUN_START, network=net.name, t_end=config.t_end, grid=grid)
    logger.info("Simulating '%s' on %s to T=%g", net.name, grid.points, config.t_end)

    def partial(completed: bool) -> Trajectory:
        stats["wall_time"] = time.time() - started
        return Trajectory(grid=grid, species=net.species, diffusivities=config.diffusivities,
                          times=np.array(times), states=np.stack(states), diagnostics=records,
                          completed=completed, stats=stats, metadata=dict(config.metadata),
                          network=net)

    t, dt, streak = 0.0, min(config.dt_init, config.dt_max), 0
    bar = tqdm(total=len(snapshot_times) - 1, desc=f"simulate {net.name}", disable=not progress, leave=False)
    for target in snapshot_times[1:]:
        while t < target:
            h = min(dt, target - t)
            proposal = stepper.step(values, h)
            reason = _rejection(values, proposal, config)
            if reason is not None:
                stats["rejected"] += 1
                stats["rejections"][reason] = stats["rejections"].get(reason, 0) + 1
                callbacks.trigger(Events.STEP_REJECTED, time=t, dt=h, reason=reason)
                dt, streak = h / 2.0, 0
                if dt < config.dt_min:
                    bar.close()
                    message = (f"dt underflow at t={t:.6g} (dt={dt:.3g} < dt_min={config.dt_min:g}, "
                               f"last rejection: {reason})")
                    logger.warning(message)
                    error_cls = NonFiniteStateError if reason == "non-finite" else BlowupSuspectedError
                    raise error_cls(message, trajectory=partial(False))
                continue

            values = proposal
            stats["accepted"] += 1
            if h < dt:
                # Clipped to reach the snapshot: the last step lands on target exactly
                t = float(target)
            else:
                t = t + h
                if target - t <= 1e-12 * config.t_end:
                    t = float(target)
            streak += 1
            if streak >= config.growth_interval:
                dt, streak = min(dt * config.growth_factor, config.dt_max), 0

        times.append(float(target))
        states.append(values.copy())
        records.append(_diagnostics(values, grid, target))
        callbacks.trigger(Events.SNAPSHOT, time=float(target), record=records[-1])
        bar.update(1)
    bar.close()

    stats["dt_final"] = dt
    trajectory = partial(True)
    logger.info("Run complete: %d accepted, %d rejected steps, %.2fs", stats["accepted"],
                stats["rejected"], stats["wall_time"])
    callbacks.trigger(Events.RUN_COMPLETE, network=net.name, trajectory=trajectory)
    return trajectory


# --- initial data ------------------------------------------------------------------------

PROFILES = ("constant", "bump", "compact", "cosine", "modes")


def initial_profile(grid: Grid, species_count: int, profile: str = "bump", base: float = 0.5,
                    amplitude: float = 1.0, width: float = 0.1,
                    levels: Optional[Sequence[float]] = None) -> Tuple[Field, ...]:
    """
    Nonnegative initial fields, one per species.

    Args:
        grid: Target grid
        species_count: Number of fields
        profile: "constant" (levels or base), "bump" (base plus a Gaussian), "compact"
            (C^1 bump (1 - r^2/w^2)^2 of radius `width`, zero outside; base is ignored), "cosine"
            (base + amplitude/2 * (1 + cos(pi x / L)) along the first axis), "modes"
            (raised cosines base + amplitude/2 * (1 +- cos(k pi x / L)), k = 1, 1, 2, 2, 3, ...,
            alternating sign; smooth and compatible with the Neumann walls)
        base: Background level
        amplitude: Peak height above the background
        width: Gaussian width or compact support radius (in units of the first extent)
        levels: Per-species constants for the "constant" profile

    Returns:
        Tuple of Fields; bump centers are staggered so species differ
    """
    if profile not in PROFILES:
        raise ValidationError(f"Unknown profile '{profile}', expected one of {PROFILES}")
    mesh = grid.mesh()
    fields = []
    for i in range(species_count):
        if profile == "constant":
            level = levels[i] if levels is not None else base
            values = np.full(grid.shape, float(level))
        elif profile == "cosine":
            values = base + 0.5 * amplitude * (1.0 + np.cos(np.pi * mesh[0] / grid.extent[0]))
        elif profile == "modes":
            k, sign = 1 + i // 2, (-1.0) ** i
            values = base + 0.5 * amplitude * (1.0 + sign * np.cos(k * np.pi * mesh[0] / grid.extent[0]))
        else:
            center = [L * (i + 1) / (species_count + 1) for L in grid.extent]
            if profile == "compact":
                center = [L / 2 for L in grid.extent]
            r2 = sum((x - c) ** 2 for x, c in zip(mesh, center))
            w = width * grid.extent[0]
            if profile == "bump":
                values = base + amplitude * np.exp(-r2 / (2.0 * w * w))
            else:
                # No background: zero outside the support
                values = amplitude * np.where(r2 < w * w, (1.0 - r2 / (w * w)) ** 2, 0.0)
        fields.append(Field(grid, values, nonnegative=True))
    return tuple(fields)


def whole_space_extent(diffusivities: Sequence[float], t_end: float, minimum: float = 1.0) -> float:
    """Box length approximating R^n: at least 8 diffusion lengths sqrt(d_max T)."""
    return max(float(minimum), 8.0 * math.sqrt(max(diffusivities) * t_end))


def benchmark_config(network: Optional[ReactionNetwork] = None, diffusivities: Optional[Sequence[float]] = None,
                     points: Optional[int] = None, t_end: Optional[float] = None,
                     amplitude: Optional[float] = None, profile: Optional[str] = None,
                     extent: Optional[float] = None, dim: int = 1, **solver) -> SolverConfig:
    """
    SolverConfig for the standard benchmark, any field overridable.

    Networks with a species count other than the benchmark's get unit diffusivities unless
    diffusivities are given. Extra keyword arguments go to SolverConfig (dt_max, snapshot_stride, ...).
    """
    net = network or get_network(BENCHMARK["network"])
    if diffusivities is None:
        diffusivities = BENCHMARK["diffusivities"]
        if len(diffusivities) != net.species_count:
            diffusivities = (1.0,) * net.species_count
    grid = Grid.uniform(dim, BENCHMARK["extent"] if extent is None else extent,
                        BENCHMARK["points"] if points is None else points)
    u0 = initial_profile(grid, net.species_count, BENCHMARK["profile"] if profile is None else profile,
                         base=BENCHMARK["base"],
                         amplitude=BENCHMARK["amplitude"] if amplitude is None else amplitude,
                         width=BENCHMARK["width"])
    return SolverConfig(network=net, diffusivities=tuple(diffusivities), grid=grid, initial_data=u0,
                        t_end=BENCHMARK["t_end"] if t_end is None else t_end, **solver)
