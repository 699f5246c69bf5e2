# proof.py
"""
Numerical instantiation of the global existence argument along a simulated trajectory.

The entropy stage passes to entropy variables v_i = (1 + u_i) log(1 + u_i), w_i = v_i e^{-Kt} and checks
sum_i L_i w_i <= 0 with L_i = d/dt - d_i Delta, together with the pointwise bound on L_i v_i and the
mean value bound behind K. The auxiliary stage solves the auxiliary problems L z_i = w_i (diffusivity
d = 1 + max d_i, z_i(0) = 0), forms phi = sum_i L_i z_i and checks the maximum principle bound
phi <= C1 together with the bounds derived from it. The feedback stage checks the C^1 growth of u and
the chain rule bound on w, and reports the interpolation feedback ratios.

All fields are arrays over the trajectory snapshots, shape (n_times, m, *grid.shape).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from rdlab.config import PROOF_SETTINGS, SOLVER_SETTINGS
from rdlab.duhamel import duhamel_values
from rdlab.errors import InsufficientSnapshotsError, ValidationError
from rdlab.grid import Grid, c1_norm_values, laplacian_values
from rdlab.networks.model import ReactionNetwork
from rdlab.simulator import Trajectory, benchmark_config, entropy_density, simulate

logger = logging.getLogger(__name__)


@dataclass
class MarginReport:
    """Worst signed margin of one inequality; the inequality holds when worst <= tolerance."""

    name: str
    label: str
    worst: float
    tolerance: float
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return bool(self.worst <= self.tolerance)

    @property
    def violation(self) -> float:
        """Positive part of the worst margin."""
        return max(self.worst, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "label": self.label, "worst": self.worst,
                "tolerance": self.tolerance, "holds": self.holds, "details": self.details}


@dataclass
class ProofDiagnostics:
    K: float
    times: np.ndarray
    v_fields: np.ndarray
    w_fields: np.ndarray
    z_fields: np.ndarray
    d_aux: float
    C1: float
    phi_fields: np.ndarray
    margins: Dict[str, MarginReport] = field(default_factory=dict)
    feedback: Dict[str, Any] = field(default_factory=dict)
    diffusivities: Tuple[float, ...] = ()
    grid: Optional[Grid] = None

    @property
    def passes(self) -> bool:
        return all(m.holds for m in self.margins.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "K": self.K,
            "d_aux": self.d_aux,
            "C1": self.C1,
            "passes": self.passes,
            "margins": {k: m.to_dict() for k, m in self.margins.items()},
            "feedback": self.feedback,
        }


# --- entropy ------------------------------------------------------------------------------

def compute_K(net: ReactionNetwork) -> float:
    """K = m^{3/2} M."""
    M = net.growth_constant
    if not math.isfinite(M):
        raise ValidationError("Growth constant must be finite")
    return net.species_count ** 1.5 * M


def entropy_variables(trajectory: Trajectory, K: float) -> Tuple[np.ndarray, np.ndarray]:
    """v = (1 + u) log(1 + u) and w = v e^{-Kt} at every snapshot."""
    if np.min(trajectory.states) < -1e-12 * max(1.0, float(np.max(trajectory.states))):
        raise ValidationError("Entropy variables need a nonnegative trajectory")
    v = entropy_density(trajectory.states)
    w = v * _time_factor(trajectory.times, K, v.ndim)
    return v, w


def _time_factor(times: np.ndarray, K: float, ndim: int) -> np.ndarray:
    return np.exp(-K * np.asarray(times)).reshape((-1,) + (1,) * (ndim - 1))


def _species_vector(values, ndim_after: int) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return values.reshape(values.shape + (1,) * ndim_after)


def check_entropy_inequality_13(trajectory: Trajectory, v_fields: np.ndarray, K: float,
                                residual_constant: Optional[float] = None,
                                network: Optional[ReactionNetwork] = None) -> MarginReport:
    """
    Residual of sum_i (d/dt - d_i Delta) w_i over space-time.

    The gated residual takes d/dt v by centered differences at the interior snapshots; its
    consistency tolerance is residual_constant * (dt^2 + h^2) * scale with scale = max |d/dt w|.
    When the network is known the instantaneous residual, with d/dt u = d_i Delta u_i + f_i(u)
    at every snapshot, is added to the details. It is exact for the spatially discrete system.
    """
    times = np.asarray(trajectory.times)
    if times.size < 3:
        raise InsufficientSnapshotsError(f"Need at least 3 snapshots, got {times.size}")
    C_disc = PROOF_SETTINGS["residual_constant"] if residual_constant is None else residual_constant
    grid = trajectory.grid
    dt = float(times[1] - times[0])
    h = max(grid.spacing)
    d = np.asarray(trajectory.diffusivities, dtype=float)
    decay = _time_factor(times, K, v_fields.ndim)

    # Centered differences at interior snapshots
    vt = (v_fields[2:] - v_fields[:-2]) / (2.0 * dt)
    inner = slice(1, -1)
    wt = decay[inner] * (vt - K * v_fields[inner])
    lap_w = laplacian_values(v_fields[inner], grid, d) * decay[inner]
    differenced = np.sum(wt - lap_w, axis=1)
    scale = max(float(np.max(np.abs(wt))), np.finfo(float).tiny)
    tolerance = C_disc * (dt ** 2 + h ** 2) * scale
    worst = float(differenced.max())

    network = network or trajectory.network
    details = {
        "worst_differenced": worst,
        "fraction_exceeding": float(np.mean(differenced > tolerance)),
        "residual_constant": C_disc,
        "scale": scale,
        "K": K,
    }
    if network is not None:
        instantaneous = instantaneous_residual(trajectory.states, v_fields, times, grid,
                                               trajectory.diffusivities, network, K)
        details["worst_instantaneous"] = float(instantaneous.max())
    return MarginReport("entropy_inequality", "(13)", worst, tolerance, details)


def instantaneous_residual(states: np.ndarray, v_fields: np.ndarray, times: np.ndarray, grid: Grid,
                           diffusivities: Sequence[float], network: ReactionNetwork, K: float) -> np.ndarray:
    """sum_i e^{-Kt} [(1 + log(1 + u_i)) u_i' - K v_i - d_i Delta v_i] with u' from the discrete system."""
    d = np.asarray(diffusivities, dtype=float)
    out = np.empty((len(times),) + grid.shape)
    for n, (u, v) in enumerate(zip(states, v_fields)):
        ut = laplacian_values(u, grid, d) + network.rates(u)
        vt = (1.0 + np.log1p(u)) * ut
        out[n] = math.exp(-K * times[n]) * np.sum(vt - K * v - laplacian_values(v, grid, d), axis=0)
    return out


def entropy_drift(trajectory: Trajectory, K: float) -> MarginReport:
    """Integrated form: e^{-Kt} sum_i int (1 + u_i) log(1 + u_i) must not increase between snapshots."""
    tilted = np.exp(-K * trajectory.times) * trajectory.entropies
    increases = np.diff(tilted) / np.maximum(tilted[:-1], np.finfo(float).tiny)
    worst = float(increases.max()) if increases.size else -np.inf
    return MarginReport("entropy_drift", "(13) integrated", worst, 1e-6, {"K": K})


# --- auxiliary ----------------------------------------------------------------------------

def auxiliary_diffusivity(diffusivities: Sequence[float]) -> float:
    return 1.0 + max(diffusivities)


def solve_auxiliary(w_fields: np.ndarray, d_aux: float, times: np.ndarray, grid: Grid) -> np.ndarray:
    """z_i with (d/dt - d_aux Delta) z_i = w_i and z_i(0) = 0, one Duhamel solve for all species."""
    w_fields = np.asarray(w_fields, dtype=float)
    z = duhamel_values(np.zeros(w_fields.shape[1:]), w_fields, times, grid, d_aux)
    slack = PROOF_SETTINGS["nonnegativity_slack"] * max(1.0, float(np.max(w_fields)))
    if z.min() < -slack:
        logger.warning("Auxiliary solution dips to %.3e below zero", z.min())
    return z


def compute_phi_and_C1(z_fields: np.ndarray, w_fields: np.ndarray, diffusivities: Sequence[float],
                       d_aux: float, u0: np.ndarray, grid: Grid) -> Tuple[np.ndarray, float]:
    """
    phi = sum_i (w_i + (d_aux - d_i) Delta z_i), which equals sum_i L_i z_i without any time
    differencing, and C1 = sup_x sum_i (1 + u0_i) log(1 + u0_i).
    """
    gaps = np.array([d_aux - d for d in diffusivities])
    phi = np.sum(w_fields + laplacian_values(z_fields, grid, gaps), axis=1)
    C1 = float(np.max(np.sum(entropy_density(u0), axis=0)))
    return phi, C1


def verify_step2(diag: ProofDiagnostics, tolerance: Optional[float] = None) -> Dict[str, MarginReport]:
    """
    Worst margins, each of which must be at most tol = step2_tolerance * C1:
    (a) phi - C1, (b) w_i + sum_j (d_aux - d_j) Delta z_j - C1, (c) z_i - d_aux C1 T, (d) -z_i,
    plus the time elimination dphi - sum_i d_i w_i - d C1 and the consistency of
    L phi = sum_i L_i w_i at interior snapshots (reported, not gated).
    """
    factor = PROOF_SETTINGS["step2_tolerance"] if tolerance is None else tolerance
    tol = factor * max(diag.C1, np.finfo(float).tiny)
    grid, d_aux, C1 = diag.grid, diag.d_aux, diag.C1
    T = float(diag.times[-1])
    w, z, phi = diag.w_fields, diag.z_fields, diag.phi_fields

    gaps = np.array([d_aux - d for d in diag.diffusivities])
    correction = np.sum(laplacian_values(z, grid, gaps), axis=1)
    d = np.asarray(diag.diffusivities, dtype=float)
    d_column = _species_vector(d, grid.dim)

    margins = {
        "phi_bound": MarginReport("phi_bound", "(18)", float(np.max(phi) - C1), tol),
        "entropy_bound": MarginReport("entropy_bound", "(15)",
                                      float(np.max(w + correction[:, None]) - C1), tol),
        "auxiliary_bound": MarginReport("auxiliary_bound", "(16)",
                                        float(np.max(z) - d_aux * C1 * T), tol),
        "auxiliary_nonnegative": MarginReport("auxiliary_nonnegative", "z >= 0", float(-np.min(z)), tol),
        "time_elimination": MarginReport(
            "time_elimination", "(16) elimination",
            float(np.max(d_aux * phi - np.sum(d_column * w, axis=1)) - d_aux * C1), d_aux * tol),
    }

    if len(diag.times) >= 3:
        dt = float(diag.times[1] - diag.times[0])
        lhs = (phi[2:] - phi[:-2]) / (2 * dt) - laplacian_values(phi[1:-1], grid, d_aux)
        rhs = np.sum((w[2:] - w[:-2]) / (2 * dt) - laplacian_values(w[1:-1], grid, d), axis=1)
        mismatch = float(np.max(np.abs(lhs - rhs)))
        diag.feedback["identity_17_residual"] = mismatch / max(float(np.max(np.abs(rhs))), np.finfo(float).tiny)
    return margins


def verify_feedback_19(trajectory: Trajectory, w_fields: np.ndarray) -> Dict[str, Any]:
    """
    Per-species ratio ||w_i||_{0,T} / (1 + ||w_i||_{1,T}^{2/3}) and the concluding feedback quantity
    (1 + U) log(1 + U) / [(1 + U) log(2 + U)^{2/3}] with U = ||u||_{0,T}.
    """
    grid = trajectory.grid
    sup0 = np.max(np.abs(w_fields), axis=tuple([0] + list(range(2, w_fields.ndim))))
    sup1 = np.max(c1_norm_values(w_fields, grid), axis=0)
    ratios = sup0 / (1.0 + sup1 ** (2.0 / 3.0))
    U = trajectory.sup_norm()
    feedback = (1.0 + U) * math.log1p(U) / ((1.0 + U) * math.log(2.0 + U) ** (2.0 / 3.0))
    return {
        "ratios": {s: float(r) for s, r in zip(trajectory.species, ratios)},
        "max_ratio": float(ratios.max()),
        "w_c0": [float(x) for x in sup0],
        "w_c1": [float(x) for x in sup1],
        "u_sup": U,
        "feedback": float(feedback),
    }


# --- step 1 and step 3 bounds ------------------------------------------------------------

def _roundoff(*arrays) -> float:
    return 1e-9 * max([1.0] + [float(np.max(np.abs(a))) for a in arrays])


def check_entropy_pointwise(trajectory: Trajectory, v_fields: np.ndarray,
                            network: ReactionNetwork) -> MarginReport:
    """
    L_i v_i - (1 + log(1 + u_i)) f_i(u) at every snapshot, node and species, with d/dt u taken from
    the discrete system. What remains is d_i (v_i' Delta u_i - Delta v_i), nonpositive by convexity of v.
    """
    grid = trajectory.grid
    d = np.asarray(trajectory.diffusivities, dtype=float)
    worst, scale = -np.inf, 0.0
    for u, v in zip(trajectory.states, v_fields):
        f = network.rates(u)
        slope = 1.0 + np.log1p(u)
        lap_v = laplacian_values(v, grid, d)
        Lv = slope * (laplacian_values(u, grid, d) + f) - lap_v
        worst = max(worst, float(np.max(Lv - slope * f)))
        scale = max(scale, _roundoff(lap_v, slope * f))
    return MarginReport("entropy_pointwise", "L_i v_i bound", worst, scale)


def check_mean_value_bound(trajectory: Trajectory, network: ReactionNetwork) -> MarginReport:
    """sum_i log(1 + u_i) f_i(u) - m^{3/2} M (1 + |u|_inf) log(1 + |u|_inf), pointwise."""
    constant = network.species_count ** 1.5 * network.growth_constant
    worst, scale = -np.inf, 0.0
    for u in trajectory.states:
        lhs = np.sum(np.log1p(u) * network.rates(u), axis=0)
        rhs = constant * entropy_density(np.max(np.abs(u), axis=0))
        worst = max(worst, float(np.max(lhs - rhs)))
        scale = max(scale, _roundoff(lhs, rhs))
    return MarginReport("mean_value_bound", "mean value bound", worst, scale, {"constant": constant})


def check_solution_growth(trajectory: Trajectory, network: ReactionNetwork) -> MarginReport:
    """
    The (10) bracket ||u_i0||_{C^1} + ||u_i||_{0,T}^{1/2} ||f_i(u)||_{0,T}^{1/2} against
    (||u_i0||_{C^1} + sqrt(C_f)) (1 + ||u||_{0,T})^{3/2}, where |f_i(u)| <= C_f (1 + |u|_inf)^2 with
    C_f = m max(|f_i(0)|, M) follows from the growth condition. The empirical (10) constant
    ||u_i||_{1,T} / bracket and the ratio ||u_i||_{1,T} / (1 + ||u||_{0,T})^{3/2} go to the details.
    """
    grid = trajectory.grid
    m = network.species_count
    states = trajectory.states
    axes = tuple([0] + list(range(2, states.ndim)))
    U = trajectory.sup_norm()
    u_sup = np.max(np.abs(states), axis=axes)
    f_sup = np.max(np.abs(network.rates(np.swapaxes(states, 0, 1))), axis=tuple(range(1, states.ndim)))
    f_zero = np.abs(network.rates(np.zeros((m, 1))))[:, 0]
    C_f = m * np.maximum(f_zero, network.growth_constant)
    initial_c1 = c1_norm_values(states[0], grid)
    bracket = initial_c1 + np.sqrt(u_sup * f_sup)
    bound = (initial_c1 + np.sqrt(C_f)) * (1.0 + U) ** 1.5
    c1 = np.max(c1_norm_values(states, grid), axis=0)
    details = {
        "empirical_10": {s: float(a / b) if b > 0 else 0.0 for s, a, b in zip(trajectory.species, c1, bracket)},
        "growth_ratio": {s: float(a / (1.0 + U) ** 1.5) for s, a in zip(trajectory.species, c1)},
    }
    return MarginReport("solution_growth", "||u_i||_1 growth", float(np.max(bracket - bound)),
                        _roundoff(bound), details)


def check_w_gradient_chain(trajectory: Trajectory, w_fields: np.ndarray,
                           residual_constant: Optional[float] = None) -> MarginReport:
    """
    ||w_i||_{1,T} - (1 + log(1 + ||u_i||_{0,T})) ||u_i||_{1,T}. The spectral gradient of w only
    follows the chain rule up to resolution, so the tolerance is residual_constant * h^2 * scale.
    """
    C_disc = PROOF_SETTINGS["residual_constant"] if residual_constant is None else residual_constant
    grid = trajectory.grid
    states = trajectory.states
    axes = tuple([0] + list(range(2, states.ndim)))
    u0 = np.max(np.abs(states), axis=axes)
    u1 = np.max(c1_norm_values(states, grid), axis=0)
    w1 = np.max(c1_norm_values(w_fields, grid), axis=0)
    bound = (1.0 + np.log1p(u0)) * u1
    scale = max(1.0, float(np.max(w1)))
    return MarginReport("w_gradient_chain", "||w_i||_1 chain", float(np.max(w1 - bound)),
                        C_disc * max(grid.spacing) ** 2 * scale, {"w_c1": w1.tolist(), "bound": bound.tolist()})


# --- drivers -----------------------------------------------------------------------------

def run_proof_harness(trajectory: Trajectory, network: Optional[ReactionNetwork] = None,
                      K: Optional[float] = None) -> ProofDiagnostics:
    """Entropy, auxiliary and feedback stages along a trajectory; K defaults to compute_K(network)."""
    network = network or trajectory.network
    if K is None:
        if network is None:
            raise ValidationError("Need a network or an explicit K")
        K = compute_K(network)
    grid = trajectory.grid
    v, w = entropy_variables(trajectory, K)
    d_aux = auxiliary_diffusivity(trajectory.diffusivities)
    z = solve_auxiliary(w, d_aux, trajectory.times, grid)
    phi, C1 = compute_phi_and_C1(z, w, trajectory.diffusivities, d_aux, trajectory.states[0], grid)

    diag = ProofDiagnostics(K=K, times=np.asarray(trajectory.times), v_fields=v, w_fields=w, z_fields=z,
                            d_aux=d_aux, C1=C1, phi_fields=phi, diffusivities=tuple(trajectory.diffusivities),
                            grid=grid)
    diag.margins["entropy_inequality"] = check_entropy_inequality_13(trajectory, v, K, network=network)
    diag.margins["entropy_drift"] = entropy_drift(trajectory, K)
    if network is not None and math.isfinite(network.growth_constant):
        diag.margins["entropy_pointwise"] = check_entropy_pointwise(trajectory, v, network)
        diag.margins["mean_value_bound"] = check_mean_value_bound(trajectory, network)
        diag.margins["solution_growth"] = check_solution_growth(trajectory, network)
    diag.margins.update(verify_step2(diag))
    diag.margins["w_gradient_chain"] = check_w_gradient_chain(trajectory, w)
    diag.feedback.update(verify_feedback_19(trajectory, w))
    for name, report in diag.margins.items():
        logger.info("%-22s %-18s worst %+.3e (tol %.1e) %s", name, report.label, report.worst,
                    report.tolerance, "ok" if report.holds else "VIOLATED")
    return diag


def k_sensitivity(trajectory: Trajectory, K: float, scales: Optional[Sequence[float]] = None,
                  network: Optional[ReactionNetwork] = None) -> List[Dict[str, float]]:
    """Worst (13) residual with K replaced by scale * K, for each scale."""
    scales = PROOF_SETTINGS["k_scales"] if scales is None else scales
    rows = []
    for s in scales:
        v, _ = entropy_variables(trajectory, s * K)
        report = check_entropy_inequality_13(trajectory, v, s * K, network=network)
        rows.append({"scale": float(s), "K": float(s * K), "worst": report.worst, "holds": report.holds})
    return rows


def entropy_reaction_residual(network: ReactionNetwork, states: np.ndarray, K: float) -> np.ndarray:
    """sum_i (1 + log(1 + u_i)) f_i(u) - K v_i at states of shape (n, m), the (13) residual of constant data."""
    states = np.asarray(states, dtype=float)
    rates = network.rates(states.T).T
    return np.sum((1.0 + np.log1p(states)) * rates - K * entropy_density(states), axis=1)


def amplitude_scan(network: ReactionNetwork, K: float, scale: float = 0.25,
                   amplitudes: Optional[Sequence[float]] = None, samples: Optional[int] = None,
                   seed: Optional[int] = None) -> Dict[str, Any]:
    """
    Worst spatially constant (13) residual with K replaced by scale * K over states in [0, A]^m,
    for each amplitude A. Half of the samples are uniform, half log-uniform down to 1e-3 A.
    The threshold is the smallest amplitude with a positive worst residual, None if there is none.
    """
    amplitudes = PROOF_SETTINGS["scan_amplitudes"] if amplitudes is None else amplitudes
    samples = PROOF_SETTINGS["scan_samples"] if samples is None else samples
    rng = np.random.default_rng(PROOF_SETTINGS["scan_seed"] if seed is None else seed)
    m = network.species_count
    rows, threshold = [], None
    for A in amplitudes:
        half = samples // 2
        states = np.vstack([
            rng.uniform(0.0, A, size=(half, m)),
            A * 10.0 ** rng.uniform(-3.0, 0.0, size=(samples - half, m)),
            np.full((1, m), float(A)),
        ])
        residual = entropy_reaction_residual(network, states, scale * K)
        k = int(np.argmax(residual))
        rows.append({"amplitude": float(A), "worst": float(residual[k]), "state": states[k].tolist()})
        if threshold is None and residual[k] > 0:
            threshold = float(A)
    logger.info("Amplitude scan of '%s' at %g K: %s", network.name, scale,
                "no failure threshold" if threshold is None else f"fails from amplitude {threshold:g}")
    return {"network": network.name, "scale": float(scale), "K": float(scale * K), "threshold": threshold,
            "rows": rows}


def calibrate_residual_constant(u0: float = 1.0, rate: float = 1.0,
                                strides: Sequence[float] = (1 / 16, 1 / 32, 1 / 64, 1 / 128)) -> float:
    """
    Ratio of the centered-difference error of d/dt w to dt^2 * max |d/dt w| on decoupled linear
    decay u = u0 e^{-rate t} with spatially constant data, where everything is closed form.
    The largest ratio over the strides is returned.
    """
    K = 2 ** 1.5 * rate
    worst = 0.0
    for dt in strides:
        t = np.arange(0.0, 1.0 + 0.5 * dt, dt)
        u = u0 * np.exp(-rate * t)
        v = entropy_density(u)
        exact_vt = (1.0 + np.log1p(u)) * (-rate * u)
        exact_wt = np.exp(-K * t) * (exact_vt - K * v)
        fd_wt = np.exp(-K * t[1:-1]) * ((v[2:] - v[:-2]) / (2 * dt) - K * v[1:-1])
        error = float(np.max(np.abs(fd_wt - exact_wt[1:-1])))
        worst = max(worst, error / (dt ** 2 * float(np.max(np.abs(exact_wt)))))
    return worst


def benchmark_trajectory(network: Optional[ReactionNetwork] = None, points: Optional[int] = None,
                         stride: Optional[float] = None, progress: bool = False, **overrides) -> Trajectory:
    """Benchmark run sampled densely enough for the harness."""
    stride = PROOF_SETTINGS["snapshot_stride"] if stride is None else stride
    overrides.setdefault("dt_max", min(SOLVER_SETTINGS["dt_max"], stride))
    config = benchmark_config(network=network, points=points, snapshot_stride=stride, **overrides)
    return simulate(config, progress=progress)


def refinement_study(network: Optional[ReactionNetwork] = None, levels: int = 3, points: int = 64,
                     stride: float = 1.0 / 64, **overrides) -> List[Dict[str, float]]:
    """
    Harness margins while halving the snapshot stride (hence dt) and the mesh width together.
    Each row holds C1 and the positive part of the worst margin of (13), (15), (16) and (18).
    """
    rows = []
    for level in range(levels):
        trajectory = benchmark_trajectory(network, points=points * 2 ** level, stride=stride / 2 ** level,
                                          **overrides)
        diag = run_proof_harness(trajectory)
        row = {"points": points * 2 ** level, "stride": stride / 2 ** level, "C1": diag.C1}
        for key in ("entropy_inequality", "entropy_bound", "auxiliary_bound", "phi_bound"):
            row[key] = diag.margins[key].violation
        rows.append(row)
        logger.info("Refinement level %d: %s", level, row)
    return rows
