# duhamel.py
"""
Variation of constants for U_t = d Delta U + g on the Neumann grid.

The source g is sampled on a uniform time mesh and reconstructed piecewise linearly; each
cosine mode is then advanced exactly,

    U_{n+1} = e^{-mu D} U_n + D phi_1(-mu D) g_n + D phi_2(-mu D) (g_{n+1} - g_n),

with mu = d lambda_k and D the mesh step. The phi functions are evaluated by averaging over a
small circle around each argument, which stays accurate where the closed forms cancel.

The shifted representation with damping k >= 0,

    U(t) = e^{-kt} e^{t d Delta} U0 + int_0^t e^{(t-s) d Delta} e^{-k(t-s)} (g + kU)(s) ds,

is evaluated through the exponential of an augmented 4 x 4 generator per mode, so it can be
compared against the unshifted solution to roundoff.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np
from scipy import integrate, linalg, special

from rdlab.errors import ValidationError
from rdlab.grid import Field, Grid, cosine_transform, eigenvalues, inverse_cosine_transform

logger = logging.getLogger(__name__)

CONTOUR_POINTS = 32
CONTOUR_RADIUS = 1.0


@dataclass
class DuhamelSolution:
    """Solution values at the mesh times, shape (n_times, ..., *grid.shape)."""

    grid: Grid
    times: np.ndarray
    values: np.ndarray
    shift: float = 0.0

    def fields(self) -> List[Field]:
        if self.values.ndim != self.grid.dim + 1:
            raise ValidationError("fields() needs a single scalar solution")
        return [Field(self.grid, v) for v in self.values]

    def at(self, index: int) -> Field:
        return Field(self.grid, self.values[index])


def phi_functions(z: np.ndarray):
    """
    phi_1(z) = (e^z - 1) / z and phi_2(z) = (e^z - 1 - z) / z^2 for real z <= 0.

    Returns:
        (phi_1, phi_2) with the shape of z
    """
    z = np.asarray(z, dtype=float)
    roots = CONTOUR_RADIUS * np.exp(1j * np.pi * (np.arange(CONTOUR_POINTS) + 0.5) / CONTOUR_POINTS)
    r = z[..., None] + roots
    exp_r = np.exp(r)
    phi1 = ((exp_r - 1.0) / r).mean(axis=-1).real
    phi2 = ((exp_r - 1.0 - r) / r ** 2).mean(axis=-1).real
    return phi1, phi2


def uniform_times(t_end: float, intervals: int) -> np.ndarray:
    if t_end < 0 or intervals < 1:
        raise ValidationError(f"Need t_end >= 0 and at least one interval, got {t_end}, {intervals}")
    return np.linspace(0.0, t_end, intervals + 1)


def _check_mesh(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValidationError("Time mesh is empty")
    if times[0] != 0.0:
        raise ValidationError(f"Time mesh must start at 0, starts at {times[0]}")
    if times.size > 1:
        steps = np.diff(times)
        if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValidationError("Time mesh must be uniform and increasing")
    return times


def _source_array(g, n_times: int, grid: Grid) -> np.ndarray:
    if isinstance(g, Field):
        return np.broadcast_to(g.values, (n_times,) + grid.shape)
    if isinstance(g, (list, tuple)) and g and isinstance(g[0], Field):
        g = np.stack([f.values for f in g])
    g = np.asarray(g, dtype=float)
    if g.shape[0] != n_times:
        raise ValidationError(f"Source has {g.shape[0]} time samples, mesh has {n_times}")
    if g.shape[-grid.dim:] != grid.shape:
        raise ValidationError(f"Source spatial shape {g.shape[-grid.dim:]} does not match grid {grid.shape}")
    return g


def duhamel_values(U0: np.ndarray, g: np.ndarray, times: np.ndarray, grid: Grid, d) -> np.ndarray:
    """
    Unshifted solver on arrays: U0 of shape (..., *grid.shape), g of shape (n_times, ..., *grid.shape).
    d is a scalar or broadcasts against the leading axes of U0.
    """
    times = _check_mesh(times)
    U0 = np.asarray(U0, dtype=float)
    out = np.empty((times.size,) + U0.shape)
    out[0] = U0
    if times.size == 1:
        return out

    step = times[1] - times[0]
    d = np.asarray(d, dtype=float)
    mu = d.reshape(d.shape + (1,) * grid.dim) * eigenvalues(grid)
    decay = np.exp(-mu * step)
    phi1, phi2 = phi_functions(-mu * step)

    U = cosine_transform(U0, grid)
    g_hat = cosine_transform(g, grid)
    for n in range(times.size - 1):
        U = decay * U + step * phi1 * g_hat[n] + step * phi2 * (g_hat[n + 1] - g_hat[n])
        out[n + 1] = inverse_cosine_transform(U, grid)
    return out


def _augmented_propagators(mu: np.ndarray, k: float, step: float) -> np.ndarray:
    """exp(A * step) per mode for A = [[-(mu+k), k, 1, 0], [0, -mu, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]]."""
    mu = mu.ravel()
    A = np.zeros((mu.size, 4, 4))
    A[:, 0, 0] = -(mu + k)
    A[:, 0, 1] = k
    A[:, 0, 2] = 1.0
    A[:, 1, 1] = -mu
    A[:, 1, 2] = 1.0
    A[:, 2, 3] = 1.0
    return linalg.expm(A * step)


def shifted_representation(U0: np.ndarray, g: np.ndarray, U: np.ndarray, times: np.ndarray,
                           grid: Grid, d: float, k: float) -> np.ndarray:
    """
    Evaluate the k-shifted representation given the unshifted solution U at the mesh times.

    The recursion is R_{n+1} = e^{-(mu+k) D} R_n + e^{-mu D}(1 - e^{-k D}) U_n + J_n, where J_n
    integrates the linear source against the shifted kernel. Equals U up to roundoff.
    """
    if k < 0:
        raise ValidationError(f"Shift k must be nonnegative, got {k}")
    times = _check_mesh(times)
    out = np.empty_like(U)
    out[0] = U0
    if times.size == 1:
        return out

    step = times[1] - times[0]
    mu = float(d) * eigenvalues(grid)
    E = _augmented_propagators(mu, float(k), step).reshape(grid.shape + (4, 4))
    U_hat = cosine_transform(U, grid)
    g_hat = cosine_transform(g, grid)
    R = cosine_transform(U0, grid)
    for n in range(times.size - 1):
        slope = (g_hat[n + 1] - g_hat[n]) / step
        R = E[..., 0, 0] * R + E[..., 0, 1] * U_hat[n] + E[..., 0, 2] * g_hat[n] + E[..., 0, 3] * slope
        out[n + 1] = inverse_cosine_transform(R, grid)
    return out


def duhamel_solve(U0: Field, g: Union[Field, Sequence[Field], np.ndarray], times, d: float,
                  k: float = 0.0) -> DuhamelSolution:
    """
    Solve U_t = d Delta U + g with U(0) = U0 on the mesh `times`.

    Args:
        U0: Initial field
        g: Source, either one Field (constant in time) or samples at every mesh time
        times: Uniform mesh starting at 0
        d: Diffusivity
        k: Shift; k > 0 evaluates the shifted representation, which reproduces the same U

    Returns:
        DuhamelSolution with one field per mesh time
    """
    if k < 0:
        raise ValidationError(f"Shift k must be nonnegative, got {k}")
    times = _check_mesh(times)
    grid = U0.grid
    g_values = _source_array(g, times.size, grid)
    U = duhamel_values(U0.values, g_values, times, grid, d)
    if k > 0:
        U = shifted_representation(U0.values, g_values, U, times, grid, d, k)
    return DuhamelSolution(grid=grid, times=times, values=U, shift=float(k))


def kernel_integral(k: float) -> float:
    """int_0^inf s^{-1/2} e^{-ks} ds by quadrature, after substituting s = tau^2."""
    if k <= 0:
        raise ValidationError(f"Kernel integral needs k > 0, got {k}")
    value, _ = integrate.quad(lambda tau: 2.0 * np.exp(-k * tau * tau), 0.0, np.inf,
                              epsabs=1e-13, epsrel=1e-12)
    return float(value)


def kernel_integral_exact(k: float) -> float:
    """Gamma(1/2) / sqrt(k) = sqrt(pi / k)."""
    return float(special.gamma(0.5) / np.sqrt(k))
