# grid.py
"""
Rectangular Neumann grids, fields and spectral operators.

Nodes sit at cell centers x_j = (j + 1/2) L / N. A field is expanded in the tensor cosine basis

    u(x_j) = sum_k a_k cos(k pi (j + 1/2) / N),

which diagonalizes the 3-point Neumann Laplacian with eigenvalues
lambda_k = (2 / h^2) (1 - cos(k pi / N)), summed over axes. The heat semigroup is therefore
exact for the discrete operator. Derivatives for the C^1 and C^2 norms use continuum wave
numbers k pi / L, evaluated at the nodes through sine transforms.

Array-level helpers act on the trailing grid.dim axes, so stacks of species or snapshots
can be transformed in one call.
"""

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import fft

from rdlab.errors import ValidationError


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on the box [0, L_1] x ... x [0, L_n]."""

    extent: Tuple[float, ...]
    points: Tuple[int, ...]

    def __post_init__(self):
        extent = tuple(float(L) for L in np.atleast_1d(self.extent))
        points = tuple(int(N) for N in np.atleast_1d(self.points))
        if len(extent) != len(points):
            raise ValidationError(f"Grid has {len(extent)} extents but {len(points)} point counts")
        if not 1 <= len(points) <= 3:
            raise ValidationError(f"Grid dimension must be 1, 2 or 3, got {len(points)}")
        if any(N < 4 for N in points):
            raise ValidationError(f"Each axis needs at least 4 nodes, got {points}")
        if any(not np.isfinite(L) or L <= 0 for L in extent):
            raise ValidationError(f"Extents must be positive, got {extent}")
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "points", points)

    @classmethod
    def uniform(cls, dim: int, extent: float, points: int) -> "Grid":
        return cls(extent=(extent,) * dim, points=(points,) * dim)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(L / N for L, N in zip(self.extent, self.points))

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.points

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def nodes(self, axis: int = 0) -> np.ndarray:
        h = self.spacing[axis]
        return (np.arange(self.points[axis]) + 0.5) * h

    def mesh(self) -> Tuple[np.ndarray, ...]:
        """Node coordinates broadcast to the grid shape (ij indexing)."""
        return tuple(np.meshgrid(*(self.nodes(a) for a in range(self.dim)), indexing="ij"))

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(extent=self.extent, points=tuple(N * factor for N in self.points))

    def to_dict(self) -> dict:
        return {"extent": list(self.extent), "points": list(self.points)}


@dataclass(frozen=True, eq=False)
class Field:
    """Scalar node values on a grid. Values are stored read-only."""

    grid: Grid
    values: np.ndarray
    nonnegative: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ValidationError(f"Field values have shape {values.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("Field values must be finite")
        if self.nonnegative and values.min() < 0:
            raise ValidationError(f"Field tagged nonnegative has minimum {values.min()}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid: Grid, value: float, nonnegative: bool = False) -> "Field":
        return cls(grid, np.full(grid.shape, float(value)), nonnegative)

    @classmethod
    def from_function(cls, grid: Grid, func, nonnegative: bool = False) -> "Field":
        """Sample func(*coordinates) at the nodes."""
        return cls(grid, np.broadcast_to(func(*grid.mesh()), grid.shape), nonnegative)

    def mean(self) -> float:
        return float(self.values.mean())

    def integral(self) -> float:
        """Midpoint quadrature over the box."""
        return float(self.values.sum() * self.grid.cell_volume)

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.grid, self.values * float(scalar))

    __rmul__ = __mul__


@dataclass(frozen=True)
class NormTriple:
    """C^0, C^1 and C^2 norms; c0 <= c1 <= c2."""

    c0: float
    c1: float
    c2: float

    def to_dict(self) -> dict:
        return {"c0": self.c0, "c1": self.c1, "c2": self.c2}


# --- transforms --------------------------------------------------------------------------

def _axes(grid: Grid) -> Tuple[int, ...]:
    return tuple(range(-grid.dim, 0))


def _along(vector: np.ndarray, axis: int, dim: int) -> np.ndarray:
    """Reshape a 1-d vector to broadcast along grid axis `axis` of the trailing dim axes."""
    shape = [1] * dim
    shape[axis] = -1
    return vector.reshape(shape)


def cosine_transform(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Cosine coefficients a_k over the trailing grid axes."""
    coeffs = np.asarray(values, dtype=float)
    for a, ax in enumerate(_axes(grid)):
        N = grid.points[a]
        scale = np.full(N, 1.0 / N)
        scale[0] = 0.5 / N
        coeffs = fft.dct(coeffs, type=2, axis=ax) * _along(scale, a, grid.dim)
    return coeffs


def _synthesize(coeffs: np.ndarray, grid: Grid, sine_axes: Sequence[int] = ()) -> np.ndarray:
    """
    Evaluate a coefficient array at the nodes. Along sine_axes the coefficients b_k (k >= 1,
    stored at index k) multiply sin(k pi (j + 1/2) / N); elsewhere a_k multiplies the cosine.
    """
    values = np.asarray(coeffs, dtype=float)
    for a, ax in enumerate(_axes(grid)):
        N = grid.points[a]
        if a in sine_axes:
            # dst type 3: y_j = (-1)^j x_{N-1} + 2 sum_{n <= N-2} x_n sin(pi (2j+1)(n+1) / 2N)
            shifted = np.zeros_like(values)
            src = [slice(None)] * values.ndim
            dst = [slice(None)] * values.ndim
            src[ax], dst[ax] = slice(1, N), slice(0, N - 1)
            shifted[tuple(dst)] = 0.5 * values[tuple(src)]
            values = fft.dst(shifted, type=3, axis=ax)
        else:
            scale = np.full(N, 0.5)
            scale[0] = 1.0
            values = fft.dct(values * _along(scale, a, grid.dim), type=3, axis=ax)
    return values


def inverse_cosine_transform(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    return _synthesize(coeffs, grid)


def cosine_coefficients(field: Field) -> np.ndarray:
    """Coefficients of field in the cell-centered cosine basis; a constant c maps to (c, 0, ...)."""
    return cosine_transform(field.values, field.grid)


def from_cosine_coefficients(coeffs: np.ndarray, grid: Grid) -> Field:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != grid.shape:
        raise ValidationError(f"Coefficient array has shape {coeffs.shape}, grid is {grid.shape}")
    return Field(grid, inverse_cosine_transform(coeffs, grid))


# --- spectra -----------------------------------------------------------------------------

def axis_eigenvalues(grid: Grid, axis: int) -> np.ndarray:
    N, h = grid.points[axis], grid.spacing[axis]
    k = np.arange(N)
    return (2.0 / h ** 2) * (1.0 - np.cos(k * np.pi / N))


def eigenvalues(grid: Grid) -> np.ndarray:
    """Discrete Neumann Laplacian eigenvalues per mode, shape grid.shape (lambda_0 = 0)."""
    lam = np.zeros(grid.shape)
    for a in range(grid.dim):
        lam = lam + _along(axis_eigenvalues(grid, a), a, grid.dim)
    return lam


def wave_numbers(grid: Grid, axis: int) -> np.ndarray:
    return np.arange(grid.points[axis]) * np.pi / grid.extent[axis]


def heat_multipliers(grid: Grid, d, t: float) -> np.ndarray:
    """
    exp(-t d lambda_k) per mode. d may be a scalar or a vector of per-species diffusivities;
    in the latter case the result has a leading species axis.
    """
    d = np.asarray(d, dtype=float)
    lam = eigenvalues(grid)
    return np.exp(-t * d.reshape(d.shape + (1,) * grid.dim) * lam)


# --- operators on fields -----------------------------------------------------------------

def apply_heat_semigroup(field: Field, d: float, t: float) -> Field:
    """e^{t d Delta} applied exactly to the discrete Neumann operator."""
    if t < 0:
        raise ValidationError(f"Semigroup time must be nonnegative, got {t}")
    if d < 0:
        raise ValidationError(f"Diffusivity must be nonnegative, got {d}")
    coeffs = cosine_coefficients(field) * heat_multipliers(field.grid, d, t)
    return Field(field.grid, inverse_cosine_transform(coeffs, field.grid))


def laplacian_values(values: np.ndarray, grid: Grid, d=1.0) -> np.ndarray:
    coeffs = cosine_transform(values, grid)
    d = np.asarray(d, dtype=float)
    return inverse_cosine_transform(-d.reshape(d.shape + (1,) * grid.dim) * eigenvalues(grid) * coeffs, grid)


def laplacian(field: Field, d: float = 1.0) -> Field:
    """d times the discrete Neumann Laplacian, applied spectrally."""
    return Field(field.grid, laplacian_values(field.values, field.grid, d))


def stencil_laplacian(field: Field, d: float = 1.0) -> Field:
    """Brute-force 3-point Laplacian with mirrored ghost cells (zero normal derivative)."""
    values = field.values
    out = np.zeros_like(values)
    for a in range(field.grid.dim):
        padded = np.concatenate([np.take(values, [0], axis=a), values, np.take(values, [-1], axis=a)], axis=a)
        n = values.shape[a]
        out += (np.take(padded, range(2, n + 2), axis=a) - 2.0 * values
                + np.take(padded, range(0, n), axis=a)) / field.grid.spacing[a] ** 2
    return Field(field.grid, d * out)


def derivative_values(values: np.ndarray, grid: Grid, axes: Tuple[int, ...]) -> np.ndarray:
    """
    Spectral partial derivative over the given grid axes (one axis: first derivative;
    two axes: second or mixed derivative), evaluated at the nodes.
    """
    coeffs = cosine_transform(values, grid)
    sine_axes = set()
    for a in axes:
        kappa = _along(wave_numbers(grid, a), a, grid.dim)
        if a in sine_axes:
            # d/dx of sin is +kappa cos; d/dx of cos is -kappa sin
            coeffs = coeffs * kappa
            sine_axes.remove(a)
        else:
            coeffs = -coeffs * kappa
            sine_axes.add(a)
    return _synthesize(coeffs, grid, tuple(sorted(sine_axes)))


def derivative(field: Field, axis: int = 0) -> Field:
    return Field(field.grid, derivative_values(field.values, field.grid, (axis,)))


def second_derivative(field: Field, axis_a: int = 0, axis_b: Optional[int] = None) -> Field:
    axis_b = axis_a if axis_b is None else axis_b
    return Field(field.grid, derivative_values(field.values, field.grid, (axis_a, axis_b)))


def norm_components(values: np.ndarray, grid: Grid) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Sup norms of values, of the gradient and of all second derivatives over the trailing grid
    axes; leading axes (species, snapshots) are kept.

    Returns:
        (c0, c1, c2) arrays with c1 = c0 + max_a sup|d_a u| and c2 = c1 + max_ab sup|d_a d_b u|
    """
    values = np.asarray(values, dtype=float)
    axes = _axes(grid)
    c0 = np.max(np.abs(values), axis=axes)
    grad = np.zeros_like(c0)
    for a in range(grid.dim):
        grad = np.maximum(grad, np.max(np.abs(derivative_values(values, grid, (a,))), axis=axes))
    hess = np.zeros_like(c0)
    for a, b in combinations_with_replacement(range(grid.dim), 2):
        hess = np.maximum(hess, np.max(np.abs(derivative_values(values, grid, (a, b))), axis=axes))
    c1 = c0 + grad
    return c0, c1, c1 + hess


def norms(field: Field) -> NormTriple:
    c0, c1, c2 = norm_components(field.values, field.grid)
    return NormTriple(float(c0), float(c1), float(c2))


def c1_norm_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    """C^1 norm only, skipping the second derivatives."""
    values = np.asarray(values, dtype=float)
    axes = _axes(grid)
    grad = np.zeros(values.shape[:values.ndim - grid.dim])
    for a in range(grid.dim):
        grad = np.maximum(grad, np.max(np.abs(derivative_values(values, grid, (a,))), axis=axes))
    return np.max(np.abs(values), axis=axes) + grad


def resample(field: Field, grid: Grid) -> Field:
    """Spectral interpolation of field onto another grid of the same extent (truncating or zero-padding)."""
    if grid.extent != field.grid.extent or grid.dim != field.grid.dim:
        raise ValidationError("Resampling needs grids of the same extent and dimension")
    coeffs = cosine_coefficients(field)
    target = np.zeros(grid.shape)
    common = tuple(slice(0, min(a, b)) for a, b in zip(field.grid.shape, grid.shape))
    target[common] = coeffs[common]
    return from_cosine_coefficients(target, grid)
