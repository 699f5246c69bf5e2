# test_grid.py
"""Neumann grid, cosine transforms, heat semigroup and C^k norms."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from rdlab.errors import ValidationError
from rdlab.grid import (
    Field,
    Grid,
    apply_heat_semigroup,
    c1_norm_values,
    cosine_coefficients,
    derivative,
    eigenvalues,
    from_cosine_coefficients,
    laplacian,
    norm_components,
    norms,
    resample,
    second_derivative,
    stencil_laplacian,
)

GRID = Grid.uniform(1, 1.0, 32)

values32 = arrays(np.float64, 32, elements=st.floats(min_value=-10.0, max_value=10.0))
times = st.floats(min_value=1e-5, max_value=2.0)
diffusivities = st.floats(min_value=0.01, max_value=10.0)


def mode(grid, k, axis=0):
    return Field.from_function(grid, lambda *x: np.cos(k * np.pi * x[axis] / grid.extent[axis]))


class TestGrid:
    def test_nodes_are_cell_centers(self):
        grid = Grid.uniform(1, 2.0, 4)
        np.testing.assert_allclose(grid.nodes(), [0.25, 0.75, 1.25, 1.75])
        assert grid.spacing == (0.5,)

    def test_two_dimensional_mesh(self, grid2d):
        x, y = grid2d.mesh()
        assert x.shape == (16, 16)
        assert np.all(x[:, 0] == grid2d.nodes(0))
        assert np.all(y[0, :] == grid2d.nodes(1))

    @pytest.mark.parametrize("extent, points", [((1.0,), (3,)), ((0.0,), (8,)), ((1.0, 1.0), (8,)),
                                                ((1.0,) * 4, (8,) * 4), ((-1.0,), (8,))])
    def test_invalid_grids(self, extent, points):
        with pytest.raises(ValidationError):
            Grid(extent, points)

    def test_refined(self):
        assert Grid.uniform(2, 1.0, 8).refined().points == (16, 16)


class TestField:
    def test_values_are_read_only(self, grid64):
        field = Field.constant(grid64, 1.0)
        with pytest.raises(ValueError):
            field.values[0] = 2.0

    def test_non_finite_rejected(self, grid64):
        values = np.zeros(64)
        values[3] = np.inf
        with pytest.raises(ValidationError):
            Field(grid64, values)

    def test_nonnegative_tag_enforced(self, grid64):
        with pytest.raises(ValidationError):
            Field(grid64, -np.ones(64), nonnegative=True)

    def test_shape_mismatch(self, grid64):
        with pytest.raises(ValidationError):
            Field(grid64, np.zeros(32))

    def test_integral_is_midpoint_rule(self, grid64):
        assert Field.constant(grid64, 3.0).integral() == pytest.approx(3.0)


class TestCosineTransform:
    def test_constant_is_zeroth_mode(self, grid64):
        coeffs = cosine_coefficients(Field.constant(grid64, 2.5))
        assert coeffs[0] == pytest.approx(2.5)
        np.testing.assert_allclose(coeffs[1:], 0.0, atol=1e-14)

    def test_first_mode(self, grid64):
        coeffs = cosine_coefficients(mode(grid64, 1))
        assert coeffs[1] == pytest.approx(1.0)
        np.testing.assert_allclose(np.delete(coeffs, 1), 0.0, atol=1e-14)

    @given(values=values32)
    @settings(max_examples=100, deadline=None)
    def test_round_trip(self, values):
        field = Field(GRID, values)
        back = from_cosine_coefficients(cosine_coefficients(field), GRID)
        np.testing.assert_allclose(back.values, values, atol=1e-12 * max(1.0, np.abs(values).max()))

    def test_two_dimensional_mode(self, grid2d):
        field = Field.from_function(grid2d, lambda x, y: np.cos(np.pi * x) * np.cos(2 * np.pi * y))
        coeffs = cosine_coefficients(field)
        assert coeffs[1, 2] == pytest.approx(1.0)
        coeffs[1, 2] = 0.0
        np.testing.assert_allclose(coeffs, 0.0, atol=1e-14)


class TestLaplacian:
    def test_constant_has_zero_laplacian(self, grid64):
        np.testing.assert_allclose(laplacian(Field.constant(grid64, 4.0)).values, 0.0, atol=1e-10)

    def test_first_mode_is_eigenfunction(self, grid64):
        lam = eigenvalues(grid64)[1]
        np.testing.assert_allclose(laplacian(mode(grid64, 1)).values, -lam * mode(grid64, 1).values,
                                   atol=1e-10 * lam)

    def test_eigenvalues(self, grid64):
        h = grid64.spacing[0]
        assert eigenvalues(grid64)[3] == pytest.approx(2 / h ** 2 * (1 - np.cos(3 * np.pi / 64)))
        assert eigenvalues(grid64)[0] == 0.0

    @pytest.mark.parametrize("dim", [1, 2])
    def test_matches_three_point_stencil(self, dim):
        grid = Grid.uniform(dim, 1.0, 24)
        bump = Field.from_function(grid, lambda *x: sum((xi - 0.3) ** 2 for xi in x) * (2.0 - x[0]))
        spectral = laplacian(bump, d=0.7).values
        stencil = stencil_laplacian(bump, d=0.7).values
        np.testing.assert_allclose(spectral, stencil, atol=1e-9 * np.abs(stencil).max())

    def test_converges_to_continuum_second_derivative(self):
        errors = []
        for n in (32, 64, 128):
            grid = Grid.uniform(1, 1.0, n)
            exact = -(2 * np.pi) ** 2 * mode(grid, 2).values
            errors.append(np.abs(laplacian(mode(grid, 2)).values - exact).max())
        # second order: halving h quarters the error
        assert errors[1] == pytest.approx(errors[0] / 4, rel=0.05)
        assert errors[2] == pytest.approx(errors[1] / 4, rel=0.05)


class TestHeatSemigroup:
    def test_constant_is_preserved(self, grid64):
        out = apply_heat_semigroup(Field.constant(grid64, 3.0), 2.0, 0.7)
        np.testing.assert_allclose(out.values, 3.0, rtol=1e-13)

    def test_mode_decays_exponentially(self, grid64):
        d, t = 0.5, 0.1
        lam = eigenvalues(grid64)[1]
        out = apply_heat_semigroup(mode(grid64, 1), d, t)
        np.testing.assert_allclose(out.values, np.exp(-t * d * lam) * mode(grid64, 1).values, atol=1e-13)

    def test_long_time_limit_is_mean(self, grid64, rng):
        field = Field(grid64, rng.uniform(0, 3, 64))
        out = apply_heat_semigroup(field, 1.0, 1e3)
        np.testing.assert_allclose(out.values, field.mean(), rtol=1e-12)

    def test_negative_time_rejected(self, grid64):
        with pytest.raises(ValidationError):
            apply_heat_semigroup(Field.constant(grid64, 1.0), 1.0, -1.0)

    @given(values=values32, s=times, t=times, d=diffusivities)
    @settings(max_examples=100, deadline=None)
    def test_semigroup_property(self, values, s, t, d):
        field = Field(GRID, values)
        twice = apply_heat_semigroup(apply_heat_semigroup(field, d, s), d, t)
        once = apply_heat_semigroup(field, d, s + t)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-12 * max(1.0, np.abs(values).max()))

    @given(values=values32, t=times, d=diffusivities)
    @settings(max_examples=100, deadline=None)
    def test_mean_preserved(self, values, t, d):
        field = Field(GRID, values)
        out = apply_heat_semigroup(field, d, t)
        assert abs(out.mean() - field.mean()) <= 1e-12 * max(1.0, np.abs(values).max())

    @given(values=values32, t=times, d=diffusivities)
    @settings(max_examples=100, deadline=None)
    def test_maximum_principle(self, values, t, d):
        out = apply_heat_semigroup(Field(GRID, values), d, t).values
        slack = 1e-10 * max(1.0, np.abs(values).max())
        assert out.min() >= values.min() - slack
        assert out.max() <= values.max() + slack

    @given(values=values32, t=times, d=diffusivities)
    @settings(max_examples=50, deadline=None)
    def test_c1_and_c2_do_not_grow(self, values, t, d):
        field = Field(GRID, values)
        before, after = norms(field), norms(apply_heat_semigroup(field, d, t))
        assert after.c1 <= before.c1 * (1 + 1e-9) + 1e-12
        assert after.c2 <= before.c2 * (1 + 1e-9) + 1e-12


class TestNorms:
    def test_constant(self, grid64):
        n = norms(Field.constant(grid64, -2.0))
        assert (n.c0, n.c1, n.c2) == pytest.approx((2.0, 2.0, 2.0), abs=1e-12)

    def test_first_mode(self, grid64):
        n = norms(mode(grid64, 1))
        h = grid64.spacing[0]
        assert n.c0 == pytest.approx(np.cos(np.pi * h / 2), abs=1e-12)
        assert abs(n.c0 - 1.0) < 1e-3
        assert n.c1 == pytest.approx(1 + np.pi, rel=0.02)
        assert n.c2 == pytest.approx(1 + np.pi + np.pi ** 2, rel=0.02)

    def test_spectral_derivatives_of_a_mode(self, grid64):
        x = grid64.nodes()
        np.testing.assert_allclose(derivative(mode(grid64, 2)).values, -2 * np.pi * np.sin(2 * np.pi * x),
                                   atol=1e-11)
        np.testing.assert_allclose(second_derivative(mode(grid64, 2)).values,
                                   -4 * np.pi ** 2 * np.cos(2 * np.pi * x), atol=1e-9)

    def test_mixed_derivative(self, grid2d):
        field = Field.from_function(grid2d, lambda x, y: np.cos(np.pi * x) * np.cos(np.pi * y))
        x, y = grid2d.mesh()
        np.testing.assert_allclose(second_derivative(field, 0, 1).values,
                                   np.pi ** 2 * np.sin(np.pi * x) * np.sin(np.pi * y), atol=1e-10)

    @given(values=values32)
    @settings(max_examples=100, deadline=None)
    def test_triple_is_monotone(self, values):
        n = norms(Field(GRID, values))
        assert 0 <= n.c0 <= n.c1 <= n.c2

    def test_batched_norms_match_single(self, grid64, rng):
        stack = rng.uniform(0, 1, size=(3, 5, 64))
        c0, c1, c2 = norm_components(stack, grid64)
        single = norms(Field(grid64, stack[2, 4]))
        assert (c0[2, 4], c1[2, 4], c2[2, 4]) == pytest.approx((single.c0, single.c1, single.c2))
        np.testing.assert_allclose(c1_norm_values(stack, grid64), c1)


class TestResample:
    def test_band_limited_field_is_reproduced(self, grid64):
        field = mode(grid64, 3) * 2.0 + Field.constant(grid64, 1.0)
        fine = resample(field, grid64.refined())
        x = fine.grid.nodes()
        np.testing.assert_allclose(fine.values, 1.0 + 2.0 * np.cos(3 * np.pi * x), atol=1e-12)

    def test_extent_mismatch(self, grid64):
        with pytest.raises(ValidationError):
            resample(Field.constant(grid64, 1.0), Grid.uniform(1, 2.0, 64))
