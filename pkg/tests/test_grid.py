import math

import numpy as np
import pytest

from dampedwave import (
    Field,
    Grid1D,
    first_eigenvalue,
    h1_seminorm,
    hm1_inner,
    hm1_norm,
    inverse_laplacian,
    l2_inner,
    l2_norm,
    laplacian,
    laplacian_eigenvalue,
    laplacian_eigenvector,
)


def dense_stiffness(grid):
    """Dense -Lap_h matrix, the oracle for every stencil identity."""
    n, dx = grid.n_interior, grid.dx
    a = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return a / dx**2


class TestGridConstruction:
    def test_spacing_identity(self):
        g = Grid1D.from_spacing(20.0, 0.1)
        assert g.n_interior == 399
        assert g.dx == 2.0 * 20.0 / 400.0

    def test_nodes_sit_at_minus_L_plus_i_dx(self):
        g = Grid1D(1.0, 3)
        assert np.allclose(g.nodes, [-0.5, 0.0, 0.5])

    def test_misfit_spacing_rejected(self):
        with pytest.raises(ValueError):
            Grid1D.from_spacing(1.0, 0.123456)

    def test_single_interior_node_allowed(self):
        # n = 1 grids back the scalar-recurrence oracles elsewhere
        g = Grid1D(1.0, 1)
        assert g.dx == 1.0

    def test_field_length_mismatch(self):
        g = Grid1D(1.0, 3)
        with pytest.raises(ValueError):
            Field(np.zeros(4), g)

    def test_field_rejects_nonfinite(self):
        g = Grid1D(1.0, 3)
        with pytest.raises(ValueError):
            Field(np.array([0.0, np.nan, 0.0]), g)

    def test_cross_grid_ops_rejected(self):
        a = Grid1D(1.0, 3).zeros()
        b = Grid1D(2.0, 3).zeros()
        with pytest.raises(ValueError):
            a + b


class TestLaplacian:
    def test_zero_field(self, reference_grid):
        out = laplacian(reference_grid.zeros())
        assert np.all(out.values == 0.0)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_eigenvector_matches_dense_matvec(self, reference_grid, k):
        g = reference_grid
        ek = laplacian_eigenvector(g, k)
        dense = dense_stiffness(g) @ ek.values
        assert np.allclose(laplacian(ek).values, -dense, rtol=1e-10, atol=1e-12)
        lam = laplacian_eigenvalue(g, k)
        assert np.allclose(laplacian(ek).values, -lam * ek.values, rtol=1e-10, atol=1e-12)

    def test_parabola_hand_stencil(self):
        # (L^2 - x^2) sampled on L = 1, n = 3; stencil evaluated by hand sums
        g = Grid1D(1.0, 3)
        v = Field(1.0 - g.nodes**2, g)
        padded = np.concatenate([[0.0], v.values, [0.0]])
        expected = (padded[:-2] - 2.0 * padded[1:-1] + padded[2:]) / g.dx**2
        assert np.allclose(laplacian(v).values, expected, rtol=0, atol=1e-14)


class TestInverseLaplacian:
    def test_zero_field(self, reference_grid):
        out = inverse_laplacian(reference_grid.zeros())
        assert np.all(out.values == 0.0)

    @pytest.mark.parametrize("k", [1, 3])
    def test_eigenvector_matches_dense_solve(self, reference_grid, k):
        g = reference_grid
        ek = laplacian_eigenvector(g, k)
        dense = np.linalg.solve(dense_stiffness(g), ek.values)
        got = inverse_laplacian(ek).values
        assert np.allclose(got, dense, rtol=1e-10, atol=1e-12)
        assert np.allclose(got, ek.values / laplacian_eigenvalue(g, k), rtol=1e-10)

    @pytest.mark.parametrize("n", [5, 47, 399, 1000])
    def test_roundtrip_random_fields(self, n):
        g = Grid1D(20.0, n)
        rng = np.random.default_rng(n)
        v = Field(rng.standard_normal(n), g)
        back = inverse_laplacian(-1.0 * laplacian(v))
        assert np.allclose(back.values, v.values, rtol=1e-10, atol=1e-12)

    def test_residual_contract(self, reference_grid):
        rng = np.random.default_rng(0)
        v = Field(rng.standard_normal(reference_grid.n_interior), reference_grid)
        w = inverse_laplacian(v)
        residual = np.abs(-laplacian(w).values - v.values)
        assert residual.max() <= 1e-12 * np.abs(v.values).max()


class TestNorms:
    def test_zero_field_norms(self, reference_grid):
        z = reference_grid.zeros()
        assert l2_norm(z) == 0.0
        assert h1_seminorm(z) == 0.0
        assert hm1_norm(z) == 0.0

    def test_constant_field_direct_summation(self, reference_grid):
        g = reference_grid
        ones = Field(np.ones(g.n_interior), g)
        expected = math.sqrt(sum(1.0 * 1.0 * g.dx for _ in range(g.n_interior)))
        assert l2_norm(ones) == pytest.approx(expected, rel=1e-14)
        assert l2_norm(ones) == pytest.approx(math.sqrt(399 * 0.1), rel=1e-12)

    def test_sech_profile_against_closed_form(self, reference_grid):
        # int of (4k sech(kx))^2 over the line is 32 k with k = sqrt(1-c^2);
        # the tail beyond |x| = 20 is below 1e-13, so the discrete sum agrees
        c = 0.2
        k = math.sqrt(1.0 - c * c)
        v = Field(4.0 * k / np.cosh(reference_grid.nodes * k), reference_grid)
        assert l2_norm(v) ** 2 == pytest.approx(32.0 * k, rel=5e-3)

    def test_h1_matches_dense_quadratic_form(self, reference_grid):
        g = reference_grid
        e1 = laplacian_eigenvector(g, 1)
        quad = e1.values @ dense_stiffness(g) @ e1.values * g.dx
        assert h1_seminorm(e1) == pytest.approx(math.sqrt(quad), rel=1e-12)

    def test_h1_homogeneity_exact(self, reference_grid):
        rng = np.random.default_rng(1)
        v = Field(rng.standard_normal(reference_grid.n_interior), reference_grid)
        assert h1_seminorm(2.0 * v) == 2.0 * h1_seminorm(v)

    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_hm1_eigenvector_against_dense_eigensolve(self, reference_grid, k):
        g = reference_grid
        ek = laplacian_eigenvector(g, k)
        eigvals, eigvecs = np.linalg.eigh(dense_stiffness(g))
        lam_dense = eigvals[k - 1]
        assert hm1_norm(ek) == pytest.approx(l2_norm(ek) / math.sqrt(lam_dense), rel=1e-9)

    def test_hm1_inner_symmetry(self, reference_grid):
        rng = np.random.default_rng(2)
        a = Field(rng.standard_normal(reference_grid.n_interior), reference_grid)
        b = Field(rng.standard_normal(reference_grid.n_interior), reference_grid)
        ab, ba = hm1_inner(a, b), hm1_inner(b, a)
        assert ab == pytest.approx(ba, rel=1e-12)

    def test_poincare_dual_bound(self, reference_grid):
        rng = np.random.default_rng(3)
        for _ in range(20):
            v = Field(rng.standard_normal(reference_grid.n_interior), reference_grid)
            assert hm1_norm(v) <= l2_norm(v) / math.sqrt(first_eigenvalue(reference_grid)) * (1 + 1e-12)

    def test_hm1_definite(self, reference_grid):
        rng = np.random.default_rng(4)
        v = Field(rng.standard_normal(reference_grid.n_interior), reference_grid)
        assert hm1_norm(v) > 0.0

    def test_duality_chain_exact(self, reference_grid):
        # ||v||_{H^-1} ||v||_{H^1} >= ||v||_{L2}^2 holds because both sides
        # are built from the same stencil matrix
        rng = np.random.default_rng(5)
        for _ in range(10):
            v = Field(rng.standard_normal(reference_grid.n_interior), reference_grid)
            assert hm1_norm(v) * h1_seminorm(v) >= l2_norm(v) ** 2 * (1 - 1e-10)


class TestFirstEigenvalue:
    def test_against_dense_eigensolve(self, reference_grid):
        eigvals = np.linalg.eigvalsh(dense_stiffness(reference_grid))
        assert first_eigenvalue(reference_grid) == pytest.approx(eigvals[0], rel=1e-11)

    def test_reference_value(self, reference_grid):
        # continuum value pi^2/(4 L^2) = 6.16850e-3; the discrete eigenvalue
        # sits (pi dx / (2L))^2 / 12 = 5.1e-6 relative below it
        lam = first_eigenvalue(reference_grid)
        assert lam == pytest.approx(0.0061685, abs=5e-8)
        continuum = math.pi**2 / (4 * 20.0**2)
        assert lam == pytest.approx(continuum, rel=1e-5)
        assert lam < continuum

    def test_single_node_matrix(self):
        # 1x1 stiffness matrix [2/dx^2] with dx = 1 has eigenvalue 2
        g = Grid1D(1.0, 1)
        assert first_eigenvalue(g) == pytest.approx(2.0 * (1 - math.cos(math.pi / 2)), rel=1e-14)
        assert first_eigenvalue(g) == pytest.approx(2.0, rel=1e-14)

    def test_refinement_monotone_to_continuum(self):
        continuum = math.pi**2 / (4 * 20.0**2)
        values = [first_eigenvalue(Grid1D.from_spacing(20.0, dx)) for dx in (0.4, 0.2, 0.1, 0.05)]
        errors = [continuum - v for v in values]
        assert all(e > 0 for e in errors)
        assert all(errors[i + 1] < errors[i] for i in range(len(errors) - 1))
        assert errors[-1] / errors[0] < 0.02

    def test_mode_index_out_of_range(self, reference_grid):
        with pytest.raises(ValueError):
            laplacian_eigenvalue(reference_grid, 0)
        with pytest.raises(ValueError):
            laplacian_eigenvector(reference_grid, reference_grid.n_interior + 1)
