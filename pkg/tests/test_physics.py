import math

import numpy as np
import pytest

from dampedwave import (
    ConstantDamping,
    KleinGordon,
    LinearMass,
    PowerDecayDamping,
    PowerGrowthDamping,
    SineGordon,
    TailoredDamping,
    ZeroDamping,
    admissible_alpha,
    first_eigenvalue,
    initial_profile,
    lojasiewicz_theta,
    preset_damping,
)

ALL_MODELS = [SineGordon(1.0), SineGordon(2.5), KleinGordon(1.0, 3.0), KleinGordon(-0.1, 3.0), KleinGordon(0.3, 2.5), LinearMass(1.0), LinearMass(-0.4)]


@pytest.mark.parametrize("nl", ALL_MODELS)
def test_potential_derivative_is_force(nl):
    # centered finite difference of the potential reproduces the force term
    rng = np.random.default_rng(42)
    s = rng.uniform(-5.0, 5.0, size=100)
    eps = 1e-5
    approx = (nl.potential(s + eps) - nl.potential(s - eps)) / (2 * eps)
    assert np.allclose(approx, nl.force(s), rtol=1e-6, atol=1e-8)


@pytest.mark.parametrize("nl", ALL_MODELS)
def test_force_prime_by_finite_differences(nl):
    rng = np.random.default_rng(43)
    s = rng.uniform(-5.0, 5.0, size=100)
    s = s[np.abs(s) > 1e-3]  # |s|^(p-1) kinks at 0 for fractional p
    eps = 1e-6
    approx = (nl.force(s + eps) - nl.force(s - eps)) / (2 * eps)
    assert np.allclose(approx, nl.force_prime(s), rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("nl", ALL_MODELS)
def test_force_is_odd_exactly(nl):
    rng = np.random.default_rng(44)
    s = rng.uniform(-5.0, 5.0, size=50)
    assert np.array_equal(nl.force(-s), -nl.force(s))


@pytest.mark.parametrize("nl", ALL_MODELS)
def test_potential_vanishes_at_zero_and_force_at_zero(nl):
    assert nl.potential(0.0) == 0.0
    assert nl.force(0.0) == 0.0


def test_klein_gordon_rejects_p_below_one():
    with pytest.raises(ValueError):
        KleinGordon(1.0, 0.5)


def test_sine_gordon_rejects_nonpositive_b():
    with pytest.raises(ValueError):
        SineGordon(0.0)


class TestPresetDampings:
    def test_h0_is_zero(self):
        h = preset_damping(0)
        for t in (0.0, 1.0, 57.3, 200.0):
            assert h(t) == 0.0

    def test_h2_at_t_three(self):
        # 1/sqrt(3+1) = 0.5
        assert preset_damping(2)(3.0) == pytest.approx(0.5, rel=1e-15)

    def test_h6_at_t_four(self):
        # 4^(3/2) = 8
        assert preset_damping(6)(4.0) == pytest.approx(8.0, rel=1e-15)

    def test_h1_constant_one(self):
        assert preset_damping(1)(0.0) == 1.0
        assert preset_damping(1)(123.0) == 1.0

    def test_h3_reciprocal(self):
        assert preset_damping(3)(4.0) == pytest.approx(0.2, rel=1e-15)

    @pytest.mark.parametrize("index", range(7))
    def test_nonnegative_on_horizon(self, index):
        h = preset_damping(index)
        t = np.linspace(0.0, 200.0, 401)
        assert all(h(float(s)) >= 0.0 for s in t)

    def test_out_of_range_index(self):
        with pytest.raises(ValueError):
            preset_damping(7)
        with pytest.raises(ValueError):
            preset_damping(-1)


class TestAdmissibility:
    def test_h2_admissible_at_theta_half(self):
        assert admissible_alpha(preset_damping(2), 0.5) is True  # 1/2 < 1

    def test_h3_boundary_case_inadmissible(self):
        # alpha = 1 sits exactly on the boundary theta/(1-theta) = 1
        assert preset_damping(3).alpha == 1.0
        assert admissible_alpha(preset_damping(3), 0.5) is False

    def test_h2_inadmissible_at_theta_quarter(self):
        assert admissible_alpha(preset_damping(2), 0.25) is False  # 1/2 >= 1/3

    def test_zero_and_constant_count_as_alpha_zero(self):
        assert admissible_alpha(ZeroDamping(), 0.25) is True
        assert admissible_alpha(ConstantDamping(5.0), 0.25) is True

    def test_tailored_damping_not_applicable(self):
        assert admissible_alpha(TailoredDamping(1.0, -2.0), 0.5) is None

    def test_growth_family_window(self):
        assert admissible_alpha(PowerGrowthDamping(1.0, 0.5), 0.5) is True
        assert admissible_alpha(PowerGrowthDamping(1.0, 1.5), 0.5) is False

    def test_theta_domain_checked(self):
        with pytest.raises(ValueError):
            admissible_alpha(ZeroDamping(), 0.75)


class TestLojasiewiczTheta:
    def test_sine_gordon_half(self):
        assert lojasiewicz_theta(SineGordon(1.0), 0.00617) == 0.5

    def test_klein_gordon_above_threshold(self):
        assert lojasiewicz_theta(KleinGordon(1.0, 3.0), 0.00617) == 0.5

    def test_klein_gordon_degenerate(self):
        # a = -0.1 < -mu0: theta = 1/(p+1)
        assert lojasiewicz_theta(KleinGordon(-0.1, 3.0), 0.00617) == pytest.approx(0.25)

    def test_linear_mass_half(self):
        assert lojasiewicz_theta(LinearMass(1.0), 0.00617) == 0.5

    def test_uses_supplied_mu0(self, reference_grid):
        mu0 = first_eigenvalue(reference_grid)
        assert lojasiewicz_theta(KleinGordon(-mu0 / 2, 3.0), mu0) == 0.5
        assert lojasiewicz_theta(KleinGordon(-2 * mu0, 3.0), mu0) == pytest.approx(0.25)


class TestInitialProfile:
    def test_displacement_is_zero(self, reference_grid):
        u0, _ = initial_profile(reference_grid, 0.2)
        assert np.all(u0.values == 0.0)

    def test_kick_at_origin(self, reference_grid):
        # 4 sqrt(0.96) at x = 0
        _, v0 = initial_profile(reference_grid, 0.2)
        center = np.argmin(np.abs(reference_grid.nodes))
        assert reference_grid.nodes[center] == pytest.approx(0.0, abs=1e-12)
        assert v0.values[center] == pytest.approx(4.0 * math.sqrt(0.96), rel=1e-12)

    def test_kick_even_symmetry(self, reference_grid):
        _, v0 = initial_profile(reference_grid, 0.2)
        assert np.allclose(v0.values, v0.values[::-1], rtol=1e-12)

    @pytest.mark.parametrize("c", [0.0, 1.0, -0.3, 1.7])
    def test_wave_speed_domain(self, reference_grid, c):
        with pytest.raises(ValueError):
            initial_profile(reference_grid, c)


class TestDampingFamilies:
    def test_power_growth_at_zero(self):
        assert PowerGrowthDamping(1.0, 0.5)(0.0) == 0.0
        assert PowerGrowthDamping(2.0, 0.0)(0.0) == 2.0

    def test_power_decay_value(self):
        assert PowerDecayDamping(3.0, 1.0)(2.0) == pytest.approx(1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            PowerDecayDamping(0.0, 1.0)
        with pytest.raises(ValueError):
            PowerGrowthDamping(1.0, -0.5)
        with pytest.raises(ValueError):
            ConstantDamping(-1.0)
        with pytest.raises(ValueError):
            TailoredDamping(1.0, -0.5)
        with pytest.raises(ValueError):
            TailoredDamping(-1.0, -2.0)
