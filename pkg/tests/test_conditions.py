# test_conditions.py
"""Sampled structural checks on built-in and hand-made networks."""

import numpy as np
import pytest

from rdlab.conditions import (
    ConditionManager,
    analyse_structure,
    check_9prime,
    check_entropy_dissipation,
    check_entropy_variant,
    check_gradient_growth,
    check_mass_conservation,
    check_mass_dissipation,
    check_quasi_positivity,
)
from rdlab.conditions.registry import list_conditions
from rdlab.conditions.sampling import lattice_axis, ray_directions
from rdlab.ledger import ledger
from rdlab.networks import eval_f, get_network, polynomial_network



def pair(name, f1, f2, M=1.0):
    return polynomial_network(name, ("X", "Y"), [f1, f2], growth_constant=M)


CONSTANT_LOSS = pair("constant_loss", [(-1.0, (0, 0))], [])
MUTUAL = pair("mutual", [(1.0, (0, 1))], [(1.0, (1, 0))])
PRODUCT = pair("product", [(1.0, (1, 1))], [(1.0, (1, 1))])
DECAY = pair("decay", [(-1.0, (1, 0))], [(-1.0, (0, 1))])
EXCHANGE = pair("swap", [(1.0, (0, 1)), (-1.0, (1, 0))], [(1.0, (1, 0)), (-1.0, (0, 1))])
SELF_GROWTH = pair("self_growth", [(1.0, (1, 0))], [])
CUBIC = pair("cubic", [(1.0, (3, 0))], [], M=1.0)
QUADRATIC_SLOPE = pair("quadratic_slope", [(-1.0, (2, 1))], [], M=1.0)

FAST_BUDGET = 4_000

ALL_CHECKS = [check_quasi_positivity, check_mass_dissipation, check_mass_conservation,
              check_entropy_dissipation, check_gradient_growth, check_9prime]


class TestQuasiPositivity:
    def test_four_species_holds(self, four):
        assert check_quasi_positivity(four, FAST_BUDGET).holds

    def test_constant_loss_violated(self):
        result = check_quasi_positivity(CONSTANT_LOSS, FAST_BUDGET)
        assert not result.holds
        assert result.witness[0] == 0.0
        assert result.margin == pytest.approx(-1.0)

    def test_mutual_production_holds(self):
        assert check_quasi_positivity(MUTUAL, FAST_BUDGET).holds


class TestMass:
    def test_four_species_dissipates_and_conserves(self, four):
        assert check_mass_dissipation(four, FAST_BUDGET).holds
        result = check_mass_conservation(four, FAST_BUDGET)
        assert result.holds
        assert result.value == 0.0

    def test_product_violates_dissipation(self):
        result = check_mass_dissipation(PRODUCT, FAST_BUDGET)
        assert not result.holds
        assert result.margin < 0
        u = result.witness
        assert result.value == pytest.approx(2 * u[0] * u[1])

    def test_decay_dissipates_but_does_not_conserve(self):
        assert check_mass_dissipation(DECAY, FAST_BUDGET).holds
        result = check_mass_conservation(DECAY, FAST_BUDGET)
        assert not result.holds
        assert result.margin < 0

    def test_exchange_conserves(self):
        assert check_mass_conservation(EXCHANGE, FAST_BUDGET).holds

    @pytest.mark.parametrize("name", ["four_species", "dissipative_four_species", "linear_decay",
                                      "exchange", "cross_activation", "zero_field"])
    def test_conservation_implies_dissipation(self, name):
        net = get_network(name)
        if check_mass_conservation(net, FAST_BUDGET).holds:
            assert check_mass_dissipation(net, FAST_BUDGET).holds

    def test_cross_activation_violates_dissipation(self):
        assert not check_mass_dissipation(get_network("cross_activation"), FAST_BUDGET).holds


class TestEntropy:
    def test_value_at_single_point(self, four):
        u = np.array([2.0, 1.0, 1.0, 1.0])
        assert float(np.sum(eval_f(four, u) * np.log(u))) == pytest.approx(-np.log(2))

    def test_four_species_holds(self, four):
        assert check_entropy_dissipation(four, FAST_BUDGET).holds

    def test_self_growth_violated(self):
        result = check_entropy_dissipation(SELF_GROWTH, FAST_BUDGET)
        assert not result.holds
        u = result.witness
        assert u[0] > 1
        assert result.value == pytest.approx(u[0] * np.log(u[0]))

    def test_dissipative_network_fails_entropy(self):
        assert not check_entropy_dissipation(get_network("dissipative_four_species"), FAST_BUDGET).holds

    def test_variant_is_informational(self, four):
        result = check_entropy_variant(four, FAST_BUDGET)
        assert result.holds is None
        assert np.isfinite(result.fitted)


class TestGrowth:
    def test_four_species_fitted_constant_is_one(self, four):
        result = check_gradient_growth(four, FAST_BUDGET)
        assert result.holds
        assert result.fitted == pytest.approx(1.0, abs=1e-9)
        assert result.fitted <= 1.0 + 1e-9

    def test_cubic_ratio_grows(self):
        result = check_gradient_growth(CUBIC, FAST_BUDGET)
        assert not result.holds
        assert result.details["growing"]
        ratios = [r for _, r in result.details["far_field"]]
        assert ratios[-1] > 1e6 * ratios[0]

    def test_zero_field_fits_zero(self):
        result = check_gradient_growth(get_network("zero_field"), FAST_BUDGET)
        assert result.holds
        assert result.fitted == 0.0

    def test_four_species_weaker_condition(self, four):
        result = check_9prime(four, FAST_BUDGET)
        assert result.holds
        assert result.fitted <= 1.0

    def test_quadratic_slope_fails_jacobian_part(self):
        result = check_9prime(QUADRATIC_SLOPE, FAST_BUDGET)
        assert not result.holds
        assert result.details["failing_part"] == "jacobian"

    def test_linear_decay_weaker_condition(self):
        result = check_9prime(DECAY, FAST_BUDGET)
        assert result.holds


class TestSoundness:
    @pytest.mark.parametrize("net", [PRODUCT, DECAY, SELF_GROWTH, CONSTANT_LOSS, MUTUAL])
    @pytest.mark.parametrize("check", ALL_CHECKS[:4], ids=lambda c: c.__name__)
    def test_violations_carry_reproducible_witness(self, net, check):
        result = check(net, FAST_BUDGET)
        if result.holds:
            return
        assert np.all(result.witness >= 0)
        assert result.margin < 0
        f = eval_f(net, result.witness)
        if check is check_quasi_positivity:
            reproduced = f.min()
        elif check is check_entropy_dissipation:
            reproduced = float(np.sum(f * np.log(result.witness)))
        else:
            reproduced = float(f.sum())
        assert abs(reproduced - result.value) <= 1e-12 * max(1.0, abs(result.value))

    def test_searches_are_deterministic(self):
        a = check_mass_dissipation(PRODUCT, FAST_BUDGET)
        b = check_mass_dissipation(PRODUCT, FAST_BUDGET)
        np.testing.assert_array_equal(a.witness, b.witness)
        assert a.margin == b.margin



class TestSampling:
    def test_lattice_includes_zero(self):
        axis = lattice_axis("zero", 100.0, 8, 1e-3)
        assert axis[0] == 0.0 and axis[-1] == pytest.approx(100.0) and len(axis) == 8

    def test_positive_lattice(self):
        assert lattice_axis("positive", 100.0, 8, 1e-3).min() > 0

    def test_ray_directions_are_unit_and_respect_pin(self):
        directions = ray_directions(3, pinned=1)
        np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)
        assert np.all(directions[:, 1] == 0.0)


class TestManager:
    def test_four_species_report(self, four):
        report = analyse_structure(four, FAST_BUDGET)
        assert report.theorem_conditions_hold
        assert report.mass_conservation.holds
        assert report.alt_growth_9prime.holds
        assert set(report.to_dict()["conditions"]) == set(list_conditions())

    def test_dissipative_network_report(self):
        report = analyse_structure(get_network("dissipative_four_species"), FAST_BUDGET)
        assert not report.theorem_conditions_hold
        assert report.mass_dissipation.holds
        assert not report.mass_conservation.holds
        assert not report.entropy_dissipation.holds
        assert report.gradient_growth.holds

    def test_checks_are_recorded_in_ledger(self, four):
        manager = ConditionManager()
        manager.run_check("mass_dissipation", four, FAST_BUDGET)
        records = ledger.get_all_records()
        assert len(records) == 1
        assert records[0]["status"] == "success"

    def test_unknown_check(self, four):
        with pytest.raises(KeyError):
            ConditionManager().run_check("no_such_check", four)

    def test_progress_bar_follows_flag(self, four, capsys):
        ConditionManager().analyse(four, FAST_BUDGET, progress=True)
        assert "conditions four_species" in capsys.readouterr().err
        ConditionManager().analyse(four, FAST_BUDGET, progress=False)
        assert "conditions four_species" not in capsys.readouterr().err

    def test_format_report_without_color(self, four):
        manager = ConditionManager()
        text = manager.format_report(manager.analyse(four, FAST_BUDGET), colored=False)
        assert "\x1b[" not in text
        assert "Global existence conditions (3), (4), (8), (9) hold" in text
