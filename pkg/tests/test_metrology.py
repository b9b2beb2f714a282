import json
import math

import numpy as np
import pytest

from twocolour.detection import DetectionPattern, add_background, scan_fringe
from twocolour.elements import min_loss_for_delta
from twocolour.fock import FockState, Path
from twocolour.metrology import (
    DegeneratePointError,
    SensitivityError,
    baselines,
    classical_fisher,
    combined_estimate,
    fisher_to_dL,
    fringe_sensitivity,
    hamiltonian_variance,
    qcrb,
    scenario_sensitivity,
    state_sensitivity,
)
from twocolour.scenario import Scenario, ThetaGrid
from twocolour.sources import default_registry

BUNCHED = [DetectionPattern.parse("s:1,0 i:1,0"), DetectionPattern.parse("s:0,1 i:0,1")]
ANTI = [DetectionPattern.parse("s:1,0 i:0,1"), DetectionPattern.parse("s:0,1 i:1,0")]


def psi(m):
    return Scenario(m=m).input_state.components[0][1]


def ideal(m, **kw):
    return Scenario(m=m, delta_s=0.0, delta_i=0.0, **kw)


def brute_variance(state):
    """Variance of sum_k omega_k n_k over arm b from the amplitudes directly."""
    reg = state.registry
    w = np.zeros(len(reg))
    for mode in reg.select(path=Path.B):
        w[reg.index(mode)] = reg.frequency(mode)
    probs = np.array([abs(a) ** 2 for _, a in state])
    h = np.array([np.dot(w, occ) for occ, _ in state])
    return float(probs @ h**2 - (probs @ h) ** 2)


class TestHamiltonianVariance:
    @pytest.mark.parametrize("m", [2, 4, 6, 8, 10])
    def test_closed_form(self, m):
        assert hamiltonian_variance(psi(m)) == pytest.approx((m * m + 4 * m) / 12, abs=1e-10)

    @pytest.mark.parametrize("m", [2, 4, 6, 8, 10])
    def test_matches_amplitude_sum(self, m):
        assert hamiltonian_variance(psi(m)) == pytest.approx(brute_variance(psi(m)), abs=1e-10)

    def test_four_photon_flat_sum(self):
        # r pairs in arm b with probability 1/3, each pair carrying 2 omega_p
        n = 2
        mean = 2 * sum(range(n + 1)) / (n + 1)
        second = 4 * n * (n + 1) * (2 * n + 1) / 6 / (n + 1)
        assert hamiltonian_variance(psi(4)) == pytest.approx(second - mean**2)
        assert second - mean**2 == pytest.approx(8 / 3)

    def test_vacuum(self):
        assert hamiltonian_variance(FockState.vacuum(default_registry(), 2)) == 0.0

    def test_unnormalised_rejected(self):
        with pytest.raises(SensitivityError):
            hamiltonian_variance(psi(4).scaled(1.1))

    def test_physical_units_scale(self):
        sc = Scenario(m=4, units="physical")
        omega = sc.registry.omega_pump
        var = hamiltonian_variance(sc.input_state.components[0][1])
        assert var == pytest.approx((omega / 299_792_458.0) ** 2 * 32 / 12, rel=1e-12)


class TestQCRB:
    @pytest.mark.parametrize("m", [2, 4, 6, 8, 10])
    def test_ratio_to_sql(self, m):
        rep = state_sensitivity(psi(m), m)
        assert rep.dL_over_sql == pytest.approx(math.sqrt(3 / (m + 4)), abs=1e-10)

    def test_four_photon_value(self):
        assert state_sensitivity(psi(4), 4).dL_over_sql == pytest.approx(0.61, abs=0.005)

    def test_two_photon_root_two(self):
        assert 1 / state_sensitivity(psi(2), 2).dL_over_sql == pytest.approx(math.sqrt(2))

    @pytest.mark.parametrize("m", [2, 4, 6, 8])
    def test_energy_form(self, m):
        energy = m * 1.0
        assert qcrb(psi(m)) == pytest.approx(math.sqrt(3 / (energy * (m + 4))))

    def test_repetitions(self):
        assert qcrb(psi(4), nu=9) == pytest.approx(qcrb(psi(4)) / 3)

    def test_zero_variance(self):
        with pytest.raises(SensitivityError):
            qcrb(FockState.vacuum(default_registry(), 2))

    @pytest.mark.parametrize("m", [2, 4, 6, 8])
    def test_distinguishable_fixed_root_two(self, m):
        sc = Scenario(m=m, mode="distinguishable")
        rep = state_sensitivity(sc.input_state.components[0][1], m)
        assert rep.dL_over_sql == pytest.approx(1 / math.sqrt(2), abs=1e-10)

    def test_monotone_in_m(self):
        ratios = [state_sensitivity(psi(m), m).dL_over_sql for m in (2, 4, 6, 8, 10)]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))


class TestBaselines:
    def test_heisenberg_four(self):
        b = baselines(4, 1.0)
        assert b.heisenberg_dL / b.sql_dL == pytest.approx(0.5)

    def test_single_photon(self):
        b = baselines(1, 2.0)
        assert b.sql_dL == b.heisenberg_dL

    @pytest.mark.parametrize("units", ["natural", "physical"])
    def test_energy_form_reconciles(self, units):
        b = baselines(6, 2.6e15 if units == "physical" else 1.0, units=units)
        assert b.energy_sql_dL == pytest.approx(b.sql_dL, rel=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            baselines(0, 1.0)
        with pytest.raises(ValueError):
            baselines(2, 1.0, E=-1.0)


class TestClassicalFisher:
    def test_two_photon_saturates(self):
        sc = ideal(2)
        grid = np.linspace(0.05, math.pi / 2 - 0.05, 41)
        best = max(classical_fisher(sc, t, BUNCHED + ANTI) for t in grid)
        assert fisher_to_dL(best, sc.registry) * math.sqrt(2) == pytest.approx(1 / math.sqrt(2), abs=1e-6)

    def test_four_photon_all_patterns_near_quantum(self):
        sc = ideal(4, theta_grid=ThetaGrid(0.01, math.pi / 2 - 0.01, 61))
        rep = scenario_sensitivity(sc)
        assert rep.dL_over_sql == pytest.approx(math.sqrt(3 / 8), rel=0.05)
        assert rep.dL >= rep.qcrb_dL - 1e-9

    def test_matches_analytic_derivative(self):
        sc = ideal(2)
        for t in (0.3, 0.9, 1.3):
            p, dp = 0.5 * math.cos(t) ** 2, -0.5 * math.sin(2 * t)
            exact = dp**2 / p + dp**2 / (1 - p)
            assert classical_fisher(sc, t, BUNCHED[:1]) == pytest.approx(exact, rel=1e-6)

    def test_matches_analytic_derivative_with_defect(self):
        ds, di = 0.26, -0.04
        sc = Scenario(m=2, delta_s=ds, delta_i=di)
        k = (1 - min_loss_for_delta(ds)) * (1 - min_loss_for_delta(di))
        for t in (0.4, 1.1):
            p = k * 0.5 * math.sin(t - di / 2) ** 2
            dp = k * 0.5 * math.sin(2 * (t - di / 2))
            exact = dp**2 / p + dp**2 / (1 - p)
            assert classical_fisher(sc, t, [ANTI[0]]) == pytest.approx(exact, rel=1e-6)

    def test_degenerate_point(self):
        with pytest.raises(DegeneratePointError):
            classical_fisher(ideal(2), 0.0, ANTI)

    def test_order_independent(self):
        sc = Scenario(m=4)
        pats = [DetectionPattern.parse(x) for x in ("s:1,1 i:1,1", "s:2,0 i:1,1", "s:0,2 i:2,0")]
        assert classical_fisher(sc, 0.4, pats) == pytest.approx(classical_fisher(sc, 0.4, pats[::-1]), rel=1e-12)

    @pytest.mark.parametrize("m", [2, 4])
    @pytest.mark.parametrize("eta", [{}, {"s": 0.8, "i:out2": 0.5}])
    def test_bounded_by_quantum(self, m, eta):
        sc = Scenario(m=m, eta=eta)
        bound = 4 * (m * m + 4 * m) / 12
        for t in np.linspace(0.1, 3.0, 9):
            assert classical_fisher(sc, t) <= bound * (1 + 1e-6)


class TestFringeSensitivity:
    def scan(self, **kw):
        return scan_fringe(ideal(2, **kw), BUNCHED)

    def test_two_outcome_fringe_ideal(self):
        assert fringe_sensitivity(self.scan()).dL_over_sql == pytest.approx(1 / math.sqrt(2), abs=1e-9)

    @pytest.mark.parametrize("V,target", [(0.88, 0.80), (math.sqrt(0.5), 1.00)])
    def test_visibility_thresholds(self, V, target):
        s = self.scan()
        b = s.values.max() * (1 - V) / (2 * V)
        rep = fringe_sensitivity(add_background(s, b))
        assert rep.dL_over_sql == pytest.approx(target, abs=0.01)
        assert rep.dL_over_sql == pytest.approx(1 / (math.sqrt(2) * V), abs=1e-8)

    def test_matches_binary_classical_fisher(self):
        sc = ideal(2, theta_grid=ThetaGrid(0, 2 * math.pi, 721))
        scan = scan_fringe(sc, BUNCHED[:1])
        rep = fringe_sensitivity(scan)
        f = classical_fisher(sc, rep.best_theta, BUNCHED[:1])
        assert rep.fisher_info == pytest.approx(f, rel=1e-6)

    def test_flat_fringe(self):
        flat = scan_fringe(ideal(2), BUNCHED + ANTI)
        with pytest.raises(SensitivityError):
            fringe_sensitivity(flat)

    def test_distinguishable_pairs_bound(self):
        # counts cannot tell the pairs apart, so the root-two bound is only
        # approached where one outcome dominates
        sc = Scenario(m=4, mode="distinguishable", delta_s=0, delta_i=0, theta_grid=ThetaGrid(0.002, 1.5, 40))
        rep = scenario_sensitivity(sc)
        assert rep.dL_over_sql >= 1 / math.sqrt(2) - 1e-9
        assert rep.dL_over_sql == pytest.approx(1 / math.sqrt(2), abs=1e-4)
        assert rep.qcrb_dL * math.sqrt(4) == pytest.approx(1 / math.sqrt(2))

    def test_report_units(self):
        data = fringe_sensitivity(self.scan()).to_dict()
        assert data["dL"]["unit"] == "c/omega_p"
        assert data["dL_over_sql"]["unit"] == "dimensionless"
        json.dumps(data)


class TestCombined:
    def test_fisher_addition(self):
        assert combined_estimate([1.0, 1.0], [1, 1]) == pytest.approx(1 / math.sqrt(2))

    def test_quoted_values_do_not_give_quoted_combination(self):
        value = combined_estimate([1.18, 1.82, 1.75], [1, 4, 4])
        assert value == pytest.approx(0.5563, abs=1e-4)
        assert abs(value - 0.72) > 0.1
