import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twocolour.detection import DetectionPattern, pattern_probability, scan_fringe
from twocolour.elements import (
    BeamsplitterSpec,
    LossChannel,
    MissingAncillaError,
    PathLengthElement,
    apply_beamsplitter,
    apply_loss,
    apply_path_length,
    beamsplitter_block,
    beamsplitter_transform,
    min_loss_for_delta,
)
from twocolour.fock import Colour, FockState, ModeId, ModeRegistry, ModeTransform, Path, apply_mode_transform
from twocolour.scenario import Scenario
from twocolour.sources import SourceSpec, default_registry, postselect_m, sagnac_state

SA, SB = ModeId(Colour.SIGNAL, Path.A), ModeId(Colour.SIGNAL, Path.B)
IA, IB = ModeId(Colour.IDLER, Path.A), ModeId(Colour.IDLER, Path.B)
S1 = ModeId(Colour.SIGNAL, Path.OUT1)


def psi(m, theta_p=0.0):
    return postselect_m(sagnac_state(SourceSpec(0.1, theta_p, m)), m)


class TestPathLength:
    def test_pair_phase(self):
        state = psi(2)
        theta = 0.7
        out = apply_path_length(state, PathLengthElement(theta))
        ratio = out.amplitude({SB: 1, IB: 1}) / state.amplitude({SB: 1, IB: 1})
        assert ratio == pytest.approx(cmath.exp(-2j * theta), abs=1e-14)
        assert out.amplitude({SA: 1, IA: 1}) == state.amplitude({SA: 1, IA: 1})

    def test_zero_length_identity(self):
        state = psi(4)
        assert apply_path_length(state, PathLengthElement(0.0)).amplitudes == state.amplitudes

    def test_six_photon_far_term(self):
        state = psi(6)
        theta = 0.3
        out = apply_path_length(state, PathLengthElement(theta))
        ratio = out.amplitude({SB: 3, IB: 3}) / state.amplitude({SB: 3, IB: 3})
        assert ratio == pytest.approx(cmath.exp(-6j * theta), abs=1e-14)

    def test_single_colour_uses_own_frequency(self):
        reg = default_registry()
        state = FockState.basis(reg, {SB: 1}, 2)
        out = apply_path_length(state, PathLengthElement(1.0))
        assert out.amplitude({SB: 1}) == pytest.approx(cmath.exp(-1j * 720 / 625))

    @given(st.floats(-5, 5), st.floats(-5, 5))
    @settings(max_examples=25, deadline=None)
    def test_additive(self, l1, l2):
        state = psi(4, 0.2)
        two = apply_path_length(apply_path_length(state, PathLengthElement(l1)), PathLengthElement(l2))
        one = apply_path_length(state, PathLengthElement(l1 + l2))
        for occ, amp in one:
            assert two.amplitudes[occ] == pytest.approx(amp, abs=1e-12)

    def test_norm_preserved(self):
        state = psi(6)
        assert apply_path_length(state, PathLengthElement(2.3)).norm() == pytest.approx(1.0)


class TestBeamsplitter:
    def test_zero_delta_unitary(self):
        t = beamsplitter_transform(BeamsplitterSpec({}), default_registry())
        assert t.unitary
        np.testing.assert_allclose(beamsplitter_block(0.0), np.array([[1, 1], [1, -1]]) / math.sqrt(2))

    def test_measured_delta_not_unitary(self):
        t = beamsplitter_transform(BeamsplitterSpec({Colour.SIGNAL: 0.26}), default_registry())
        assert not t.unitary
        block = beamsplitter_block(0.26)
        assert np.abs(block.conj().T @ block - np.eye(2)).max() > 0.1

    def test_twice_returns_input(self):
        reg = ModeRegistry([SA, SB])
        t = ModeTransform(beamsplitter_block(0.0), (SA, SB))
        state = FockState.basis(reg, {SA: 1}, 2)
        out = apply_mode_transform(apply_mode_transform(state, t), t)
        assert out.amplitude({SA: 1}) == pytest.approx(1.0)
        assert len(out) == 1

    def test_sign_convention_on_two_photons(self):
        # bunched outputs carry cos(theta)/sqrt2 at theta = 0
        out = Scenario(m=2, delta_s=0, delta_i=0).output(0.0).components[0][1]
        assert abs(out.amplitude({S1: 1, ModeId(Colour.IDLER, Path.OUT1): 1})) == pytest.approx(1 / math.sqrt(2))
        assert abs(out.amplitude({S1: 1, ModeId(Colour.IDLER, Path.OUT2): 1})) < 1e-14

    @given(st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False), min_size=6, max_size=6))
    @settings(max_examples=25, deadline=None)
    def test_unitary_preserves_random_norm(self, amps):
        reg = default_registry()
        occs = [{SA: 1}, {SB: 1}, {IA: 1}, {SA: 1, IB: 1}, {SB: 2}, {SA: 1, SB: 1, IA: 1}]
        state = FockState.vacuum(reg, 4).scaled(0)
        for occ, a in zip(occs, amps):
            state = state + FockState.basis(reg, occ, 4).scaled(a)
        out = apply_beamsplitter(state, BeamsplitterSpec({}))
        assert out.norm() == pytest.approx(state.norm(), abs=1e-10)

    def test_renormalize_flag(self):
        state = psi(2)
        spec = BeamsplitterSpec({Colour.SIGNAL: 0.26, Colour.IDLER: -0.04})
        raw = apply_beamsplitter(state, spec)
        assert raw.norm() != pytest.approx(1.0, abs=1e-4)
        assert apply_beamsplitter(state, spec, renormalize=True).norm() == pytest.approx(1.0)

    def test_physical_block_is_contraction(self):
        for delta in (0.26, -0.04, 1.0, 2.5):
            block = beamsplitter_block(delta) * math.sqrt(1 - min_loss_for_delta(delta))
            assert np.linalg.norm(block, 2) <= 1 + 1e-12


class TestMinLoss:
    def test_measured_signal(self):
        assert min_loss_for_delta(0.26) == pytest.approx(0.1148, abs=5e-5)
        assert 0.110 <= min_loss_for_delta(0.26) <= 0.120

    def test_zero(self):
        assert min_loss_for_delta(0.0) == 0.0

    def test_measured_idler(self):
        assert min_loss_for_delta(-0.04) == pytest.approx(0.0196, abs=5e-5)
        assert min_loss_for_delta(-0.04) < 0.124

    def test_satisfies_bound_with_equality(self):
        for delta in (0.1, 0.26, 1.3):
            r = min_loss_for_delta(delta)
            assert math.sin(abs(delta) / 2) == pytest.approx(r / (1 - r))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            min_loss_for_delta(math.pi)


class TestLoss:
    def reg(self):
        return ModeRegistry([SA, SB, ModeId.ancilla_of(SA)])

    def test_unit_transmission_identity(self):
        state = FockState.basis(self.reg(), {SA: 2, SB: 1}, 3)
        out = apply_loss(state, LossChannel(SA, 1.0))
        assert out.amplitudes == pytest.approx(dict(state.amplitudes))

    def test_zero_transmission_empties_mode(self):
        reg = self.reg()
        out = apply_loss(FockState.basis(reg, {SA: 1}, 2), LossChannel(SA, 0.0))
        assert abs(out.amplitude({ModeId.ancilla_of(SA): 1})) == pytest.approx(1.0)
        assert len(out) == 1

    def test_missing_ancilla(self):
        reg = ModeRegistry([SA, SB])
        with pytest.raises(MissingAncillaError):
            apply_loss(FockState.basis(reg, {SA: 1}, 2), LossChannel(SA, 0.5))

    def test_invalid_transmission(self):
        with pytest.raises(ValueError):
            LossChannel(SA, 1.2)

    def test_commutes_with_path_phase(self):
        reg = ModeRegistry([SA, SB, ModeId.ancilla_of(SB)])
        state = (FockState.basis(reg, {SA: 1, SB: 1}, 3) + FockState.basis(reg, {SB: 2}, 3)).normalized()
        el, ch = PathLengthElement(0.9), LossChannel(SB, 0.6)
        x = apply_path_length(apply_loss(state, ch), el)
        y = apply_loss(apply_path_length(state, el), ch)
        for occ in set(x.amplitudes) | set(y.amplitudes):
            assert x.amplitudes.get(occ, 0) == pytest.approx(y.amplitudes.get(occ, 0), abs=1e-12)

    def test_balanced_signal_loss_halves_rate_keeps_shape(self):
        pat = DetectionPattern.parse("s:1,0 i:0,1")
        ideal = scan_fringe(Scenario(m=2), pat)
        lossy = Scenario(m=2, eta={"s": 0.5})
        scan = scan_fringe(lossy, pat)
        np.testing.assert_allclose(scan.values, 0.5 * ideal.values, atol=1e-13)
        out = lossy.output(0.4)
        assert pattern_probability(out, pat) == pytest.approx(0.5 * pattern_probability(Scenario(m=2).output(0.4), pat))
