"""Finite-order jet calculus at −1: exponential jets, inversion, gluing."""

import numpy as np
import pytest

from circlekit import circle as C
from circlekit import jets as J
from circlekit._quad import one_sided_derivative
from circlekit.errors import DomainError, PreconditionError


class TestJetOfExp:
    def test_zero_field_gives_identity_jets(self):
        out = J.jet_of_exp([0.0] * 7, 0.8)
        assert out.values[0] == np.pi and out.values[1] == 1.0
        assert max(abs(v) for v in out.values[2:]) == 0.0

    def test_group_law_via_jet_composition(self):
        g = [0.0, 0.0, 0.3, -0.2, 0.15, 0.05, -0.1]
        a = J.jet_of_exp(g, 0.4)
        b = J.jet_of_exp(g, 0.7)
        composed = C.compose_taylor(list(a.values), list(b.values))
        direct = J.jet_of_exp(g, 1.1)
        assert np.max(np.abs(np.array(composed) - np.array(direct.values))) < 1e-9

    def test_matches_finite_differences_of_flow(self):
        fld = J.JetBumpField([0, 0, 0.3, -0.2], [0, 0, 0.1, 0.4], width=0.9)
        flow = C.exp_field(fld, 1.0)
        for side in (-1, +1):
            jets = flow.jets_at_pi(3, side)
            x0 = np.pi if side > 0 else -np.pi
            for k in (1, 2, 3):
                fd = one_sided_derivative(
                    lambda x: float(flow.lift(np.asarray(x))), x0, k, -side, h=4e-3)
                assert abs(jets[k] - fd) < 1e-6

    def test_order_cap(self):
        with pytest.raises(DomainError):
            J.jet_of_exp([0.0] * 12, 1.0)

    def test_field_precondition(self):
        with pytest.raises(PreconditionError):
            J.jet_of_exp([0.0, 0.5, 0.1], 1.0)


class TestInvertJets:
    def test_identity_target(self):
        out = J.invert_jets([np.pi, 1.0, 0.0, 0.0, 0.0])
        assert np.max(np.abs(np.array(out.values))) == 0.0

    def test_round_trip_order6(self):
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(50):
            g = np.concatenate([[0.0, 0.0], rng.uniform(-1, 1, 5)])
            back = J.invert_jets(J.jet_of_exp(g, 1.0))
            worst = max(worst, np.max(np.abs(np.array(back.values) - g)))
        assert worst < 1e-8

    def test_specific_target(self):
        # λ2, λ3 = (0.5, 0): re-exponentiated jets match the target
        target = [np.pi, 1.0, 0.5, 0.0]
        g = J.invert_jets(target)
        redo = J.jet_of_exp(g, 1.0)
        assert np.max(np.abs(np.array(redo.values) - np.array(target))) < 1e-10

    def test_requires_b1_jets(self):
        with pytest.raises(PreconditionError):
            J.invert_jets([np.pi, 1.3, 0.1])


class TestDecompose:
    def test_smooth_input_gives_zero_correction(self):
        gamma = C.exp_field(J.JetBumpField([0, 0, 0, 0], [0, 0, 0, 0], width=0.9), 1.0)
        g, flat = J.decompose_psone(gamma, order=3)
        th = np.linspace(-np.pi, np.pi, 101)
        assert np.max(np.abs(g(th))) < 1e-10
        assert np.max(np.abs(flat.lift(th) - gamma.lift(th))) < 1e-10

    def test_reconstruction(self):
        # left jets (0.3, 0), right jets (0, 0) at orders 2, 3
        fld = J.JetBumpField([0, 0, 0.3, 0.0], [0, 0, 0.0, 0.0], width=0.9)
        gamma = C.exp_field(fld, 1.0)
        g, flat = J.decompose_psone(gamma, order=5)
        recon = C.compose(C.exp_field(g, 1.0), flat)
        th = np.linspace(-np.pi, np.pi, 257)
        assert np.max(np.abs(recon.lift(th) - gamma.lift(th))) < 1e-6

    def test_flat_remainder_membership(self):
        rng = np.random.default_rng(5)
        fld = J.JetBumpField(np.concatenate([[0, 0], rng.uniform(-0.4, 0.4, 4)]),
                             np.concatenate([[0, 0], rng.uniform(-0.4, 0.4, 4)]),
                             width=0.9)
        gamma = C.exp_field(fld, 1.0)
        _, flat = J.decompose_psone(gamma, order=5)
        assert C.b_n_membership(flat, 5, 1e-7)

    def test_precondition_checks(self):
        with pytest.raises(PreconditionError):
            J.decompose_psone(C.dilation(0.3), order=4)  # γ'(-1) ≠ 1
        with pytest.raises(PreconditionError):
            J.decompose_psone(C.rotation(0.2), order=4)  # γ(-1) ≠ -1


class TestJetType:
    def test_two_sided_equal_orders(self):
        with pytest.raises(DomainError):
            J.JetAtMinusOne("two-sided", (np.pi, 1.0, 0.2), (np.pi, 1.0))

    def test_map_jets_need_positive_derivative(self):
        with pytest.raises(DomainError):
            J.JetAtMinusOne("left", (np.pi, -0.5))

    def test_field_jets_allow_zero(self):
        j = J.JetAtMinusOne("left", (0.0, 0.0, 0.4), kind="field")
        assert j.order == 2
