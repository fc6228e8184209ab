"""Circle-map calculus: group laws, flows, inversion, Schwarzian, jets."""

import numpy as np
import pytest

from circlekit import circle as C
from circlekit import fields as F
from circlekit.errors import BreakpointError, DomainError, InvalidMapError, PreconditionError

TH = np.linspace(-np.pi, np.pi, 64, endpoint=False)
RNG = np.random.default_rng(2024)


def rand_exp_map(scale=0.3, seed=None):
    r = np.random.default_rng(seed) if seed is not None else RNG
    return C.exp_field(F.TrigPolynomial(cos=[0, r.uniform(-scale, scale)],
                                        sin=[0, r.uniform(-scale, scale),
                                             r.uniform(-scale / 2, scale / 2)]), 1.0)


class TestCompose:
    def test_rotation_group_law(self):
        comp = C.compose(C.rotation(0.4), C.rotation(0.9))
        assert np.max(np.abs(comp.lift(TH) - (TH + 1.3))) < 1e-12

    def test_inverse_of_exp(self):
        g = C.exp_field(F.TrigPolynomial(sin=[0, 0.3]), 1.0)
        comp = C.compose(g, C.invert(g))
        assert np.max(np.abs(comp.lift(TH) - TH)) < 1e-9

    def test_mobius_subgroup_law(self):
        # δ(s)∘δ(t) = δ(s+t), both as matrices and as maps
        e = C.MobiusElement.dilation(0.3) @ C.MobiusElement.dilation(0.4)
        assert e.proportional_to(C.MobiusElement.dilation(0.7))
        m = C.compose(C.dilation(0.3), C.dilation(0.4))
        assert np.max(np.abs(m.lift(TH) - C.dilation(0.7).lift(TH))) < 1e-12
        e2 = C.MobiusElement.translation(0.2) @ C.MobiusElement.translation(0.5)
        assert e2.proportional_to(C.MobiusElement.translation(0.7))

    def test_associativity_on_grid(self):
        g1, g2, g3 = (rand_exp_map(seed=k) for k in (1, 2, 3))
        lhs = C.compose(C.compose(g1, g2), g3)
        rhs = C.compose(g1, C.compose(g2, g3))
        assert np.max(np.abs(lhs.lift(TH) - rhs.lift(TH))) < 1e-9

    def test_class_and_breakpoints_merge(self):
        p = C.psi_t(0.5)
        g = rand_exp_map(seed=4)
        comp = C.compose(g, p)
        assert comp.smoothness == C.PS_C0
        assert len(comp.breakpoints) == 2
        # breakpoints of the outer map are pulled back through the inner map
        comp2 = C.compose(p, g)
        ginv = C.invert(g)
        for b in (0.0, np.pi):
            pre = float(F.wrap_angle(ginv.lift(np.asarray(b))))
            assert min(abs(F.wrap_angle(np.array(comp2.breakpoints) - pre))) < 1e-9

    def test_monotonicity_failure_raises(self):
        class Bad(C.CircleMap):
            def lift(self, theta):
                th = np.asarray(theta, dtype=float)
                return th + 1.2 * np.sin(th)
        with pytest.raises(InvalidMapError):
            C.compose(Bad(), Bad())


class TestInvert:
    def test_identity(self):
        assert np.max(np.abs(C.invert(C.IdentityMap()).lift(TH) - TH)) < 1e-14

    def test_rotation(self):
        inv = C.invert(C.rotation(0.37))
        assert np.max(np.abs(inv.lift(TH) - (TH - 0.37))) < 1e-12

    def test_exp_field_inverse_matches_negative_flow(self):
        # numerical inversion of the lift against the ODE-integrated Exp(-f)
        f = F.TrigPolynomial(cos=[0, 0.2])
        num = C.NumericInverseMap(C.exp_field(f, 1.0))
        exact = C.exp_field(f, -1.0)
        assert np.max(np.abs(num.lift(TH) - exact.lift(TH))) < 1e-8

    def test_equivariance_of_inverse(self):
        g = C.NumericInverseMap(rand_exp_map(seed=5))
        assert np.max(np.abs(g.lift(TH + 2 * np.pi) - g.lift(TH) - 2 * np.pi)) < 1e-10

    def test_breakpoints_mapped_forward(self):
        p = C.psi_t(0.4)
        inv = C.NumericInverseMap(p)
        for b in inv.breakpoints:
            d = np.abs(F.wrap_angle(np.array([0.0, np.pi]) - b))
            assert d.min() < 1e-9  # ψ_t fixes its own breakpoints

    def test_non_monotone_raises(self):
        class Bad(C.CircleMap):
            def lift(self, theta):
                th = np.asarray(theta, dtype=float)
                return th + 1.5 * np.sin(th)
        with pytest.raises(InvalidMapError):
            C.NumericInverseMap(Bad())


class TestExpField:
    def test_zero_time_is_identity(self):
        g = C.exp_field(F.TrigPolynomial(sin=[0, 0.5]), 0.0)
        assert np.max(np.abs(g.lift(TH) - TH)) == 0.0

    def test_constant_field_rotation(self):
        g = C.exp_field(F.ConstantField(1.0), 0.33)
        assert np.max(np.abs(g.lift(TH) - (TH + 0.33))) < 1e-10

    def test_translation_generator_in_line_picture(self):
        # flow of 1+cosθ is the line translation s -> s+t
        g = C.exp_field(F.translation_generator(), 0.8)
        s = np.linspace(-5.0, 5.0, 41)
        out = C.cayley(g.lift(C.cayley_inv(s)))
        assert np.max(np.abs(out - (s + 0.8))) < 1e-8

    def test_one_parameter_law(self):
        f = F.TrigPolynomial(sin=[0, 0.3], cos=[0, 0, 0.1])
        lhs = C.compose(C.exp_field(f, 0.4), C.exp_field(f, 0.35))
        rhs = C.exp_field(f, 0.75)
        assert np.max(np.abs(lhs.lift(TH) - rhs.lift(TH))) < 1e-8

    def test_variational_derivative(self):
        g = rand_exp_map(seed=8)
        h = 1e-5
        fd = (g.lift(TH + h) - g.lift(TH - h)) / (2 * h)
        assert np.max(np.abs(g.dlift(TH, 1) - fd)) < 1e-9


class TestCayley:
    def test_fixed_point(self):
        assert C.cayley(0.0) == 0.0

    def test_quarter_circle(self):
        # i(1-i)/(1+i) = 1 by complex arithmetic
        z = np.exp(1j * np.pi / 2)
        oracle = 1j * (1 - z) / (1 + z)
        assert abs(oracle - 1.0) < 1e-15
        assert abs(C.cayley(np.pi / 2) - 1.0) < 1e-14

    @pytest.mark.parametrize("theta", [0.3, -0.3, 2.0, -2.0])
    def test_roundtrip(self, theta):
        assert abs(C.cayley_inv(C.cayley(theta)) - theta) < 1e-14

    def test_excluded_point(self):
        with pytest.raises(DomainError):
            C.cayley(np.pi)


class TestPushforward:
    def test_identity(self):
        f = F.TrigPolynomial(cos=[0.3, 0.5], sin=[0, 0.2])
        pf = C.pushforward(C.IdentityMap(), f)
        assert np.max(np.abs(pf(TH) - f(TH))) < 1e-12

    def test_functoriality(self):
        f = F.TrigPolynomial(cos=[0, 0.2])
        g1, g2 = rand_exp_map(seed=10), rand_exp_map(seed=11)
        lhs = C.pushforward(C.compose(g1, g2), f)
        rhs = C.pushforward(g1, C.pushforward(g2, f))
        assert np.max(np.abs(lhs(TH) - rhs(TH))) < 1e-8

    def test_dilation_scaling_of_half_line_family(self):
        # δ(log n)_* 𝔱_1 = n·𝔱_n under the circle pushforward
        n = 4
        t1 = F.translation_family(1)
        tn = F.translation_family(n)
        pushed = C.pushforward(C.dilation(np.log(n)), t1)
        th = np.linspace(-np.pi + 1e-6, np.pi - 1e-6, 301)
        assert np.max(np.abs(pushed(th) - n * tn(th))) < 1e-10


class TestSchwarzian:
    def test_identity_zero(self):
        assert np.max(np.abs(C.schwarzian_z(C.IdentityMap(), TH))) == 0.0

    def test_mobius_vanishes(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            e = C.MobiusElement.rotation(rng.uniform(-1, 1)) \
                @ C.MobiusElement.dilation(rng.uniform(-0.8, 0.8)) \
                @ C.MobiusElement.translation(rng.uniform(-0.8, 0.8))
            m = C.MobiusMap(e)
            assert np.max(np.abs(C.schwarzian_z(m, TH))) < 1e-8

    def test_chain_rule_cocycle(self):
        g1, g2 = rand_exp_map(0.2, seed=12), rand_exp_map(0.2, seed=13)
        th = np.linspace(-2.5, 2.5, 41)

        def pure(m, x):
            a, b, c = m.dlift(x, 1), m.dlift(x, 2), m.dlift(x, 3)
            return c / a - 1.5 * (b / a) ** 2

        lhs = pure(C.compose(g1, g2), th)
        rhs = pure(g1, g2.lift(th)) * g2.dlift(th, 1) ** 2 + pure(g2, th)
        assert np.max(np.abs(lhs - rhs)) < 1e-7

    def test_guard_band(self):
        with pytest.raises(BreakpointError):
            C.schwarzian_z(C.psi_t(0.5), np.pi - 1e-5)


class TestPsiT:
    def test_zero_is_identity(self):
        assert isinstance(C.psi_t(0.0), C.IdentityMap)

    def test_fixes_one(self):
        p = C.psi_t(0.7)
        assert abs(p.lift(np.asarray(0.0))) < 1e-14
        p.validate()

    def test_one_sided_ratio(self):
        p = C.psi_t(0.7)
        jm = p.jets_at_pi(1, -1)
        jp = p.jets_at_pi(1, +1)
        assert abs(jp[1] / jm[1] - np.exp(-0.7)) < 1e-10

    def test_class_and_breakpoints(self):
        p = C.psi_t(0.5)
        assert p.smoothness == C.PS_C0
        assert set(np.round(p.breakpoints, 12)) == {0.0, round(np.pi, 12)}


class TestNuPi:
    def test_identity_input(self):
        out = C.nu_pi(C.IdentityMap())
        th = np.linspace(-3.0, 3.0, 50)
        assert np.max(np.abs(out.lift(th) - th)) < 1e-12

    def test_requires_fixing_one(self):
        with pytest.raises(PreconditionError):
            C.nu_pi(C.rotation(0.3))

    def test_smooth_nu_gives_smooth_composite(self):
        # r = 1 with matching jets: jumps at both breakpoints vanish
        from circlekit.solitons import psi_like
        nu = psi_like(0.0)
        out = C.nu_pi(nu.map)
        for q in (0.0, np.pi):
            lo = float(out.dlift(np.asarray(q - 1e-4), 1))
            hi = float(out.dlift(np.asarray(q + 1e-4), 1))
            assert abs(hi - lo) < 1e-9

    def test_defect_transport(self):
        # ν_π carries r(ν) at −1 and the reciprocal defect at +1; composing
        # with ψ_t cancels the −1 jump exactly (the r-content of the paper's
        # gluing argument; see the decisions ledger for the +1 side).
        from circlekit.solitons import psi_like
        t = 0.6
        nu = psi_like(t)
        out = C.nu_pi(nu.map)

        def one_sided(m, q, sgn):
            h = 1e-4
            f1, f2, f4 = (float(m.dlift(np.asarray(q + sgn * k * h), 1))
                          for k in (1, 2, 4))
            # quadratic extrapolation of the one-sided limit
            return (8.0 * f1 - 6.0 * f2 + f4) / 3.0

        below = one_sided(out, np.pi, -1)
        above = one_sided(out, -np.pi, +1)
        assert abs(above / below - np.exp(t)) < 1e-6  # defect 1/r at −1
        comp = C.ComposedMap(C.psi_t(t), C.invert(out), validate=False)
        b = one_sided(comp, np.pi, -1)
        a = one_sided(comp, -np.pi, +1)
        assert abs(a - b) < 1e-6  # first-derivative jump at −1 cancels


class TestBnMembership:
    def test_identity_in_all(self):
        for n in range(7):
            assert C.b_n_membership(C.IdentityMap(), n, 1e-12)

    def test_dilation_in_b0_not_b1(self):
        d = C.dilation(0.4)
        assert C.b_n_membership(d, 0, 1e-9)
        assert not C.b_n_membership(d, 1, 1e-9)

    def test_exp_of_flat_field(self):
        from circlekit.jets import JetBumpField
        g = JetBumpField([0, 0, 0, 0, 0.4], [0, 0, 0, 0, -0.2], width=0.9)
        m = C.exp_field(g, 1.0)
        assert C.b_n_membership(m, 3, 1e-7)
        assert not C.b_n_membership(m, 4, 1e-7)

    def test_rotation_not_in_b0(self):
        assert not C.b_n_membership(C.rotation(0.3), 0, 1e-9)


class TestValidation:
    def test_validate_passes_for_good_maps(self):
        for m in (C.IdentityMap(), C.rotation(1.0), C.dilation(0.8),
                  C.translation(0.5), rand_exp_map(seed=20)):
            assert m.validate()

    def test_smooth_map_with_breakpoints_rejected(self):
        m = rand_exp_map(seed=21)
        m.breakpoints = (0.5,)
        with pytest.raises(InvalidMapError):
            m.validate()
