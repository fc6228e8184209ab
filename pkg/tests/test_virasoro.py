"""Truncated lowest-weight modules: brackets, Gram forms, energy bounds."""

from fractions import Fraction

import numpy as np
import pytest

from circlekit import circle as C
from circlekit import fields as F
from circlekit import virasoro as V
from circlekit.errors import PreconditionError, TruncationError
from circlekit.fourier import fourier_coeffs

COS = F.TrigPolynomial(cos=[0, 1.0])
SIN = F.TrigPolynomial(sin=[0, 1.0])


def space(c, h, N):
    return V.VermaLevelSpace(V.ModuleParams(c, h, N))


class TestApplyLn:
    def test_lowest_weight_axiom(self):
        sp = space(0.5, 0.3, 6)
        v = sp.lowest_weight_vector()
        out = V.apply_ln(sp, 0, v)
        assert abs(out.amplitudes[0] - 0.3) < 1e-14
        assert not out.truncated
        assert np.max(np.abs(V.apply_ln(sp, 2, v).amplitudes)) == 0.0

    def test_level1_norm(self):
        sp = space(0.5, 0.3, 6)
        v = sp.lowest_weight_vector()
        w = V.apply_ln(sp, 1, V.apply_ln(sp, -1, v).amplitudes)
        assert abs(w.amplitudes[0] - 2 * 0.3) < 1e-14

    def test_bracket_l2(self):
        # [L2, L-2]·v = (4L0 + c/2)·v
        c, h = 0.7, 0.4
        sp = space(c, h, 6)
        v = sp.lowest_weight_vector()
        lhs = V.apply_ln(sp, 2, V.apply_ln(sp, -2, v).amplitudes).amplitudes \
            - 0.0  # L-2 L2 v = 0
        assert abs(lhs[0] - (4 * h + c / 2)) < 1e-13

    def test_truncation_flag(self):
        sp = space(1.0, 0.0, 4)
        v = np.zeros(sp.dim, dtype=complex)
        v[sp.index[(3,)]] = 1.0
        out = V.apply_ln(sp, -2, v)
        assert out.truncated
        assert not V.apply_ln(sp, -1, v).truncated

    def test_out_of_range(self):
        sp = space(1.0, 0.0, 4)
        with pytest.raises(TruncationError):
            V.apply_ln(sp, 6, sp.lowest_weight_vector())

    def test_adjointness_on_exact_block(self):
        sp = space(0.9, 0.2, 8)
        n = 2
        G = V.gram_block(sp, sp.N)
        L = sp.generator_matrix(-n)
        Ldag = sp.generator_matrix(n)
        # ⟨L_{-n}u, w⟩ = ⟨u, L_n w⟩ on levels where no truncation occurred
        sel = sp.levels <= sp.N - n
        lhs = (L[:, sel]).T @ G
        rhs = G[sel, :] @ Ldag
        assert np.max(np.abs(lhs - rhs)) < 1e-10


class TestGram:
    def test_level1(self):
        G = V.gram_matrix(V.ModuleParams(0.5, 0.3, 2), 1)
        assert abs(G[0, 0] - 0.6) < 1e-14

    def test_level2_kac_zeros_exact(self):
        for c, h in ((Fraction(1, 2), Fraction(1, 16)), (Fraction(1, 2), Fraction(1, 2))):
            G = V.gram_matrix(V.ModuleParams(c, h, 2), 2, exact=True)
            assert V.exact_det(G) == 0

    def test_level2_float_matches_exact(self):
        p = V.ModuleParams(0.71, 0.23, 2)
        Gf = V.gram_matrix(p, 2)
        Ge = V.gram_matrix(p, 2, exact=True)
        assert abs(np.linalg.det(Gf) - float(V.exact_det(Ge))) < 1e-10

    def test_hermitian(self):
        for c, h in ((0.5, 0.0625), (1.3, 0.8), (0.2, -0.4)):
            G = V.gram_matrix(V.ModuleParams(c, h, 3), 3)
            assert np.max(np.abs(G - G.T)) < 1e-10

    def test_psd_iff_classify(self):
        # positivity of the forms through level 6 against the classifier, on
        # points where the printed discrete list and the forms agree
        grid = [(1.0, 0.0, True), (1.0, 0.25, True), (1.5, 0.7, True),
                (0.8, 0.0, True),            # printed discrete(3,1,1)
                (0.3, -1.0, False),          # negative weight
                (0.5, 0.3, False),           # c < 1 off the discrete list
                (0.9, 0.047, False)]
        for c, h, unitary in grid:
            verdict = V.unitarity_classify(c, h)
            assert (verdict.kind != "none") == unitary, (c, h)
            mineig = min(np.min(np.linalg.eigvalsh(
                V.gram_matrix(V.ModuleParams(c, h, l), l))) for l in range(1, 7))
            assert (mineig >= -1e-9) == unitary, (c, h, mineig)


class TestClassify:
    def test_continuous(self):
        assert V.unitarity_classify(1.0, 0.0).kind == "continuous"
        assert V.unitarity_classify(2.5, 0.3).kind == "continuous"

    def test_discrete_printed_formula(self):
        # c(3) = 1 - 6/30 = 0.8, h_{1,1}(3) = ((1·4-1·3)²-1)/48 = 0
        v = V.unitarity_classify(0.8, 0.0)
        assert (v.kind, v.m, v.p, v.q) == ("discrete", 3, 1, 1)

    def test_none(self):
        assert V.unitarity_classify(0.3, -1.0).kind == "none"


class TestStress:
    def test_constant_is_grading(self):
        sp = space(1.0, 0.3, 8)
        T = V.stress_matrix(sp, F.ConstantField(1.0))
        assert np.max(np.abs(T.matrix - np.diag(0.3 + sp.levels.astype(float)))) == 0.0
        assert T.exact_rows == 8

    def test_real_field_hermitian_in_gram_metric(self):
        sp = space(1.0, 0.3, 8)
        T = V.stress_matrix(sp, F.TrigPolynomial(cos=[0.2, 0.5, 0.1], sin=[0, 0.3, 0.7]))
        sel = sp.levels <= 6
        G = V.gram_block(sp, 6)
        GM = G @ T.matrix[np.ix_(sel, sel)]
        assert np.max(np.abs(GM - GM.conj().T)) < 1e-10

    def test_two_evaluation_paths_agree(self):
        # f = e2 + e-2: matrix equals the direct generator sum
        sp = space(1.0, 0.0, 8)
        coeffs = np.zeros(5, dtype=complex)
        coeffs[0] = coeffs[4] = 1.0
        from circlekit.fourier import FourierSeries
        T = V.stress_matrix(sp, FourierSeries(coeffs, 2))
        direct = sp.generator_matrix(2) + sp.generator_matrix(-2)
        assert np.max(np.abs(T.matrix - direct)) < 1e-12

    def test_mode_above_truncation(self):
        sp = space(1.0, 0.0, 2)
        with pytest.raises(TruncationError):
            V.stress_matrix(sp, F.TrigPolynomial(cos=[0, 0, 0, 1.0]))


class TestCocycles:
    def test_gf_antisymmetry(self):
        assert V.gf_cocycle(COS, COS) == 0.0
        rng = np.random.default_rng(1)
        for _ in range(5):
            f = F.TrigPolynomial(cos=rng.normal(size=4), sin=rng.normal(size=4))
            g = F.TrigPolynomial(cos=rng.normal(size=4), sin=rng.normal(size=4))
            assert abs(V.gf_cocycle(f, g) + V.gf_cocycle(g, f)) < 1e-12

    def test_gf_reference_value(self):
        assert abs(V.gf_cocycle(COS, SIN) - (-1.0 / 24.0)) < 1e-14

    def test_gf_pure_modes(self):
        from circlekit.fourier import FourierSeries
        for n in (1, 2, 3):
            en = np.zeros(2 * n + 1, dtype=complex); en[2 * n] = 1.0
            emn = np.zeros(2 * n + 1, dtype=complex); emn[0] = 1.0
            val = V.gf_cocycle(FourierSeries(en, n), FourierSeries(emn, n))
            assert abs(val - 1j * n ** 3 / 12.0) < 1e-12

    def test_vir_on_lowest_modes(self):
        assert abs(V.vir_cocycle(COS, SIN)) < 1e-14

    def test_vir_antisymmetry(self):
        f = F.TrigPolynomial(cos=[0, 0.3, 0.1], sin=[0, 0.2])
        g = F.TrigPolynomial(cos=[0, 0.1], sin=[0, 0.4, 0.3])
        assert abs(V.vir_cocycle(f, g) + V.vir_cocycle(g, f)) < 1e-12

    def test_jacobi_and_cocycle_identity(self):
        rng = np.random.default_rng(3)
        mk = lambda: F.TrigPolynomial(cos=rng.normal(size=3), sin=rng.normal(size=3))
        f, g, k = mk(), mk(), mk()
        th = np.linspace(-np.pi, np.pi, 129)
        jac = (V.bracket_field(V.bracket_field(f, g), k).synthesis(th)
               + V.bracket_field(V.bracket_field(g, k), f).synthesis(th)
               + V.bracket_field(V.bracket_field(k, f), g).synthesis(th))
        assert np.max(np.abs(jac)) < 1e-12
        for om in (V.gf_cocycle, V.vir_cocycle):
            resid = om(V.bracket_field(f, g), k) + om(V.bracket_field(g, k), f) \
                + om(V.bracket_field(k, f), g)
            assert abs(resid) < 1e-10


class TestCommutator:
    def test_f_equals_g(self):
        sp = space(0.5, 0.0, 9)
        assert V.commutator_check(sp, COS, COS) < 1e-12

    def test_cos_sin_c_half(self):
        sp = space(0.5, 0.0, 12)
        assert V.commutator_check(sp, COS, SIN) < 1e-9

    def test_modes_pm2(self):
        sp = space(1.0, 0.3, 15)
        f2 = F.TrigPolynomial(cos=[0, 0, 1.0])
        g2 = F.TrigPolynomial(sin=[0, 0, 1.0])
        assert V.commutator_check(sp, f2, g2) < 1e-9

    def test_gf_cocycle_detects_coboundary_mismatch(self):
        sp = space(1.0, 0.3, 15)
        fs = V._series_of(F.TrigPolynomial(cos=[0, 0, 1.0]))
        gs = V._series_of(F.TrigPolynomial(sin=[0, 0, 1.0]))
        Tf = V.stress_matrix(sp, fs).matrix
        Tg = V.stress_matrix(sp, gs).matrix
        Th = V.stress_matrix(sp, V.bracket_field(gs, fs)).matrix
        R = 1j * (Tg @ Tf - Tf @ Tg) - Th - 1.0 * V.gf_cocycle(gs, fs) * np.eye(sp.dim)
        sel = sp.levels <= 15 - 4
        assert np.max(np.abs(R[np.ix_(sel, sel)])) >= 1e-3

    def test_block_too_small(self):
        sp = space(1.0, 0.0, 3)
        with pytest.raises(TruncationError):
            V.commutator_check(sp, F.TrigPolynomial(cos=[0, 0, 1.0]),
                               F.TrigPolynomial(cos=[0, 0, 1.0]))


class TestBeta:
    def test_identity_zero(self):
        assert V.beta_cocycle(C.IdentityMap(), COS, 1.0) == 0.0

    def test_mobius_vanishes(self):
        rng = np.random.default_rng(11)
        f = F.TrigPolynomial(cos=[0.3, 0.2], sin=[0, 0.1])
        for _ in range(4):
            e = C.MobiusElement.rotation(rng.uniform(-1, 1)) \
                @ C.MobiusElement.dilation(rng.uniform(-0.7, 0.7)) \
                @ C.MobiusElement.translation(rng.uniform(-0.7, 0.7))
            assert abs(V.beta_cocycle(C.MobiusMap(e), f, 1.0)) < 1e-9

    def test_cocycle_identity(self):
        rng = np.random.default_rng(13)
        f = F.TrigPolynomial(cos=[0.3, 0.5], sin=[0, 0, 0.2])
        worst = 0.0
        for _ in range(5):
            m1 = C.exp_field(F.TrigPolynomial(
                cos=[0, rng.uniform(-0.25, 0.25)],
                sin=[0, 0, rng.uniform(-0.12, 0.12)]), 1.0)
            m2 = C.exp_field(F.TrigPolynomial(
                sin=[0, rng.uniform(-0.25, 0.25), rng.uniform(-0.12, 0.12)]), 1.0)
            lhs = V.beta_cocycle(C.compose(m1, m2), f, 1.0)
            rhs = V.beta_cocycle(m1, C.pushforward(m2, f), 1.0) + V.beta_cocycle(m2, f, 1.0)
            worst = max(worst, abs(lhs - rhs))
        assert worst < 1e-7

    def test_breakpoint_inside_support_rejected(self):
        from circlekit.errors import DomainError
        with pytest.raises(DomainError):
            V.beta_cocycle(C.psi_t(0.5), COS, 1.0)


class TestQei:
    def test_constant_field_reference(self):
        # closed form: ∫ 2t²/(1+t²)³ dt = π/4, so the bound is −c/48
        from scipy.integrate import quad
        oracle = quad(lambda t: 2 * t * t / (1 + t * t) ** 3, -np.inf, np.inf)[0]
        assert abs(oracle - np.pi / 4) < 1e-12
        for c in (0.5, 1.0, 2.0):
            assert abs(V.qei_bound(F.ConstantField(1.0), c) + c / 48.0) < 1e-12

    def test_plateau_ramps_only(self):
        bump = F.theta_bump_field(-1.0, 0.5, 1.5, height=1.0)
        full = V.qei_bound(bump, 1.0)
        # the plateau interior contributes nothing: the integrand there is 0
        th = np.linspace(-0.45, 0.95, 64)
        g = bump.cayley_sq(th)
        dg = bump.cayley_sq_deriv(th)
        ramp_free = np.max(np.abs(dg * dg / (4 * g) * 0))
        assert full < 0.0 and ramp_free == 0.0

    def test_dilation_invariance(self):
        one = F.ConstantField(1.0)
        b0 = V.qei_bound(one, 1.0)
        for s in (0.3, -0.5, 1.0):
            assert abs(V.qei_bound(F.dilate_field(one, s), 1.0) - b0) < 1e-8

    def test_negative_density_rejected(self):
        with pytest.raises(PreconditionError):
            V.qei_bound(F.TrigPolynomial(cos=[0, 1.0]), 1.0)  # cosθ dips negative

    def test_check_constant_field(self):
        sp = space(1.0, 0.0, 10)
        gap = V.qei_check(sp, F.ConstantField(1.0), 0, 1.0, trials=100, seed=7)
        assert gap >= 1.0 / 48.0 - 1e-12

    def test_check_positive_bump(self):
        ck = np.exp(-0.5 * np.arange(3) ** 2)
        conv = np.correlate(ck, ck, mode="full")
        f = F.TrigPolynomial(cos=[conv[2]] + [2 * conv[2 + j] for j in (1, 2)])
        sp = space(1.0, 0.0, 10)
        assert V.qei_check(sp, f, 2, 1.0, trials=100, seed=11) >= -1e-8

    def test_half_line_family_trend(self):
        # diagnostic: exact-block min eigenvalue against α/n (truncation caveat)
        sp = space(1.0, 0.0, 10)
        alpha = V.qei_bound(F.translation_family(1), 1.0)
        for n in (1, 2, 4):
            tn = F.translation_family(n)
            series = fourier_coeffs(tn, 5)
            T = V.stress_matrix(sp, series)
            sel = sp.levels <= 5
            G = V.gram_block(sp, 5)
            M = T.matrix[np.ix_(sel, sel)]
            evals, evecs = np.linalg.eigh(G)
            keep = evals > 1e-10 * np.max(evals)
            Q = evecs[:, keep] / np.sqrt(evals[keep])
            A = Q.conj().T @ (G @ M @ Q)
            mineig = float(np.min(np.linalg.eigvalsh(0.5 * (A + A.conj().T))))
            assert mineig >= alpha / n - 1e-6


class TestTransformedGenerator:
    def test_zero_time(self):
        fld, beta = V.transformed_generator(0.0, 1.0)
        th = np.linspace(-np.pi + 1e-6, np.pi - 1e-6, 129)
        assert abs(beta) < 1e-12
        assert np.max(np.abs(fld(th) - F.translation_generator()(th))) < 1e-12

    def test_neighborhood_agreement(self):
        fld, _ = V.transformed_generator(0.5, 1.0)
        th = np.linspace(-np.pi + 1e-6, -np.pi + 0.2, 64)
        assert np.max(np.abs(fld(th) - F.translation_generator()(th))) < 1e-10

    def test_beta_cancellation_pair(self):
        hm, _, _, _ = F.half_cutoffs()
        tg = F.translation_generator()
        t = 0.5
        flow_p = C.exp_field(hm, t)
        flow_m = C.exp_field(hm, -t)
        b1 = V.beta_cocycle(flow_m, C.pushforward(flow_p, tg), 1.0, support=(-np.pi, 0.0))
        b2 = V.beta_cocycle(flow_p, tg, 1.0, support=(-np.pi, 0.0))
        assert abs(b1 + b2) < 1e-7
