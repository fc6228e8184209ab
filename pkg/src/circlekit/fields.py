"""Real vector fields on the circle.

A field is identified with a 2π-periodic real function f(e^{iθ}); derivatives
are with respect to the angle θ.  Besides trigonometric polynomials, the
module ships the concrete families used throughout the toolkit: the
translation generator 1+cosθ, its half-line rescalings, and smooth cutoffs
with exact plateaus built from polynomial smoothsteps.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

TWOPI = 2.0 * np.pi


def wrap_angle(theta):
    """Normalize angles to [-π, π)."""
    return np.mod(np.asarray(theta, dtype=float) + np.pi, TWOPI) - np.pi


def cayley(theta):
    """Line coordinate of e^{iθ}: C(e^{iθ}) = i(1-z)/(1+z) = tan(θ/2)."""
    th = wrap_angle(theta)
    if np.any(np.isclose(np.abs(th), np.pi, atol=1e-15)):
        raise DomainError("Cayley transform undefined at the point -1")
    return np.tan(th / 2.0)


def cayley_inv(s):
    """Inverse of the Cayley coordinate: s -> 2 arctan(s) in (-π, π)."""
    return 2.0 * np.arctan(np.asarray(s, dtype=float))


# ---------------------------------------------------------------------------
# polynomial smoothsteps (exact plateaus, C^3 / C^4 joins)

def _smoothstep_c3(x, order=0):
    """35x^4-84x^5+70x^6-20x^7 clamped to [0,1]; C^3 at both ends."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    xc = np.clip(x, 0.0, 1.0)
    if order == 0:
        val = xc**4 * (35.0 - 84.0 * xc + 70.0 * xc**2 - 20.0 * xc**3)
        return np.where(x >= 1.0, 1.0, np.where(x <= 0.0, 0.0, val))
    if order == 1:
        val = 140.0 * xc**3 * (1.0 - xc) ** 3
    elif order == 2:
        val = 420.0 * xc**2 * (1.0 - xc) ** 2 * (1.0 - 2.0 * xc)
    elif order == 3:
        val = 840.0 * xc * (1.0 - xc) * (1.0 - 5.0 * xc + 5.0 * xc**2)
    else:
        raise ValueError("smoothstep derivatives implemented up to order 3")
    return np.where(inside, val, 0.0)


def _smoothstep_c4(x, order=0):
    """126x^5-420x^6+540x^7-315x^8+70x^9 clamped to [0,1]; C^4 at both ends."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    xc = np.clip(x, 0.0, 1.0)
    if order == 0:
        val = xc**5 * (126.0 - 420.0 * xc + 540.0 * xc**2 - 315.0 * xc**3 + 70.0 * xc**4)
        return np.where(x >= 1.0, 1.0, np.where(x <= 0.0, 0.0, val))
    if order == 1:
        val = 630.0 * xc**4 * (1.0 - xc) ** 4
    elif order == 2:
        val = 2520.0 * xc**3 * (1.0 - xc) ** 3 * (1.0 - 2.0 * xc)
    elif order == 3:
        val = 2520.0 * xc**2 * (1.0 - xc) ** 2 * (3.0 * (1.0 - 2.0 * xc) ** 2 - 2.0 * xc * (1.0 - xc))
    else:
        raise ValueError("smoothstep derivatives implemented up to order 3")
    return np.where(inside, val, 0.0)


def smoothstep(x, order=0, kind="c3"):
    return _smoothstep_c3(x, order) if kind == "c3" else _smoothstep_c4(x, order)


# ---------------------------------------------------------------------------
# field classes

class VectorField:
    """Base class; subclasses provide value and θ-derivatives."""

    #: angles (in [-π, π)) where smoothness fails; empty for smooth fields
    breakpoints: tuple = ()
    #: θ-interval (lo, hi) outside which the field vanishes, or None (full circle)
    support: tuple | None = None

    def __call__(self, theta):
        raise NotImplementedError

    def deriv(self, theta, order=1):
        raise NotImplementedError

    def cayley_sq(self, theta):
        """(1+cosθ)·f(θ) — line-picture density used by the energy bound."""
        th = wrap_angle(theta)
        return (1.0 + np.cos(th)) * self(th)

    def cayley_sq_deriv(self, theta):
        th = wrap_angle(theta)
        return -np.sin(th) * self(th) + (1.0 + np.cos(th)) * self.deriv(th, 1)

    def __add__(self, other):
        return LinearCombinationField([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return LinearCombinationField([(1.0, self), (-1.0, other)])

    def __rmul__(self, a):
        return LinearCombinationField([(float(a), self)])

    def __neg__(self):
        return LinearCombinationField([(-1.0, self)])


class TrigPolynomial(VectorField):
    """f(θ) = Σ_j cos_coeffs[j]·cos(jθ) + Σ_j sin_coeffs[j]·sin(jθ)."""

    def __init__(self, cos=(), sin=()):
        self.cos = np.asarray(cos, dtype=float)
        self.sin = np.asarray(sin, dtype=float)  # sin[0] ignored (sin 0θ = 0)
        self.max_mode = max(len(self.cos) - 1 if len(self.cos) else 0,
                            len(self.sin) - 1 if len(self.sin) else 0, 0)

    def __call__(self, theta):
        th = np.asarray(theta, dtype=float)
        out = np.zeros_like(th)
        for j, c in enumerate(self.cos):
            out = out + c * np.cos(j * th)
        for j, s in enumerate(self.sin):
            if j:
                out = out + s * np.sin(j * th)
        return out

    def deriv(self, theta, order=1):
        th = np.asarray(theta, dtype=float)
        out = np.zeros_like(th)
        for j, c in enumerate(self.cos):
            if j:
                # d^p cos(jθ) = j^p cos(jθ + pπ/2)
                out = out + c * j**order * np.cos(j * th + order * np.pi / 2.0)
        for j, s in enumerate(self.sin):
            if j:
                out = out + s * j**order * np.sin(j * th + order * np.pi / 2.0)
        return out

    def coefficient(self, k):
        """Complex Fourier coefficient f̂_k."""
        k = int(k)
        a = self.cos[abs(k)] if abs(k) < len(self.cos) else 0.0
        b = self.sin[abs(k)] if 0 < abs(k) < len(self.sin) else 0.0
        if k == 0:
            return complex(a)
        return complex(a / 2.0, -np.sign(k) * b / 2.0)


class ConstantField(TrigPolynomial):
    def __init__(self, value=1.0):
        super().__init__(cos=[float(value)])


class LinearCombinationField(VectorField):
    def __init__(self, terms):
        # flatten nested combinations
        flat = []
        for a, f in terms:
            if isinstance(f, LinearCombinationField):
                flat.extend((a * b, g) for b, g in f.terms)
            else:
                flat.append((a, f))
        self.terms = flat
        bps = set()
        for _, f in flat:
            bps.update(f.breakpoints)
        self.breakpoints = tuple(sorted(bps))
        sups = [f.support for _, f in flat]
        self.support = None if any(s is None for s in sups) else _hull(sups)

    def __call__(self, theta):
        return sum(a * f(theta) for a, f in self.terms)

    def deriv(self, theta, order=1):
        return sum(a * f.deriv(theta, order) for a, f in self.terms)


def _hull(intervals):
    los = [i[0] for i in intervals]
    his = [i[1] for i in intervals]
    return (min(los), max(his))


class LineProfile:
    """Profile B(t) in the line coordinate, with derivatives up to order 3.

    Built from smoothstep ramps; `left`/`right` are the plateau values at
    t→−∞ / t→+∞ and `ramps` is a list of (t_lo, t_hi, v_lo, v_hi) pieces.
    """

    def __init__(self, pieces, kind="c3"):
        # pieces: sorted list of (t_lo, t_hi, v_lo, v_hi); constant in between
        self.pieces = sorted(pieces)
        self.kind = kind

    def __call__(self, t, order=0):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        if order == 0:
            # start from the leftmost plateau
            v = self.pieces[0][2]
            out = out + v
        for (lo, hi, vlo, vhi) in self.pieces:
            x = (t - lo) / (hi - lo)
            if order == 0:
                out = out + (vhi - vlo) * smoothstep(x, 0, self.kind)
            else:
                out = out + (vhi - vlo) * smoothstep(x, order, self.kind) / (hi - lo) ** order
        return out


def plateau_down(t_lo=1.0, t_hi=2.0, kind="c3"):
    """Profile equal to 1 on (-∞, t_lo] and 0 on [t_hi, ∞)."""
    return LineProfile([(t_lo, t_hi, 1.0, 0.0)], kind)


def line_bump(center, width, height=1.0, kind="c3"):
    """Bump: 0 outside [center-width, center+width], plateau `height` inside."""
    w = float(width)
    return LineProfile([(center - w, center - w / 2.0, 0.0, height),
                        (center + w / 2.0, center + w, height, 0.0)], kind)


class CayleyProfileField(VectorField):
    """f(θ) = (1+cosθ)·B(C(e^{iθ})/a) for a line profile B and scale a ≥ 1.

    This is the pullback of a line-picture profile; all θ-derivatives up to
    order 3 are closed forms (the B'' terms cancel in the third derivative).
    """

    def __init__(self, profile, scale=1.0):
        self.profile = profile
        self.scale = float(scale)
        lo = self.profile.pieces[0][0] * self.scale
        hi = self.profile.pieces[-1][1] * self.scale
        # support: where either plateau is nonzero, else the ramp hull
        left_val = self.profile.pieces[0][2]
        right_val = self.profile.pieces[-1][3]
        if left_val == 0.0 and right_val == 0.0:
            self.support = (float(cayley_inv(lo)), float(cayley_inv(hi)))
        elif right_val == 0.0:
            self.support = (-np.pi, float(cayley_inv(hi)))
        elif left_val == 0.0:
            self.support = (float(cayley_inv(lo)), np.pi)
        else:
            self.support = None

    def __call__(self, theta):
        th, B = self._eval_profile(theta, 0)
        return (1.0 + np.cos(th)) * B

    def _eval_profile(self, theta, order):
        th = wrap_angle(theta)
        at_pole = np.isclose(np.abs(th), np.pi, atol=1e-14)
        safe = np.where(at_pole, 0.0, th)
        u = np.tan(safe / 2.0) / self.scale
        # at the pole use the limiting plateau value (sign of θ picks the side)
        u = np.where(at_pole, np.where(th > 0, 1e300, -1e300), u)
        return th, self.profile(u, order)

    def deriv(self, theta, order=1):
        a = self.scale
        th, B = self._eval_profile(theta, 0)
        _, B1 = self._eval_profile(theta, 1)
        w = 1.0 + np.cos(th)
        if order == 1:
            return -np.sin(th) * B + B1 / a
        wsafe = np.where(w < 1e-300, 1.0, w)
        if order == 2:
            _, B2 = self._eval_profile(theta, 2)
            t2 = np.where(w < 1e-12, 0.0, (np.sin(th) / (a * wsafe)) * B1)
            t3 = np.where(w < 1e-12, 0.0, B2 / (a**2 * wsafe))
            return -np.cos(th) * B - t2 + t3
        if order == 3:
            _, B3 = self._eval_profile(theta, 3)
            t2 = np.where(w < 1e-12, 0.0, (2.0 * np.cos(th) / (a * wsafe)) * B1)
            t3 = np.where(w < 1e-12, 0.0, (np.sin(th) ** 2 / (a * wsafe**2)) * B1)
            t4 = np.where(w < 1e-12, 0.0, B3 / (a**3 * wsafe**2))
            return np.sin(th) * B - t2 - t3 + t4
        raise ValueError("derivatives implemented up to order 3")


class ThetaCutoff:
    """Smooth scalar cutoff in the angle variable with exact plateaus."""

    def __init__(self, ramp_lo, ramp_hi, v_lo, v_hi, kind="c3"):
        self.a, self.b = float(ramp_lo), float(ramp_hi)
        self.v_lo, self.v_hi = float(v_lo), float(v_hi)
        self.kind = kind

    def __call__(self, theta, order=0):
        th = wrap_angle(theta)
        x = (th - self.a) / (self.b - self.a)
        if order == 0:
            return self.v_lo + (self.v_hi - self.v_lo) * smoothstep(x, 0, self.kind)
        return (self.v_hi - self.v_lo) * smoothstep(x, order, self.kind) / (self.b - self.a) ** order


class CutoffTimesField(VectorField):
    """h(θ)·f(θ) for a ThetaCutoff h; Leibniz derivatives up to order 3."""

    def __init__(self, cutoff, field, support):
        self.h = cutoff
        self.f = field
        self.support = support
        self.breakpoints = (np.pi,)  # the cutoff jumps across -1

    def __call__(self, theta):
        return self.h(theta, 0) * self.f(theta)

    def deriv(self, theta, order=1):
        from math import comb
        out = 0.0
        for j in range(order + 1):
            fpart = self.f(theta) if order == j else self.f.deriv(theta, order - j)
            out = out + comb(order, j) * self.h(theta, j) * fpart
        return out


class CallableField(VectorField):
    """Wrap a plain callable; derivatives by central finite differences."""

    def __init__(self, fn, breakpoints=(), support=None):
        self.fn = fn
        self.breakpoints = tuple(breakpoints)
        self.support = support

    def __call__(self, theta):
        return self.fn(wrap_angle(theta))

    def deriv(self, theta, order=1, h=1e-2):
        from ._quad import central_derivative
        return central_derivative(lambda x: self.fn(wrap_angle(x)), np.asarray(theta, float), order, h)


# ---------------------------------------------------------------------------
# concrete families

def translation_generator():
    """The field generating line translations: 1 + cosθ."""
    return TrigPolynomial(cos=[1.0, 1.0])


def translation_family(n, kind="c3"):
    """(1+cosθ)·B(C(e^{iθ})/n) with B = 1 on (-∞,1], smoothstep down to 0 on [1,2]."""
    if n < 1:
        raise DomainError("translation_family requires n >= 1")
    return CayleyProfileField(plateau_down(1.0, 2.0, kind), scale=float(n))


def translation_family_third_derivative(n, theta):
    """Closed-form third θ-derivative of translation_family(n).

    Four terms: sinθ·B − (2cosθ/(n·w))B' − (sin²θ/(n·w²))B' + B'''/(n³w²),
    with w = 1+cosθ; the B'' contributions cancel identically.
    """
    return translation_family(n).deriv(theta, 3)


def half_cutoffs(kind="c3"):
    """The cutoff fields of the translation-cover construction.

    Returns (h₋𝔱, h₊𝔱, 𝔱₋, 𝔱₊): h₊ vanishes on I_(−π,0) and is 1 on
    I_(π/2,π); h₋ is mirrored; 𝔱± is a smooth two-piece split of 𝔱 = 1+cosθ
    cut across −1, with 𝔱₋ = 𝔱 on the lower arc.
    """
    t_gen = translation_generator()
    h_plus = ThetaCutoff(0.0, np.pi / 2.0, 0.0, 1.0, kind)
    h_minus = ThetaCutoff(-np.pi / 2.0, 0.0, 1.0, 0.0, kind)
    h_minus_t = CutoffTimesField(h_minus, t_gen, support=(-np.pi, 0.0))
    h_plus_t = CutoffTimesField(h_plus, t_gen, support=(0.0, np.pi))
    t_minus = CayleyProfileField(plateau_down(1.0, 2.0, kind), scale=1.0)
    t_plus = t_gen - t_minus
    t_plus.support = (np.pi / 2.0, np.pi)
    t_plus.breakpoints = ()
    return h_minus_t, h_plus_t, t_minus, t_plus


class DilatedField(VectorField):
    """Dilation acting on the line-picture density of a field.

    The density G(t) = (1+cosθ(t))·f(θ(t)) is rescaled to e^s·G(e^{-s}t).
    This is the transformation under which the energy-bound functional is
    exactly invariant; the plain circle pushforward by δ(s) instead rescales
    the field itself (δ(log n)_*𝔱₁ = n·𝔱_n) and does not preserve the bound.
    """

    def __init__(self, field, s):
        self.f = field
        self.s = float(s)
        self.breakpoints = field.breakpoints
        self.support = None  # conservative

    def cayley_sq(self, theta):
        th = wrap_angle(theta)
        at_pole = np.isclose(np.abs(th), np.pi, atol=1e-14)
        t = np.tan(np.where(at_pole, 0.0, th) / 2.0)
        u = np.exp(-self.s) * t
        th_u = 2.0 * np.arctan(u)
        G = self.f.cayley_sq(th_u)
        # at the pole take the limit along the same side
        if np.any(at_pole):
            lim = self.f.cayley_sq(np.where(th > 0, np.pi, -np.pi))
            G = np.where(at_pole, lim, G)
        return np.exp(self.s) * G

    def cayley_sq_deriv(self, theta):
        th = wrap_angle(theta)
        at_pole = np.isclose(np.abs(th), np.pi, atol=1e-14)
        t = np.tan(np.where(at_pole, 0.0, th) / 2.0)
        u = np.exp(-self.s) * t
        th_u = 2.0 * np.arctan(u)
        # d/dθ [e^s G(e^{-s} tan(θ/2))] = g̃'(θ_u)·(1+t²)/(1+u²)
        return self.f.cayley_sq_deriv(th_u) * (1.0 + t * t) / (1.0 + u * u)

    def __call__(self, theta):
        th = wrap_angle(theta)
        w = 1.0 + np.cos(th)
        wsafe = np.where(w < 1e-300, 1.0, w)
        return self.cayley_sq(th) / wsafe

    def deriv(self, theta, order=1):
        if order != 1:
            raise ValueError("DilatedField supports first derivatives only")
        th = wrap_angle(theta)
        w = 1.0 + np.cos(th)
        return (self.cayley_sq_deriv(th) + np.sin(th) * self(th)) / w


def dilate_field(field, s):
    """Push a field forward by the dilation of parameter s in the line picture."""
    return DilatedField(field, s)


def theta_bump_field(lo, ramp, hi, height=1.0, kind="c3"):
    """Plateau field in θ: 0 outside [lo, hi], `height` on [lo+ramp, hi−ramp]."""
    up = ThetaCutoff(lo, lo + ramp, 0.0, height, kind)
    down = ThetaCutoff(hi - ramp, hi, 1.0, 0.0, kind)

    class _Bump(VectorField):
        support = (lo, hi)
        breakpoints = ()

        def __call__(self, theta):
            return up(theta, 0) * down(theta, 0)

        def deriv(self, theta, order=1):
            from math import comb
            return sum(comb(order, j) * up(theta, j) * down(theta, order - j)
                       for j in range(order + 1))

    return _Bump()
