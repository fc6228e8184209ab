"""Finite-order jet calculus at the distinguished point −1 (angle π).

Jets are derivative lists of lifts (or of vector fields) at π.  The module
realizes the finite-order surrogate of the inverse-limit picture: the jet ODE
for exponentials, its triangular inversion, and the bump-polynomial gluing
that splits a once-broken map into Exp(g) and a flat remainder.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .circle import ComposedMap, FlowMap, _flow_jets_fixed_anchor
from .errors import DomainError, PreconditionError
from .fields import VectorField, smoothstep, wrap_angle

MAX_JET_ORDER = 8


@dataclass
class JetAtMinusOne:
    """One- or two-sided derivative data at −1.

    For map jets, values[0] is the image angle (π for maps fixing −1) and
    values[1] > 0 is the first derivative; field jets carry the plain
    derivative list of the field.  Two-sided jets store both lists with equal
    order (`values` = minus side, `values_plus` = plus side).
    """
    side: str  # 'left', 'right', 'two-sided'
    values: tuple = ()
    values_plus: tuple = ()
    kind: str = "map"  # 'map' or 'field'

    def __post_init__(self):
        self.values = tuple(float(v) for v in self.values)
        self.values_plus = tuple(float(v) for v in self.values_plus)
        if self.side == "two-sided" and len(self.values) != len(self.values_plus):
            raise DomainError("two-sided jets must store equal orders")
        if self.kind == "map" and self.order >= 1:
            if self.values[1] <= 0:
                raise DomainError("orientation-preserving map jets need λ1 > 0")
            if self.side == "two-sided" and self.values_plus[1] <= 0:
                raise DomainError("orientation-preserving map jets need λ1 > 0")

    @property
    def order(self):
        return len(self.values) - 1

    def one_side(self, side):
        if self.side == "two-sided":
            return self.values if side < 0 else self.values_plus
        return self.values


def _as_values(jets):
    return list(jets.values if isinstance(jets, JetAtMinusOne) else jets)


def jet_of_exp(fjets, t: float) -> JetAtMinusOne:
    """Jets of Exp(t·f) at −1 from the field's jets, via the triangular jet ODE.

    Requires field jets with λ0 = λ1 = 0 (first stabilizer subalgebra);
    supported up to order `MAX_JET_ORDER`.  The jet ODE solution is polynomial
    in t and is integrated exactly in polynomial arithmetic.
    """
    vals = _as_values(fjets)
    order = len(vals) - 1
    if order > MAX_JET_ORDER:
        raise DomainError(f"jet order {order} exceeds supported maximum {MAX_JET_ORDER}")
    out = _flow_jets_fixed_anchor(np.asarray(vals) * t, 1.0, order)
    side = fjets.side if isinstance(fjets, JetAtMinusOne) else "left"
    return JetAtMinusOne(side, tuple(out), kind="map")


def invert_jets(target) -> JetAtMinusOne:
    """Field jets g with jet_of_exp(g, 1) = target, by triangular elimination.

    The quotient algebra is nilpotent, so the coefficient of g_k in the k-th
    exponential jet is exactly 1 and forward substitution solves the system
    (the Newton iteration converges in one sweep per order).
    """
    vals = _as_values(target)
    order = len(vals) - 1
    if order > MAX_JET_ORDER:
        raise DomainError(f"jet order {order} exceeds supported maximum {MAX_JET_ORDER}")
    if abs(wrap_angle(vals[0] - np.pi)) > 1e-12 or abs(vals[1] - 1.0) > 1e-9:
        raise PreconditionError("invert_jets expects map jets with λ0 = -1, λ1 = 1")
    g = [0.0] * (order + 1)
    for k in range(2, order + 1):
        partial = _flow_jets_fixed_anchor(np.asarray(g), 1.0, k)
        g[k] = vals[k] - partial[k]
    side = target.side if isinstance(target, JetAtMinusOne) else "left"
    return JetAtMinusOne(side, tuple(g), kind="field")


class JetBumpField(VectorField):
    """Piecewise-smooth C¹ field with prescribed one-sided jets at −1.

    Each side is the Taylor polynomial of the requested field jets multiplied
    by a bump that is exactly 1 near −1, so the jets are matched exactly; the
    only nonsmooth point is −1 itself.
    """

    breakpoints = (np.pi,)
    support = None

    def __init__(self, jets_minus, jets_plus, width=0.8):
        self.jm = tuple(float(v) for v in jets_minus)
        self.jp = tuple(float(v) for v in jets_plus)
        if any(abs(j[k]) > 1e-12 for j in (self.jm, self.jp) for k in (0, 1)):
            raise PreconditionError("jet bump fields live in the first stabilizer algebra")
        self.width = float(width)

    def __call__(self, theta):
        return self._eval(theta, 0)

    def deriv(self, theta, order=1):
        return self._eval(theta, order)

    def _eval(self, theta, order):
        th = wrap_angle(np.asarray(theta, dtype=float))
        scalar = th.ndim == 0
        th = np.atleast_1d(th)
        out = np.zeros_like(th)
        dist_m = th + np.pi           # minus side: local coordinate u = θ+π > 0
        mm = (dist_m > 0) & (dist_m < self.width) & (th < 0)
        if np.any(mm):
            out[mm] = self._side_eval(dist_m[mm], self.jm, order, sgn=+1)
        dist_p = np.pi - th           # plus side: u = θ-π = -dist_p < 0
        mp = (dist_p > 0) & (dist_p < self.width) & (th > 0)
        if np.any(mp):
            out[mp] = self._side_eval(dist_p[mp], self.jp, order, sgn=-1)
        return out[0] if scalar else out

    def _side_eval(self, dist, jets, order, sgn):
        """θ-derivatives of P(u)·χ(|u|) at |u| = dist, where u = sgn·dist."""
        w = self.width
        u = sgn * dist
        ramp = 2.0 * w / 3.0

        def poly(d):
            out = np.zeros_like(u)
            for k in range(d, len(jets)):
                if jets[k]:
                    out = out + jets[k] * u ** (k - d) / factorial(k - d)
            return out

        def bump(d):
            s = (dist - w / 3.0) / ramp
            if d == 0:
                return 1.0 - smoothstep(s, 0, "c4")
            # χ is a function of |u|; d|u|/dθ = sgn
            return -smoothstep(s, d, "c4") * sgn ** d / ramp ** d

        return sum(comb(order, j) * poly(order - j) * bump(j) for j in range(order + 1))

    def side_jets(self, order, side):
        jets = self.jm if side < 0 else self.jp
        return list(jets[: order + 1]) + [0.0] * max(0, order + 1 - len(jets))


def decompose_psone(gamma, order=6, width=0.8):
    """Split a once-broken C¹ map fixing −1 with γ'(-1) = 1 as Exp(g)∘γ̲.

    g is a piecewise-smooth C¹ field whose one-sided exponential jets match
    γ's one-sided jets through `order`; γ̲ = Exp(-g)∘γ then has vanishing
    derivatives 2..order at −1 on both sides (finite-order flat remainder).
    Returns (g, γ̲).
    """
    jm = gamma.jets_at_pi(order, -1)
    jp = gamma.jets_at_pi(order, +1)
    if abs(wrap_angle(jm[0] - np.pi)) > 1e-9 or abs(wrap_angle(jp[0] - np.pi)) > 1e-9:
        raise PreconditionError("decompose_psone requires γ(-1) = -1")
    if abs(jm[1] - 1.0) > 1e-9 or abs(jp[1] - 1.0) > 1e-9:
        raise PreconditionError("decompose_psone requires γ'(-1) = 1 on both sides")
    gm = invert_jets([np.pi] + list(jm[1:]))
    gp = invert_jets([np.pi] + list(jp[1:]))
    g = JetBumpField(gm.values, gp.values, width=width)
    gamma_flat = ComposedMap(FlowMap(g, -1.0), gamma, validate=False)
    gamma_flat.smoothness = "smooth"
    gamma_flat.breakpoints = ()
    return g, gamma_flat
