"""Nonsmooth circle maps fixing −1, their complete invariant r, localized
smooth extensions, and the half-line translation cover.

An element is stored as two smooth one-sided pieces plus a smooth bridge away
from −1, together with exact one-sided jets.  The ratio r = ∂₊/∂₋ of the
one-sided first derivatives classifies the induced half-line representations:
r ≠ 1 is proper, and two elements are equivalent exactly when their r agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from . import _quad
from .circle import (CircleMap, ComposedMap, IdentityMap, MobiusMap,
                     PiecewiseMap, RotationMap, compose_taylor, dilation,
                     exp_field, invert, invert_taylor, translation, PS_C0,
                     PS_C1, SMOOTH, wrap_angle)
from .errors import (DomainError, InvalidMapError, PreconditionError,
                     ToolkitError)
from .fields import cayley_inv, half_cutoffs, smoothstep, translation_generator
from .jets import JetAtMinusOne

TWOPI = 2.0 * np.pi
_BLEND_HALFWIDTH = np.pi / 2.0


class _BlendedMap(CircleMap):
    """Smooth interpolation between two maps across the arc around +1."""

    def __init__(self, minus: CircleMap, plus: CircleMap, halfwidth=_BLEND_HALFWIDTH):
        self.minus = minus
        self.plus = plus
        self.w = float(halfwidth)

    def _weight(self, th, order=0):
        x = (th + self.w) / (2.0 * self.w)
        if order == 0:
            return smoothstep(x, 0, "c4")
        return smoothstep(x, order, "c4") / (2.0 * self.w) ** order

    def lift(self, theta):
        th = np.asarray(theta, dtype=float)
        B = self._weight(wrap_angle(th))
        return (1.0 - B) * self.minus.lift(th) + B * self.plus.lift(th)

    def _dlift1(self, theta):
        th = np.asarray(theta, dtype=float)
        w = wrap_angle(th)
        B, B1 = self._weight(w), self._weight(w, 1)
        return (B1 * (self.plus.lift(th) - self.minus.lift(th))
                + (1.0 - B) * self.minus.dlift(th, 1) + B * self.plus.dlift(th, 1))


class NonsmoothDiffeo:
    """Orientation-preserving homeomorphism fixing −1, smooth elsewhere.

    `piece_minus` governs the lower arc (θ just above −π), `piece_plus` the
    upper arc (θ just below π); both must be smooth maps fixing −1.  Between
    the arcs the pieces are bridged smoothly, so the only nonsmooth point is
    −1, where exact one-sided jets are stored.
    """

    def __init__(self, piece_minus: CircleMap, piece_plus: CircleMap,
                 jet_order: int = 6, _jets: JetAtMinusOne | None = None):
        self.piece_minus = piece_minus
        self.piece_plus = piece_plus
        jm = piece_minus.jets_at_pi(jet_order, -1)
        jp = piece_plus.jets_at_pi(jet_order, +1)
        if abs(wrap_angle(jm[0] - np.pi)) > 1e-12 or abs(wrap_angle(jp[0] - np.pi)) > 1e-12:
            raise InvalidMapError("both pieces must fix -1")
        if jm[1] <= 0 or jp[1] <= 0:
            raise InvalidMapError("one-sided first derivatives must be positive")
        jm[0] = -np.pi
        jp[0] = np.pi
        self.jets = _jets if _jets is not None else JetAtMinusOne(
            "two-sided", tuple(jm), tuple(jp))
        w = _BLEND_HALFWIDTH
        blend = _BlendedMap(piece_minus, piece_plus, w)
        self.map = PiecewiseMap(
            [(-np.pi, -w, piece_minus), (-w, w, blend), (w, np.pi, piece_plus)],
            smoothness=PS_C0 if abs(self.r - 1.0) > 1e-12 else PS_C1,
            breakpoints=(np.pi,))
        th = np.linspace(-np.pi, np.pi, 512, endpoint=False)
        if np.any(np.diff(self.map.lift(th)) <= 0):
            raise InvalidMapError("pieces are too far apart to glue monotonically")
        # stored jets must agree with the pieces through the stored order
        for side, piece in ((-1, piece_minus), (+1, piece_plus)):
            stored = np.asarray(self.jets.one_side(side)[1:])
            direct = np.asarray(piece.jets_at_pi(self.jets.order, side)[1:])
            scale = np.maximum(1.0, np.abs(stored))
            if np.max(np.abs(stored - direct) / scale) > 1e-9:
                raise InvalidMapError("stored jets disagree with the pieces")

    # -- invariant ----------------------------------------------------------
    @property
    def d_minus(self):
        return self.jets.one_side(-1)[1]

    @property
    def d_plus(self):
        return self.jets.one_side(+1)[1]

    @property
    def r(self):
        return self.d_plus / self.d_minus

    # -- map surface --------------------------------------------------------
    def lift(self, theta):
        return self.map.lift(theta)

    def __call__(self, z):
        return self.map(z)

    def fixes_one(self, tol=1e-9):
        return abs(wrap_angle(float(self.map.lift(np.asarray(0.0))))) < tol

    # -- group operations ---------------------------------------------------
    def compose(self, other: "NonsmoothDiffeo") -> "NonsmoothDiffeo":
        return NonsmoothDiffeo(ComposedMap(self.piece_minus, other.piece_minus, validate=False),
                               ComposedMap(self.piece_plus, other.piece_plus, validate=False),
                               jet_order=self.jets.order)

    def inverse(self) -> "NonsmoothDiffeo":
        return NonsmoothDiffeo(invert(self.piece_minus), invert(self.piece_plus),
                               jet_order=self.jets.order)


def one_sided_data(nu: NonsmoothDiffeo):
    """(∂₋ν(−1), ∂₊ν(−1), r(ν)) from the stored jets."""
    dm, dp = nu.d_minus, nu.d_plus
    if dm <= 0 or dp <= 0:
        raise InvalidMapError("one-sided derivatives must be positive")
    return dm, dp, dp / dm


@dataclass
class SolitonDescriptor:
    nu: object
    r: float
    kind: str  # 'automorphic' | 'typeIII'
    range_interval: tuple | None = None

    def __post_init__(self):
        if self.r <= 0:
            raise InvalidMapError("r must be positive")
        if self.kind == "typeIII" and self.range_interval is None:
            raise InvalidMapError("type III descriptors need a proper range interval")


def make_soliton(nu: NonsmoothDiffeo) -> SolitonDescriptor:
    """Descriptor of the half-line representation induced by ν."""
    _, _, r = one_sided_data(nu)
    return SolitonDescriptor(nu, r, "automorphic")


def is_proper(sigma: SolitonDescriptor, tol: float = 1e-9) -> bool:
    """Proper (does not extend to the whole circle) iff r ≠ 1."""
    if sigma.kind != "automorphic":
        raise PreconditionError("properness via r applies to automorphic descriptors")
    return abs(sigma.r - 1.0) > tol


def equivalent(s1: SolitonDescriptor, s2: SolitonDescriptor, tol: float = 1e-9) -> bool:
    """Unitary equivalence holds exactly when the r invariants agree."""
    if s1.kind != "automorphic" or s2.kind != "automorphic":
        raise PreconditionError("r-equivalence applies to automorphic descriptors")
    return abs(s1.r - s2.r) < tol * max(s1.r, s2.r)


# ---------------------------------------------------------------------------
# localized smooth extensions

class _BridgedMap(CircleMap):
    """Map equal to ν on an arc and smoothly bridged over the complement."""

    smoothness = SMOOTH
    breakpoints = ()

    def __init__(self, base_map, x0, x1, lift_fn, dlift_fn):
        self.base_map = base_map
        self.x0, self.x1 = float(x0), float(x1)  # bridge domain, x1 > x0
        self._bridge_lift = lift_fn
        self._bridge_dlift = dlift_fn

    def _in_bridge(self, th):
        rel = np.mod(th - self.x0, TWOPI)
        return rel < (self.x1 - self.x0)

    def lift(self, theta):
        th = np.asarray(theta, dtype=float)
        scalar = th.ndim == 0
        th = np.atleast_1d(th)
        rel = np.mod(th - self.x0, TWOPI)
        inb = rel < (self.x1 - self.x0)
        out = np.empty_like(th)
        if np.any(~inb):
            out[~inb] = self.base_map.lift(th[~inb])
        if np.any(inb):
            shift = th[inb] - (self.x0 + rel[inb])
            out[inb] = self._bridge_lift(self.x0 + rel[inb]) + shift
        return out[0] if scalar else out

    def _dlift1(self, theta):
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        rel = np.mod(th - self.x0, TWOPI)
        inb = rel < (self.x1 - self.x0)
        out = np.empty_like(th)
        if np.any(~inb):
            out[~inb] = self.base_map.dlift(th[~inb], 1)
        if np.any(inb):
            out[inb] = self._bridge_dlift(self.x0 + rel[inb])
        return out if np.asarray(theta).ndim else out[0]


def _taylor_log_deriv(jets):
    """Jets of log g' at a point from jets [g, g', ..., g^{(n)}]."""
    from math import factorial
    n = len(jets) - 2
    gp = np.array(jets[1:], dtype=float)  # g', g'', ...
    # power series coefficients of g' around the point: a_k = g^{(k+1)}/k!
    a = np.array([gp[k] / factorial(k) for k in range(len(gp))])
    # series of log(g'): log(a0) + log(1 + u), u = (a - a0)/a0
    L = np.zeros(n + 1)
    L[0] = np.log(a[0])
    u = a / a[0]
    u[0] = 0.0
    term = u.copy()
    sign = 1.0
    for p in range(1, n + 1):
        L[: n + 1] += sign / p * term[: n + 1]
        term = np.convolve(term, u)[: n + 1]
        sign = -sign
    return np.array([L[k] * factorial(k) for k in range(n + 1)])


def _hermite_two_point(x0, rho0, x1, rho1):
    """Polynomial with prescribed derivative lists at x0 and x1 (Hermite)."""
    n = len(rho0)
    pts = np.concatenate([np.full(n, x0), np.full(n, x1)])
    m = 2 * n
    A = np.zeros((m, m))
    rhs = np.concatenate([rho0, rho1])
    from math import factorial
    row = 0
    for x, rho in ((x0, rho0), (x1, rho1)):
        for d in range(n):
            for j in range(d, m):
                A[row, j] = factorial(j) / factorial(j - d) * (x - 0.5 * (x0 + x1)) ** (j - d)
            row += 1
    coef = np.linalg.solve(A, rhs)
    mid = 0.5 * (x0 + x1)

    def H(u, order=0):
        u = np.asarray(u, dtype=float) - mid
        out = np.zeros_like(u)
        for j in range(order, m):
            out = out + coef[j] * factorial(j) / factorial(j - order) * u ** (j - order)
        return out

    return H


def localized_extension(nu: NonsmoothDiffeo, interval, jet_order: int = 6,
                        grid: int = 8192) -> CircleMap:
    """Smooth circle map agreeing with ν on the line-picture interval.

    `interval` is (a, b) with a possibly None (half-line to −∞) and b possibly
    None (half-line to +∞); half-lines correspond to arcs with endpoint −1 and
    use ν's one-sided jets there.  The complement is bridged by matching
    log-derivative jets at both cut points (two-point Hermite) plus an
    interior bump correction fixing the total increment, hence monotone.
    """
    a, b = interval
    if a is None and b is None:
        raise DomainError("interval must be proper")
    th_lo = -np.pi if a is None else float(cayley_inv(a))
    th_hi = np.pi if b is None else float(cayley_inv(b))
    if th_hi <= th_lo:
        raise DomainError("empty interval")
    # bridge runs over the complement arc [th_hi, th_lo + 2π]
    x0, x1 = th_hi, th_lo + TWOPI
    if x1 - x0 < 0.05:
        raise DomainError("complement arc too small to bridge")

    def end_jets(x, side):
        w = wrap_angle(x)
        if abs(wrap_angle(x - np.pi)) < 1e-12:
            # cut point at -1: one-sided jets, value anchored at the wrap
            vals = list(nu.jets.one_side(side))[: jet_order + 1]
            vals += [0.0] * (jet_order + 1 - len(vals))
            vals[0] = w
            return np.array(vals)
        jets = [float(nu.map.lift(np.asarray(w, dtype=float)))]
        for k in range(1, jet_order + 1):
            jets.append(float(nu.map.dlift(np.asarray(w, dtype=float), k)))
        return np.array(jets)

    j0 = end_jets(x0, +1)
    j1 = end_jets(x1, -1)
    # express both ends in the bridge's unwrapped coordinate
    j0[0] = j0[0] + (x0 - wrap_angle(x0))
    j1[0] = j1[0] + (x1 - wrap_angle(x1))
    delta = j1[0] - j0[0]
    if delta <= 0:
        raise InvalidMapError("bridge increment must be positive")
    rho0 = _taylor_log_deriv(j0)
    rho1 = _taylor_log_deriv(j1)
    H = _hermite_two_point(x0, rho0, x1, rho1)
    npow = jet_order + 1

    def W(u):
        u = np.asarray(u, dtype=float)
        return ((u - x0) * (x1 - u)) ** npow / ((x1 - x0) / 2.0) ** (2 * npow)

    nodes, weights = _quad.panel_rule(x0, x1, (), freq=64.0, nodes_per_panel=24)

    def increment(k):
        return float(np.sum(weights * np.exp(H(nodes) + k * W(nodes))))

    k0 = 0.0
    i0 = increment(k0)
    lo_k, hi_k = (-1.0, 1.0)
    while increment(lo_k) > delta:
        lo_k *= 2.0
        if lo_k < -200:
            raise ToolkitError("bridge correction out of range")
    while increment(hi_k) < delta:
        hi_k *= 2.0
        if hi_k > 200:
            raise ToolkitError("bridge correction out of range")
    kstar = brentq(lambda k: increment(k) - delta, lo_k, hi_k, xtol=1e-14)

    us = np.linspace(x0, x1, grid)
    dvals = np.exp(H(us) + kstar * W(us))
    d_interp = PchipInterpolator(us, dvals)
    anti = d_interp.antiderivative()
    scale = delta / float(anti(x1))
    lift_fn = lambda u: j0[0] + scale * anti(u)
    dlift_fn = lambda u: scale * d_interp(u)
    return _BridgedMap(nu.map, x0, x1, lift_fn, dlift_fn)


# ---------------------------------------------------------------------------
# conjugation and the square-root map

def conjugated_map(nu: NonsmoothDiffeo, gamma: CircleMap, jet_order: int = 4):
    """ν∘γ∘ν⁻¹ for smooth γ fixing −1, with a C¹ certificate at −1.

    The one-sided first derivatives agree (the ∂±ν factors cancel), so the
    composite is C¹; higher one-sided derivatives differ in general.
    Returns (map, jets_minus, jets_plus).
    """
    gj = gamma.jets_at_pi(jet_order, +1)
    if abs(wrap_angle(gj[0] - np.pi)) > 1e-9:
        raise PreconditionError("conjugated_map requires γ(-1) = -1")
    out = ComposedMap(nu.map, ComposedMap(gamma, invert(nu.map), validate=False),
                      validate=False)
    out.smoothness = PS_C1
    jets = {}
    for side in (-1, +1):
        nuj = list(nu.jets.one_side(side))
        nuj[0] = np.pi if side > 0 else -np.pi
        gj_side = gamma.jets_at_pi(jet_order, side)
        n = min(len(nuj), len(gj_side)) - 1
        inv_j = invert_taylor(nuj[: n + 1])
        mid = compose_taylor(gj_side[: n + 1], inv_j)
        jets[side] = compose_taylor(nuj[: n + 1], mid)
    if abs(jets[-1][1] - jets[+1][1]) > 1e-9:
        raise ToolkitError("conjugation failed to cancel the first-derivative jump")
    return out, jets[-1], jets[+1]


class SquareRootMap:
    """ν(e^{iθ}) = e^{iθ/2}, θ ∈ [-π, π): injective onto the right half circle."""

    range_interval = (-np.pi / 2.0, np.pi / 2.0)

    def lift(self, theta):
        th = wrap_angle(np.asarray(theta, dtype=float))
        return th / 2.0

    def __call__(self, z):
        th = np.angle(np.asarray(z, dtype=complex))
        return np.exp(1j * th / 2.0)


class HalfCoverMap(CircleMap):
    """The covered-coordinate partner γ̂ with lift u ↦ γ̃(2u)/2 (equivariant)."""

    def __init__(self, gamma: CircleMap):
        self.gamma = gamma
        self.smoothness = gamma.smoothness

    def lift(self, theta):
        return self.gamma.lift(2.0 * np.asarray(theta, dtype=float)) / 2.0

    def _dlift1(self, theta):
        return self.gamma.dlift(2.0 * np.asarray(theta, dtype=float), 1)


def square_root_soliton() -> SolitonDescriptor:
    """Descriptor of the square-root construction (range a proper half circle).

    The map intertwines circle maps with their covered-coordinate partners:
    ν∘γ = γ̂∘ν on the half circle, where γ̂ has lift γ̃(2u)/2.
    """
    nu = SquareRootMap()
    return SolitonDescriptor(nu, 1.0, "typeIII", range_interval=nu.range_interval)


def intertwining_residual(descriptor: SolitonDescriptor, gamma: CircleMap,
                          grid: int = 256, margin: float = 0.2) -> float:
    """max |ν(γ(z)) − γ̂(ν(z))| over a grid, for the square-root descriptor.

    The identity is local: it holds where γ does not move points across the
    cut at −1, so the grid keeps `margin` away from ±π (γ near the identity).
    """
    nu = descriptor.nu
    ghat = HalfCoverMap(gamma)
    th = np.linspace(-np.pi + margin, np.pi - margin, grid)
    lhs = nu(np.exp(1j * gamma.lift(th)))
    rhs = np.exp(1j * ghat.lift(nu.lift(th)))
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# the translation cover

@dataclass
class TranslationCover:
    left: CircleMap      # Exp(t·h₋𝔱), supported on the lower half-line
    middle: CircleMap    # trivial near −1
    right: CircleMap     # Exp(t·h₊𝔱), supported on the upper half-line
    product_residual: float
    epsilon: float       # radius of the arc around −1 on which middle = id

    def factors(self):
        return self.left, self.middle, self.right


def translation_cover(t: float, tol: float = 1e-8) -> TranslationCover:
    """Split the translation τ(t) into half-line factors and a middle factor
    localized away from −1, with explicit certificates.

    Certificate (i): left∘middle∘right = τ(t) on a grid to `tol`.
    Certificate (ii): middle is the identity on an arc of radius ε around −1.
    """
    if abs(t) > 1.0:
        raise DomainError("|t| ≤ 1 is required for the shipped cutoffs")
    h_minus_t, h_plus_t, _, _ = half_cutoffs()
    left = exp_field(h_minus_t, t)
    right = exp_field(h_plus_t, t)
    tau = translation(t)
    middle = ComposedMap(exp_field(h_minus_t, -t),
                         ComposedMap(tau, exp_field(h_plus_t, -t), validate=False),
                         validate=False)
    th = np.linspace(-np.pi + 1e-6, np.pi - 1e-6, 257)
    prod = left.lift(middle.lift(right.lift(th)))
    resid = float(np.max(np.abs(prod - tau.lift(th))))
    if resid > tol:
        raise ToolkitError(f"cover product certificate failed: residual {resid:.2e}")
    # triviality radius: one batched scan of |middle - id| on both sides of -1
    offs = np.linspace(1e-9, 1.2, 480)
    probe = np.concatenate([np.pi - offs, -np.pi + offs])
    resid_probe = np.abs(middle.lift(probe) - probe)
    ok = (resid_probe[:480] < 1e-9) & (resid_probe[480:] < 1e-9)
    bad = np.nonzero(~ok)[0]
    eps = float(offs[-1]) if len(bad) == 0 else float(offs[bad[0] - 1]) if bad[0] > 0 else 0.0
    if eps <= 0.0:
        raise ToolkitError("middle factor is not trivial near -1")
    return TranslationCover(left, middle, right, resid, eps)


# ---------------------------------------------------------------------------
# convenient constructors

def nonsmooth_from_maps(minus: CircleMap, plus: CircleMap, jet_order=6) -> NonsmoothDiffeo:
    return NonsmoothDiffeo(minus, plus, jet_order=jet_order)


def psi_like(t: float, jet_order: int = 6) -> NonsmoothDiffeo:
    """Identity below, dilation δ(t) above: the canonical r = e^{-t} element."""
    return NonsmoothDiffeo(IdentityMap(), dilation(t), jet_order=jet_order)


def dilation_pair(a: float, b: float, jet_order: int = 6) -> NonsmoothDiffeo:
    """δ(a) on the lower arc, δ(b) on the upper arc.

    Dilations have derivative e^{-t} at −1, so r = e^{a-b} by the one-sided
    chain rule.
    """
    return NonsmoothDiffeo(dilation(a), dilation(b), jet_order=jet_order)
