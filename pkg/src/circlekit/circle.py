"""Circle diffeomorphisms represented by 2π-equivariant lifts.

Every map carries a lift γ̃: ℝ → ℝ with γ̃(θ+2π) = γ̃(θ)+2π as its canonical
representation; circle values, derivatives, Schwarzians and one-sided jets at
the distinguished point −1 (angle π) are all derived from the lift.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from . import _quad
from .errors import (BreakpointError, DomainError, IntegrationFailureError,
                     InvalidMapError, NumericsError, PreconditionError)
from .fields import TrigPolynomial, VectorField, wrap_angle

TWOPI = 2.0 * np.pi

SMOOTH = "smooth"
PS_C1 = "piecewise-smooth-C1"
PS_C0 = "piecewise-smooth-C0"
SOBOLEV = "sobolev"
_CLASS_RANK = {SMOOTH: 3, PS_C1: 2, PS_C0: 1, SOBOLEV: 0}

#: half-width (radians) of the guard band around nonsmooth points inside which
#: finite-difference stencils are not trusted
GUARD_BAND = 1e-3

_FLOW_RTOL = 1e-12
_FLOW_ATOL = 1e-13


def weakest_class(a, b):
    return a if _CLASS_RANK[a] <= _CLASS_RANK[b] else b


def wrap_02pi(x):
    """Normalize an angle to the breakpoint storage convention [0, 2π)."""
    return float(np.mod(x, TWOPI))


def breakpoint_distance(theta, breakpoints):
    """Distance on the circle from each angle to the nearest breakpoint."""
    th = np.asarray(theta, dtype=float)
    if not breakpoints:
        return np.full_like(th, np.pi)
    d = np.min([np.abs(wrap_angle(th - b)) for b in breakpoints], axis=0)
    return d


# ---------------------------------------------------------------------------
# Taylor-jet helpers (derivative lists [λ0, λ1, ..., λn] of a lift at a point)

def _bell_partial(k, j, x):
    """Partial Bell polynomial B_{k,j}(x[1], ..., x[k-j+1]); x is 1-indexed."""
    if k == 0 and j == 0:
        return 1.0
    if k == 0 or j == 0:
        return 0.0
    total = 0.0
    for i in range(1, k - j + 2):
        total += math.comb(k - 1, i - 1) * x[i] * _bell_partial(k - i, j - 1, x)
    return total


def compose_taylor(outer, inner):
    """Derivative list of g1∘g2 from g1's list at g2's value and g2's list.

    `outer[j]` must be g1^{(j)} evaluated at inner[0].
    """
    n = min(len(outer), len(inner)) - 1
    b = [0.0] + [inner[i] for i in range(1, n + 1)]
    out = [outer[0]]
    for k in range(1, n + 1):
        out.append(sum(outer[j] * _bell_partial(k, j, b) for j in range(1, k + 1)))
    return out


def invert_taylor(jets):
    """Derivative list of the inverse map at the (fixed) anchor.

    Requires jets[1] > 0; the anchor is assumed fixed (jets[0] maps to itself),
    which is the only case the toolkit needs (maps fixing −1).
    """
    n = len(jets) - 1
    if jets[1] <= 0:
        raise InvalidMapError("first derivative must be positive")
    inv = [jets[0], 1.0 / jets[1]] + [0.0] * (n - 1)
    for k in range(2, n + 1):
        comp = compose_taylor(inv, jets)
        inv[k] -= comp[k] / jets[1] ** k
    return inv


def flow_jets(field, t, x0, order, rtol=1e-12, atol=1e-13):
    """Derivative list of the lift of Exp(t·f) at anchor x0 by the jet ODE.

    Integrates y0' = f(y0), y_k' = Σ_j f^{(j)}(y0) B_{k,j}(y_1, ...), the
    closed triangular transport system; needs f derivatives up to `order`.
    """
    def rhs(_, y):
        out = np.zeros_like(y)
        out[0] = float(field(y[0]))
        fj = [0.0] + [float(field.deriv(y[0], j)) for j in range(1, order + 1)]
        x = [0.0] + list(y[1:order + 1])
        for k in range(1, order + 1):
            out[k] = sum(fj[j] * _bell_partial(k, j, x) for j in range(1, k + 1))
        return out

    y0 = np.zeros(order + 1)
    y0[0] = x0
    y0[1] = 1.0
    if t == 0.0:
        return list(y0)
    sol = solve_ivp(rhs, (0.0, t), y0, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationFailureError("jet transport failed: " + sol.message)
    return list(sol.y[:, -1])


# ---------------------------------------------------------------------------
# base class

class CircleMap:
    """Orientation-preserving circle map through its equivariant lift."""

    smoothness = SMOOTH
    breakpoints: tuple = ()

    # -- core surface -------------------------------------------------------
    def lift(self, theta):
        raise NotImplementedError

    def _dlift1(self, theta):
        return _quad.central_derivative(self.lift, np.asarray(theta, float), 1, 1e-3)

    def dlift(self, theta, order=1, h=2e-2):
        """θ-derivative of the lift; orders ≥ 2 differentiate dlift1 by stencils.

        Step sizes shrink automatically near declared breakpoints so stencils
        never straddle them; querying inside the guard band is the caller's
        responsibility (see `schwarzian_z`).
        """
        th = np.asarray(theta, dtype=float)
        if order == 1:
            return self._dlift1(th)
        scalar = th.ndim == 0
        th = np.atleast_1d(th)
        d = breakpoint_distance(th, self.breakpoints)
        h_arr = np.clip(d / 4.0, 1e-4, h)
        npts = 7
        offs = np.arange(npts) - (npts - 1) / 2.0
        w = _quad.fd_weights(0.0, offs, order - 1)
        pts = th[None, :] + offs[:, None] * h_arr[None, :]
        vals = self._dlift1(pts.ravel()).reshape(npts, -1)
        res = (w @ vals) / h_arr ** (order - 1)
        return res[0] if scalar else res

    def __call__(self, z):
        """Act on points of the unit circle."""
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.lift(np.angle(z)))

    def angle_map(self, theta):
        return self.lift(theta)

    def exact_inverse(self):
        """Closed-form inverse when the family provides one, else None."""
        return None

    # -- jets ---------------------------------------------------------------
    def jets_at_pi(self, order, side):
        """Derivative list [λ0..λ_order] of the lift at π from `side` (+1/-1).

        side=+1 is the upper arc (θ ↑ π), side=-1 the lower arc (θ ↓ -π).
        The base implementation uses one-sided finite differences of the lift
        (accurate only for low orders); structured subclasses override it.
        """
        h = 2e-2 if order <= 3 else 4e-2
        x0 = np.pi if side > 0 else -np.pi
        jets = [float(self.lift(np.asarray(x0 - side * 1e-13, dtype=float)))]
        for k in range(1, order + 1):
            jets.append(_quad.one_sided_derivative(
                lambda x: float(self.lift(np.asarray(x, dtype=float))), x0, k,
                -side, h=h, npts=min(9, k + 5)))
        jets[0] = x0 + wrap_angle(jets[0] - x0)
        return jets

    # -- validation ---------------------------------------------------------
    def validate(self, tol=1e-9, grid=None):
        """Check equivariance, monotonicity and breakpoint/class consistency."""
        n = grid or max(256, 12 * (len(self.breakpoints) + 1))
        th = np.linspace(-np.pi, np.pi, n, endpoint=False)
        lo = self.lift(th)
        hi = self.lift(th + TWOPI)
        if np.max(np.abs(hi - lo - TWOPI)) > tol:
            raise InvalidMapError("lift is not 2π-equivariant")
        vals = self.lift(np.sort(np.concatenate([th, th + np.pi / n])))
        if np.any(np.diff(vals) <= 0):
            raise InvalidMapError("lift is not strictly increasing")
        if self.smoothness == SMOOTH and self.breakpoints:
            raise InvalidMapError("smooth map must not declare breakpoints")
        return True


# ---------------------------------------------------------------------------
# elementary maps

class IdentityMap(CircleMap):
    def lift(self, theta):
        return np.asarray(theta, dtype=float)

    def _dlift1(self, theta):
        return np.ones_like(np.asarray(theta, dtype=float))

    def dlift(self, theta, order=1, h=2e-2):
        th = np.asarray(theta, dtype=float)
        return np.ones_like(th) if order == 1 else np.zeros_like(th)

    def exact_inverse(self):
        return IdentityMap()

    def jets_at_pi(self, order, side):
        return [np.pi, 1.0] + [0.0] * (order - 1)


class RotationMap(CircleMap):
    def __init__(self, alpha):
        self.alpha = float(alpha)

    def lift(self, theta):
        return np.asarray(theta, dtype=float) + self.alpha

    def _dlift1(self, theta):
        return np.ones_like(np.asarray(theta, dtype=float))

    def dlift(self, theta, order=1, h=2e-2):
        th = np.asarray(theta, dtype=float)
        return np.ones_like(th) if order == 1 else np.zeros_like(th)

    def exact_inverse(self):
        return RotationMap(-self.alpha)

    def jets_at_pi(self, order, side):
        return [np.pi + self.alpha, 1.0] + [0.0] * (order - 1)


def _dilation_lift(t, theta):
    th = wrap_angle(theta)
    shift = np.asarray(theta, dtype=float) - th
    inner = np.abs(th) <= np.pi / 2.0
    out = np.empty_like(th)
    s = np.tan(np.where(inner, th, 0.0) / 2.0)
    out[...] = 2.0 * np.arctan(np.exp(t) * s)
    u = (np.pi - np.abs(np.where(inner, np.pi, th))) / 2.0
    refl = np.sign(th) * (np.pi - 2.0 * np.arctan(np.exp(-t) * np.tan(u)))
    return np.where(inner, out, refl) + shift


def _dilation_dlift1(t, theta):
    th = wrap_angle(theta)
    inner = np.abs(th) <= np.pi / 2.0
    s = np.tan(np.where(inner, th, 0.0) / 2.0)
    main = np.exp(t) * (1.0 + s * s) / (1.0 + np.exp(2.0 * t) * s * s)
    u = np.tan((np.pi - np.abs(np.where(inner, np.pi, th))) / 2.0)
    refl = np.exp(-t) * (1.0 + u * u) / (1.0 + np.exp(-2.0 * t) * u * u)
    return np.where(inner, main, refl)


class MobiusElement:
    """PSL(2,ℝ) element acting on the compactified line; ad−bc normalized to 1."""

    def __init__(self, a, b, c, d):
        det = a * d - b * c
        if det <= 0:
            raise InvalidMapError("Möbius element must be orientation preserving")
        r = 1.0 / math.sqrt(det)
        self.a, self.b, self.c, self.d = a * r, b * r, c * r, d * r

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def __matmul__(self, other):
        m = self.matrix @ other.matrix
        return MobiusElement(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def inverse(self):
        return MobiusElement(self.d, -self.b, -self.c, self.a)

    def act_line(self, s):
        return (self.a * s + self.b) / (self.c * s + self.d)

    def proportional_to(self, other, tol=1e-12):
        m, n = self.matrix, other.matrix
        return min(np.max(np.abs(m - n)), np.max(np.abs(m + n))) < tol

    @staticmethod
    def rotation(theta):
        return MobiusElement(math.cos(theta / 2), math.sin(theta / 2),
                             -math.sin(theta / 2), math.cos(theta / 2))

    @staticmethod
    def dilation(t):
        return MobiusElement(math.exp(t / 2), 0.0, 0.0, math.exp(-t / 2))

    @staticmethod
    def translation(t):
        return MobiusElement(1.0, t, 0.0, 1.0)


class MobiusMap(CircleMap):
    """Circle action of a Möbius element, via its R·δ·R (KAK) factorization.

    The factorization gives a globally stable equivariant lift: rotations act
    by shifts and the dilation lift is evaluated on the branch away from its
    coordinate pole.
    """

    def __init__(self, element):
        if not isinstance(element, MobiusElement):
            m = np.asarray(element, dtype=float)
            element = MobiusElement(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
        self.element = element
        U, S, Vt = np.linalg.svd(element.matrix)
        if np.linalg.det(U) < 0:
            U = U @ np.diag([1.0, -1.0])
            Vt = np.diag([1.0, -1.0]) @ Vt
        self.phi2 = 2.0 * math.atan2(U[0, 1], U[0, 0])
        self.phi1 = 2.0 * math.atan2(Vt[0, 1], Vt[0, 0])
        self.tdil = 2.0 * math.log(S[0])

    def lift(self, theta):
        th = np.asarray(theta, dtype=float)
        return _dilation_lift(self.tdil, th + self.phi1) + self.phi2

    def _dlift1(self, theta):
        return _dilation_dlift1(self.tdil, np.asarray(theta, dtype=float) + self.phi1)

    def exact_inverse(self):
        return MobiusMap(self.element.inverse())

    def jets_at_pi(self, order, side, x0=np.pi):
        return self.taylor_at(x0, order)

    def taylor_at(self, x0, order):
        jets = [x0 + self.phi1, 1.0] + [0.0] * (order - 1)
        if self.tdil != 0.0:
            dil = flow_jets(TrigPolynomial(sin=[0.0, 1.0]), self.tdil, jets[0], order)
        else:
            dil = [jets[0], 1.0] + [0.0] * (order - 1)
        dil[0] += self.phi2
        return dil


def rotation(alpha):
    return RotationMap(alpha)


def dilation(t):
    return MobiusMap(MobiusElement.dilation(t))


def translation(t):
    return MobiusMap(MobiusElement.translation(t))


# ---------------------------------------------------------------------------
# flows of vector fields

class FlowMap(CircleMap):
    """Exp(t·f): time-t flow of a vector field, integrated adaptively."""

    def __init__(self, field: VectorField, t: float, tol: float = _FLOW_RTOL):
        self.field = field
        self.t = float(t)
        self.tol = tol
        self.breakpoints = tuple(field.breakpoints)
        self.smoothness = SMOOTH if not self.breakpoints else PS_C1

    def _solve(self, y0, variational=False):
        y0 = np.asarray(y0, dtype=float)
        if self.t == 0.0:
            return (y0, np.ones_like(y0)) if variational else y0
        n = y0.size
        if variational:
            def rhs(_, z):
                y = z[:n]
                return np.concatenate([self.field(y), self.field.deriv(y, 1)])
            z0 = np.concatenate([y0.ravel(), np.zeros(n)])
        else:
            def rhs(_, z):
                return self.field(z)
            z0 = y0.ravel()
        sol = solve_ivp(rhs, (0.0, self.t), z0, method="DOP853",
                        rtol=self.tol, atol=_FLOW_ATOL)
        if not sol.success:
            raise IntegrationFailureError("flow integration failed: " + sol.message)
        zf = sol.y[:, -1]
        if variational:
            return zf[:n].reshape(y0.shape), np.exp(zf[n:]).reshape(y0.shape)
        return zf.reshape(y0.shape)

    def lift(self, theta):
        return self._solve(np.asarray(theta, dtype=float))

    def _dlift1(self, theta):
        return self._solve(np.asarray(theta, dtype=float), variational=True)[1]

    def exact_inverse(self):
        return FlowMap(self.field, -self.t, self.tol)

    def jets_at_pi(self, order, side):
        jets_fn = getattr(self.field, "side_jets", None)
        if jets_fn is not None:
            return _flow_jets_fixed_anchor(np.asarray(jets_fn(order, side)) * self.t,
                                           1.0, order)
        try:
            return flow_jets(self.field, self.t, np.pi, order)
        except (ValueError, NotImplementedError):
            return super().jets_at_pi(order, side)


def _flow_jets_fixed_anchor(field_jets, t, order):
    """Jets of Exp(t·f) at π when f has side jets with f(π) = f'(π) = 0.

    Each y_k(t) is a polynomial in t; the triangular system is integrated
    exactly in polynomial arithmetic, so round trips are machine accurate.
    """
    if abs(field_jets[0]) > 1e-12 or abs(field_jets[1]) > 1e-12:
        raise PreconditionError("field jets must vanish to first order at -1")
    # y_k as ascending polynomial coefficient arrays in t
    polys = [np.array([np.pi]), np.array([1.0])]
    for k in range(2, order + 1):
        rhs = _poly_bell_rhs(k, field_jets, polys)
        # integrate termwise; y_k(0) = 0
        integ = np.concatenate([[0.0], rhs / np.arange(1, len(rhs) + 1)])
        polys.append(integ)
    return [float(np.polynomial.polynomial.polyval(t, p)) for p in polys]


def _poly_bell_rhs(k, field_jets, polys):
    """Polynomial (in t) coefficients of Σ_j f_j B_{k,j}(y_1, ..)."""
    def pmul(a, b):
        return np.convolve(a, b)

    def padd(a, b):
        n = max(len(a), len(b))
        out = np.zeros(n)
        out[:len(a)] += a
        out[:len(b)] += b
        return out

    def bell(kk, jj):
        if kk == 0 and jj == 0:
            return np.array([1.0])
        if kk == 0 or jj == 0:
            return np.array([0.0])
        acc = np.array([0.0])
        for i in range(1, kk - jj + 2):
            if i >= len(polys):
                continue
            term = pmul(polys[i], bell(kk - i, jj - 1))
            acc = padd(acc, math.comb(kk - 1, i - 1) * term)
        return acc

    acc = np.array([0.0])
    for j in range(2, k + 1):
        fj = field_jets[j] if j < len(field_jets) else 0.0
        if fj:
            acc = padd(acc, fj * bell(k, j))
    return acc


def exp_field(field: VectorField, t: float, tol: float = _FLOW_RTOL) -> FlowMap:
    """One-parameter flow Exp(t·f) solving dExp/dt = f∘Exp, Exp(0) = id."""
    return FlowMap(field, t, tol)


# ---------------------------------------------------------------------------
# composition / inversion

class ComposedMap(CircleMap):
    def __init__(self, outer: CircleMap, inner: CircleMap, validate=True):
        self.outer = outer
        self.inner = inner
        self.smoothness = weakest_class(outer.smoothness, inner.smoothness)
        bps = set(inner.breakpoints)
        if outer.breakpoints:
            inv = invert(inner)
            for b in outer.breakpoints:
                bps.add(wrap_02pi(inv.lift(np.asarray(b, dtype=float))))
        self.breakpoints = tuple(sorted(bps))
        if validate:
            th = np.linspace(-np.pi, np.pi, 257)
            if np.any(np.diff(self.lift(th)) <= 0):
                raise InvalidMapError("composition is not strictly increasing")

    def lift(self, theta):
        return self.outer.lift(self.inner.lift(np.asarray(theta, dtype=float)))

    def _dlift1(self, theta):
        th = np.asarray(theta, dtype=float)
        mid = self.inner.lift(th)
        return self.outer.dlift(mid, 1) * self.inner.dlift(th, 1)

    def exact_inverse(self):
        oi, ii = self.outer.exact_inverse(), self.inner.exact_inverse()
        if oi is None or ii is None:
            return None
        return ComposedMap(ii, oi, validate=False)

    def jets_at_pi(self, order, side):
        inner_j = self.inner.jets_at_pi(order, side)
        if abs(wrap_angle(inner_j[0] - np.pi)) < 1e-9:
            outer_j = self.outer.jets_at_pi(order, side)
            outer_j[0] = inner_j[0] + wrap_angle(outer_j[0] - inner_j[0])
            return compose_taylor(outer_j, inner_j)
        taylor = getattr(self.outer, "taylor_at", None)
        if taylor is not None:
            return compose_taylor(taylor(inner_j[0], order), inner_j)
        return super().jets_at_pi(order, side)


class NumericInverseMap(CircleMap):
    """Inverse by monotone root-finding on the lift (table + safeguarded Newton)."""

    _TABLE = 4096

    def __init__(self, base: CircleMap):
        self.base = base
        self.smoothness = base.smoothness
        th = np.linspace(-np.pi, np.pi, self._TABLE + 1)
        vals = base.lift(th)
        if np.any(np.diff(vals) <= 0.0):
            raise InvalidMapError("cannot invert: lift not strictly increasing")
        self._grid = th
        self._vals = vals
        self.breakpoints = tuple(sorted(
            wrap_02pi(base.lift(np.asarray(b, dtype=float)))
            for b in base.breakpoints))

    def lift(self, y):
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y).astype(float)
        shift = TWOPI * np.floor((y - self._vals[0]) / TWOPI)
        y0 = y - shift
        # y0 may land exactly on vals[-1]; fold into the table range
        over = y0 >= self._vals[-1]
        y0 = np.where(over, y0 - TWOPI, y0)
        shift = np.where(over, shift + TWOPI, shift)
        # guaranteed bracket from the monotone table
        idx = np.clip(np.searchsorted(self._vals, y0), 1, self._TABLE)
        lo = self._grid[idx - 1]
        hi = self._grid[idx]
        x = np.interp(y0, self._vals, self._grid)
        for _ in range(6):
            f = self.base.lift(x) - y0
            d = self.base.dlift(x, 1)
            step = np.where(d > 0, f / np.where(d > 0, d, 1.0), 0.0)
            x = np.clip(x - step, lo, hi)
        resid = np.abs(self.base.lift(x) - y0)
        bad = resid > 1e-11
        if np.any(bad):
            xb_lo, xb_hi = lo[bad].copy(), hi[bad].copy()
            target = y0[bad]
            for _ in range(60):
                mid = 0.5 * (xb_lo + xb_hi)
                fm = self.base.lift(mid) - target
                xb_lo = np.where(fm < 0, mid, xb_lo)
                xb_hi = np.where(fm < 0, xb_hi, mid)
            x[bad] = 0.5 * (xb_lo + xb_hi)
            if np.any(np.abs(self.base.lift(x) - y0) > 1e-8):
                raise NumericsError("inverse iteration failed to converge")
        out = x + shift
        return out[0] if scalar else out

    def _dlift1(self, y):
        x = self.lift(np.asarray(y, dtype=float))
        return 1.0 / self.base.dlift(x, 1)

    def exact_inverse(self):
        return self.base

    def jets_at_pi(self, order, side):
        base_j = self.base.jets_at_pi(order, side)
        if abs(wrap_angle(base_j[0] - np.pi)) < 1e-9:
            return invert_taylor(base_j)
        return super().jets_at_pi(order, side)


def compose(outer: CircleMap, inner: CircleMap) -> CircleMap:
    """γ1∘γ2; class is the weaker of the two, breakpoints merged/pulled back."""
    return ComposedMap(outer, inner)


def invert(gamma: CircleMap) -> CircleMap:
    """Numerical inverse of the lift by monotone root-finding per query point."""
    if isinstance(gamma, (IdentityMap, RotationMap, MobiusMap)):
        return gamma.exact_inverse()
    return NumericInverseMap(gamma)


# ---------------------------------------------------------------------------
# piecewise maps

class PiecewiseMap(CircleMap):
    """Map glued from smooth pieces on a partition of [-π, π)."""

    def __init__(self, pieces, smoothness=PS_C0, breakpoints=None):
        # pieces: list of (lo, hi, CircleMap) covering [-π, π)
        self.pieces = sorted(pieces, key=lambda p: p[0])
        self.smoothness = smoothness
        if breakpoints is None:
            breakpoints = [p[0] for p in self.pieces]
        self.breakpoints = tuple(sorted({wrap_02pi(b) for b in breakpoints}))
        self._edges = np.array([p[0] for p in self.pieces] + [self.pieces[-1][1]])

    def _select(self, th):
        idx = np.searchsorted(self._edges, th, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def lift(self, theta):
        th = np.asarray(theta, dtype=float)
        scalar = th.ndim == 0
        th = np.atleast_1d(th)
        w = wrap_angle(th)
        shift = th - w
        idx = self._select(w)
        out = np.empty_like(w)
        for i, (_, _, m) in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = m.lift(w[mask])
        out = out + shift
        return out[0] if scalar else out

    def _dlift1(self, theta):
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        w = wrap_angle(th)
        idx = self._select(w)
        out = np.empty_like(w)
        for i, (_, _, m) in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = m.dlift(w[mask], 1)
        return out if np.asarray(theta).ndim else out[0]

    def piece_at(self, side):
        """Piece governing the minus side (just above -π) or plus side (just below π)."""
        return self.pieces[0][2] if side < 0 else self.pieces[-1][2]

    def jets_at_pi(self, order, side):
        return self.piece_at(side).jets_at_pi(order, side)


def psi_t(t: float) -> CircleMap:
    """Identity on θ∈[-π,0) glued with the dilation δ(t) on [0,π).

    Continuous (both pieces fix ±1), with first-derivative jumps at the two
    gluing points; the derivative ratio across −1 is e^{-t}.
    """
    if t == 0.0:
        return IdentityMap()
    return PiecewiseMap([(-np.pi, 0.0, IdentityMap()), (0.0, np.pi, dilation(t))],
                        smoothness=PS_C0, breakpoints=(0.0, np.pi))


def nu_pi(nu: CircleMap) -> CircleMap:
    """ν∘R_π∘ν⁻¹∘R_π for ν fixing both −1 and 1.

    The composite is smooth except possibly at ±1 and transports ν's
    derivative mismatch at −1 to a ψ_t-style pair of defects.
    """
    if abs(wrap_angle(float(nu.lift(np.asarray(0.0))))) > 1e-9:
        raise PreconditionError(
            "nu_pi requires ν(1) = 1: normalize by composing with a smooth map first")
    rpi = RotationMap(np.pi)
    inner = ComposedMap(invert(nu), rpi, validate=False)
    mid = ComposedMap(rpi, inner, validate=False)
    out = ComposedMap(nu, mid, validate=False)
    # remove the winding the two half-rotations add to the lift
    k = round(float(out.lift(np.asarray(0.0))) / TWOPI)
    if k:
        out = ComposedMap(RotationMap(-TWOPI * k), out, validate=False)
    out.breakpoints = (0.0, np.pi)
    out.smoothness = PS_C0
    return out


# ---------------------------------------------------------------------------
# Schwarzian derivative and pushforward

def schwarzian_theta(gamma: CircleMap, theta, guard=GUARD_BAND):
    """e^{2iθ}·{γ,z}|_{z=e^{iθ}}, which is real for circle maps:

        (1-φ'²)/2 - φ'''/φ' + (3/2)(φ''/φ')²

    in terms of the lift derivatives φ^{(k)}(θ).
    """
    th = np.asarray(theta, dtype=float)
    if gamma.breakpoints:
        d = breakpoint_distance(th, gamma.breakpoints)
        if np.any(d < guard):
            raise BreakpointError("Schwarzian queried inside a breakpoint guard band")
    a = gamma.dlift(th, 1)
    b = gamma.dlift(th, 2)
    c = gamma.dlift(th, 3)
    return 0.5 * (1.0 - a * a) - c / a + 1.5 * (b / a) ** 2


def schwarzian_z(gamma: CircleMap, theta, guard=GUARD_BAND):
    """Schwarzian derivative {γ,z} at z = e^{iθ} (complex-variable form)."""
    th = np.asarray(theta, dtype=float)
    return np.exp(-2j * th) * schwarzian_theta(gamma, th, guard)


class PushforwardField(VectorField):
    """(γ_*f)(e^{iθ}) = γ̃'(γ̃⁻¹(θ)) · f(γ̃⁻¹(θ)), evaluated lazily and exactly."""

    def __init__(self, gamma: CircleMap, f: VectorField):
        self.gamma = gamma
        self.f = f
        self.gamma_inv = invert(gamma)
        bps = set()
        for b in tuple(f.breakpoints) + tuple(gamma.breakpoints):
            bps.add(wrap_02pi(gamma.lift(np.asarray(b, dtype=float))))
        self.breakpoints = tuple(sorted(bps))
        if f.support is not None:
            lo = float(gamma.lift(np.asarray(f.support[0], dtype=float)))
            hi = float(gamma.lift(np.asarray(f.support[1], dtype=float)))
            self.support = (lo, hi)
        else:
            self.support = None

    def __call__(self, theta):
        th = np.asarray(theta, dtype=float)
        x = self.gamma_inv.lift(th)
        return self.gamma.dlift(x, 1) * self.f(x)

    def deriv(self, theta, order=1, h=1e-2):
        th = np.asarray(theta, dtype=float)
        d = breakpoint_distance(th, self.breakpoints)
        h_arr = np.clip(np.atleast_1d(d) / 4.0, 1e-4, h)
        npts = 7
        offs = np.arange(npts) - (npts - 1) / 2.0
        w = _quad.fd_weights(0.0, offs, order)
        pts = np.atleast_1d(th)[None, :] + offs[:, None] * h_arr[None, :]
        vals = self(pts.ravel()).reshape(npts, -1)
        res = (w @ vals) / h_arr ** order
        return res if np.ndim(theta) else res[0]


def pushforward(gamma: CircleMap, f: VectorField) -> PushforwardField:
    """Adjoint action of γ on vector fields (derivative factor included)."""
    return PushforwardField(gamma, f)


# ---------------------------------------------------------------------------
# Cayley coordinates (re-exported with the domain checks of the op contract)

def cayley(theta):
    """C(e^{iθ}) = i(1-z)/(1+z)|_{z=e^{iθ}} = tan(θ/2); domain error at θ = π."""
    from .fields import cayley as _c
    return _c(theta)


def cayley_inv(s):
    from .fields import cayley_inv as _ci
    return _ci(s)


def b_n_membership(gamma: CircleMap, n: int, tol: float) -> bool:
    """Membership in B_n: γ(-1) = -1, γ'(-1) = 1 (n ≥ 1), derivatives 2..n vanish.

    For n = 0 only the fixed-point condition is checked.  Uses structured jets
    when the map provides them, one-sided finite differences otherwise; with
    breakpoints at −1 both sides must pass.
    """
    sides = (-1, +1)
    for side in sides:
        jets = gamma.jets_at_pi(max(n, 1), side)
        if abs(wrap_angle(jets[0] - np.pi)) > tol:
            return False
        if n >= 1 and abs(jets[1] - 1.0) > tol:
            return False
        for k in range(2, n + 1):
            if abs(jets[k]) > tol:
                return False
    return True
