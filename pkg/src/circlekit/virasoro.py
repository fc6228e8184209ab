"""Truncated lowest-weight modules of the central extension of circle vector
fields, with smeared stress tensors and energy inequalities.

States live on a partition basis L_{-μ1}···L_{-μk}·v, μ1 ≥ ... ≥ μk, through
level N; generators act by normal-ordered straightening with the bracket
[L_n, L_m] = (n-m) L_{n+m} + δ_{n+m,0} (n³-n)/12 · c.  Matrix elements above
the truncation are dropped and flagged, and every theorem-level check is
restricted to the block the truncation leaves exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _quad
from .circle import CircleMap, schwarzian_theta
from .errors import (DomainError, PreconditionError, ToolkitError,
                     TruncationError)
from .fields import TrigPolynomial, VectorField, wrap_angle
from .fourier import FourierSeries, fourier_coeffs

TWOPI = 2.0 * np.pi


def partitions_of(n):
    """Non-increasing integer partitions of n (canonical order)."""
    if n == 0:
        return [()]
    out = []

    def rec(rem, maxpart, acc):
        if rem == 0:
            out.append(tuple(acc))
            return
        for p in range(min(rem, maxpart), 0, -1):
            rec(rem - p, p, acc + [p])

    rec(n, n, [])
    return out


@dataclass(frozen=True)
class ModuleParams:
    """Central charge, lowest weight, truncation level; no unitarity assumed."""
    c: object
    h: object
    N: int

    def __post_init__(self):
        if self.N < 0:
            raise DomainError("truncation level must be nonnegative")


class VermaLevelSpace:
    """Partition basis of the lowest-weight module truncated at level N."""

    def __init__(self, params: ModuleParams):
        self.params = params
        self.N = params.N
        self.basis = []
        self.level_offsets = [0]
        for lvl in range(self.N + 1):
            parts = partitions_of(lvl)
            self.basis.extend(parts)
            self.level_offsets.append(len(self.basis))
        self.index = {mu: i for i, mu in enumerate(self.basis)}
        self.levels = np.array([sum(mu) for mu in self.basis])
        self.dim = len(self.basis)
        self._memo = {}
        self._gen_cache = {}

    def level_dim(self, lvl):
        return self.level_offsets[lvl + 1] - self.level_offsets[lvl]

    def level_slice(self, lvl):
        return slice(self.level_offsets[lvl], self.level_offsets[lvl + 1])

    # -- normal-ordered straightening ----------------------------------------
    def apply_generator(self, m: int, mu: tuple) -> dict:
        """L_m acting on the basis word L_{-μ}·v, as {partition: coefficient}.

        Components raised above level N are dropped (truncation).
        """
        key = (m, mu)
        if key in self._memo:
            return self._memo[key]
        c, h = self.params.c, self.params.h
        if not mu:
            if m > 0:
                out = {}
            elif m == 0:
                out = {(): h}
            else:
                out = {(-m,): 1} if -m <= self.N else {}
        elif m < 0 and -m >= mu[0]:
            word = (-m,) + mu
            out = {word: 1} if sum(word) <= self.N else {}
        else:
            head, rest = mu[0], mu[1:]
            out = {}
            # L_m L_{-head} = L_{-head} L_m + (m+head) L_{m-head} + δ central
            for part, a in self.apply_generator(m, rest).items():
                for part2, b in self.apply_generator(-head, part).items():
                    out[part2] = out.get(part2, 0) + a * b
            coef = m + head
            if coef:
                for part, a in self.apply_generator(m - head, rest).items():
                    out[part] = out.get(part, 0) + coef * a
            if m == head:
                central = c * (m ** 3 - m) / 12 if isinstance(c, Fraction) \
                    else c * (m ** 3 - m) / 12.0
                if central:
                    out[rest] = out.get(rest, 0) + central
            out = {p: v for p, v in out.items() if v != 0}
        self._memo[key] = out
        return out

    def generator_matrix(self, n: int) -> np.ndarray:
        """Dense real matrix of L_n on the truncated basis (float params only)."""
        if abs(n) > self.N:
            raise TruncationError(f"|n| = {abs(n)} exceeds truncation level {self.N}")
        if n not in self._gen_cache:
            M = np.zeros((self.dim, self.dim))
            for j, mu in enumerate(self.basis):
                for part, a in self.apply_generator(n, mu).items():
                    M[self.index[part], j] = float(a)
            self._gen_cache[n] = M
        return self._gen_cache[n]

    def lowest_weight_vector(self):
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v


@dataclass
class ModuleVector:
    amplitudes: np.ndarray
    truncated: bool = False


def apply_ln(space: VermaLevelSpace, n: int, v) -> ModuleVector:
    """Apply L_n; the result is flagged when truncation dropped nonzero mass."""
    ampl = v.amplitudes if isinstance(v, ModuleVector) else np.asarray(v, dtype=complex)
    if abs(n) > space.N:
        raise TruncationError(f"|n| = {abs(n)} exceeds truncation level {space.N}")
    out = space.generator_matrix(n) @ ampl
    dropped = False
    if n < 0:
        risky = space.levels > space.N - (-n)
        dropped = bool(np.any(np.abs(ampl[risky]) > 0))
    return ModuleVector(out, truncated=dropped)


# ---------------------------------------------------------------------------
# Shapovalov forms

def gram_matrix(params: ModuleParams, level: int, exact: bool = False):
    """Gram matrix ⟨L_{-μ}v, L_{-ν}v⟩ at one level, by full straightening.

    `exact=True` runs the same reduction in rational arithmetic (sensible for
    levels ≤ 4; c, h are coerced to Fractions).
    """
    if level > params.N:
        raise TruncationError("level exceeds the truncation")
    if exact:
        p = ModuleParams(Fraction(params.c).limit_denominator(10 ** 12),
                         Fraction(params.h).limit_denominator(10 ** 12), level)
    else:
        p = ModuleParams(float(params.c), float(params.h), level)
    space = VermaLevelSpace(p)
    parts = partitions_of(level)
    d = len(parts)
    G = [[0] * d for _ in range(d)]
    for jcol, nu in enumerate(parts):
        state = {nu: Fraction(1) if exact else 1.0}
        for irow, mu in enumerate(parts):
            cur = state
            for m in mu:  # adjoint word applied right-to-left: L_{μ1} first
                nxt = {}
                for part, a in cur.items():
                    for part2, b in space.apply_generator(m, part).items():
                        nxt[part2] = nxt.get(part2, 0) + a * b
                cur = nxt
            G[irow][jcol] = cur.get((), 0)
    if exact:
        return G
    return np.array(G, dtype=float)


def gram_block(space: VermaLevelSpace, max_level: int) -> np.ndarray:
    """Block-diagonal Gram pairing on all levels ≤ max_level."""
    blocks = [gram_matrix(ModuleParams(space.params.c, space.params.h, space.N), l)
              for l in range(max_level + 1)]
    dim = space.level_offsets[max_level + 1]
    G = np.zeros((dim, dim))
    for l, B in enumerate(blocks):
        sl = space.level_slice(l)
        G[sl, sl] = B
    return G


def exact_det(G) -> Fraction:
    """Determinant of a small matrix of Fractions (fraction-free elimination)."""
    A = [row[:] for row in G]
    n = len(A)
    det = Fraction(1)
    for i in range(n):
        piv = None
        for r in range(i, n):
            if A[r][i] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != i:
            A[i], A[piv] = A[piv], A[i]
            det = -det
        det *= A[i][i]
        inv = Fraction(1, 1) / A[i][i]
        for r in range(i + 1, n):
            factor = A[r][i] * inv
            if factor:
                A[r] = [a - factor * b for a, b in zip(A[r], A[i])]
    return det


@dataclass
class UnitarityVerdict:
    kind: str  # 'continuous' | 'discrete' | 'none'
    m: int | None = None
    p: int | None = None
    q: int | None = None


def unitarity_classify(c: float, h: float, tol: float = 1e-9) -> UnitarityVerdict:
    """Classify (c,h) against the continuous range c ≥ 1, h ≥ 0 and the
    discrete list c(m) = 1 − 6/((m+2)(m+3)), h_{p,q}(m) = ((p(m+1)−qm)²−1)/(4m(m+1)).

    The discrete formulas are applied exactly as printed; where they disagree
    with positivity of the Gram forms, the Gram test is the ground truth.
    """
    if c >= 1.0 - tol and h >= -tol:
        return UnitarityVerdict("continuous")
    for m in range(3, 400):
        cm = 1.0 - 6.0 / ((m + 2) * (m + 3))
        if abs(c - cm) < tol:
            for p in range(1, m):
                for q in range(1, p + 1):
                    hpq = ((p * (m + 1) - q * m) ** 2 - 1) / (4.0 * m * (m + 1))
                    if abs(h - hpq) < tol:
                        return UnitarityVerdict("discrete", m, p, q)
    return UnitarityVerdict("none")


# ---------------------------------------------------------------------------
# smeared stress tensor

def _series_of(f, max_mode=None) -> FourierSeries:
    if isinstance(f, FourierSeries):
        return f
    if isinstance(f, TrigPolynomial):
        K = f.max_mode if max_mode is None else max_mode
        coeffs = np.array([f.coefficient(k) for k in range(-K, K + 1)])
        return FourierSeries(coeffs, K)
    if isinstance(f, VectorField):
        if max_mode is None:
            raise DomainError("a mode cutoff is required for non-polynomial fields")
        return fourier_coeffs(f, max_mode)
    raise DomainError("expected a FourierSeries or vector field")


@dataclass
class StressMatrix:
    series: FourierSeries
    matrix: np.ndarray
    exact_rows: int  # level threshold below which the action is untruncated


def stress_matrix(space: VermaLevelSpace, f) -> StressMatrix:
    """Matrix of T(f) = Σ_n f̂_n L_n on the ≤N block."""
    series = _series_of(f)
    M = series.max_mode
    if M > space.N:
        raise TruncationError("smearing function has modes above the truncation")
    T = np.zeros((space.dim, space.dim), dtype=complex)
    for n in range(-M, M + 1):
        cn = series.coefficient(n)
        if cn != 0:
            T += cn * space.generator_matrix(n)
    return StressMatrix(series, T, exact_rows=space.N - M)


# ---------------------------------------------------------------------------
# 2-cocycles on vector fields

def gf_cocycle(f, g):
    """Classical 2-cocycle (1/48π)∫(f g''' − f''' g)dθ = −(i/12)Σ k³ f̂_{-k} ĝ_k."""
    fs, gs = _series_of(f), _series_of(g)
    K = max(fs.K, gs.K)
    k = np.arange(-K, K + 1, dtype=float)
    fw = np.array([fs.coefficient(-kk) for kk in range(-K, K + 1)])
    gw = np.array([gs.coefficient(kk) for kk in range(-K, K + 1)])
    val = -1j / 12.0 * np.sum(k ** 3 * fw * gw)
    return float(val.real) if abs(val.imag) < 1e-12 else complex(val)


def vir_cocycle(f, g):
    """Bracket-consistent central term −(1/24π)∫(f''' + f')g dθ.

    On pure modes (e_n, e_{-n}) it equals i(n³−n)/12, matching the central
    term of the shipped bracket; it differs from the classical cocycle by the
    coboundary generated by an energy shift.
    """
    fs, gs = _series_of(f), _series_of(g)
    K = max(fs.K, gs.K)
    k = np.arange(-K, K + 1, dtype=float)
    fw = np.array([fs.coefficient(kk) for kk in range(-K, K + 1)])
    gw = np.array([gs.coefficient(-kk) for kk in range(-K, K + 1)])
    val = 1j / 12.0 * np.sum((k ** 3 - k) * fw * gw)
    return float(val.real) if abs(val.imag) < 1e-12 else complex(val)


def bracket_field(f, g) -> FourierSeries:
    """[f,g] = f'g − fg' as a Fourier series (θ-derivative convention)."""
    fs, gs = _series_of(f), _series_of(g)
    K = fs.max_mode + gs.max_mode
    coeffs = np.zeros(2 * K + 1, dtype=complex)
    for j in range(-fs.max_mode, fs.max_mode + 1):
        fj = fs.coefficient(j)
        if fj == 0:
            continue
        for l in range(-gs.max_mode, gs.max_mode + 1):
            gl = gs.coefficient(l)
            if gl == 0:
                continue
            coeffs[j + l + K] += (1j * j) * fj * gl - fj * (1j * l) * gl
    return FourierSeries(coeffs, K)


def commutator_check(space: VermaLevelSpace, f, g) -> float:
    """Max-entry residual of i[T(g),T(f)] − T(g'f − f'g) − c·ω(g,f)·Id on the
    exact block (levels ≤ N − 2·max mode), with the bracket-consistent cocycle."""
    fs, gs = _series_of(f), _series_of(g)
    mmax = max(fs.max_mode, gs.max_mode)
    lmax = space.N - 2 * mmax
    if lmax < 0:
        raise TruncationError("exact block is empty: raise N or lower the modes")
    Tf = stress_matrix(space, fs).matrix
    Tg = stress_matrix(space, gs).matrix
    Th = stress_matrix(space, bracket_field(gs, fs)).matrix
    omega = vir_cocycle(gs, fs)
    cval = float(space.params.c)
    R = 1j * (Tg @ Tf - Tf @ Tg) - Th - cval * omega * np.eye(space.dim)
    sel = space.levels <= lmax
    return float(np.max(np.abs(R[np.ix_(sel, sel)])))


# ---------------------------------------------------------------------------
# the Schwarzian cocycle of the covariance law

def beta_cocycle(gamma: CircleMap, f: VectorField, c: float,
                 support=None, guard=1e-3, nodes_per_panel=24) -> float:
    """β(γ,f) = (c/24π)∫ {γ,z}|_{z=e^{iθ}} f(e^{iθ}) e^{2iθ} dθ.

    The weighted Schwarzian is real for circle maps, so the integral is
    assembled directly from its real form.  When γ has nonsmooth points they
    must lie outside the (closure of the) smearing support; the integral is
    then restricted to the support, with a guard band at any endpoint that
    touches a breakpoint.
    """
    lo, hi = support if support is not None else (f.support or (-np.pi, np.pi))
    for b in gamma.breakpoints:
        d_lo = abs(wrap_angle(b - lo))
        d_hi = abs(wrap_angle(b - hi))
        inside = _angle_in(b, lo, hi)
        if inside and d_lo > guard and d_hi > guard:
            raise DomainError("γ has a nonsmooth point inside the smearing support")
    a = lo + (guard if any(abs(wrap_angle(b - lo)) <= guard for b in gamma.breakpoints) else 0.0)
    b_ = hi - (guard if any(abs(wrap_angle(b - hi)) <= guard for b in gamma.breakpoints) else 0.0)
    nodes, weights = _quad.panel_rule(a, b_, tuple(f.breakpoints), freq=64.0,
                                      nodes_per_panel=nodes_per_panel)
    vals = schwarzian_theta(gamma, nodes, guard=0.0) * f(nodes)
    return float(c / (24.0 * np.pi) * np.sum(weights * vals))


def _angle_in(b, lo, hi):
    span = hi - lo
    return 0.0 < float(np.mod(b - lo, TWOPI)) < span


# ---------------------------------------------------------------------------
# quantum energy inequality

def qei_bound(f: VectorField, c: float, grid: int = 4096) -> float:
    """Lower bound −(c/12π)∫_ℝ (d√(C_*f)/dt)² dt for the smeared energy.

    C_*f(t) = (1+cosθ)·f(e^{iθ})|_{θ=2 arctan t} must be nonnegative; the
    integral is evaluated in the angle variable,
        −(c/12π)∫ (1+cosθ)·(d/dθ √((1+cosθ) f))² dθ,
    with the convention that the derivative of √· is 0 where the density
    vanishes, and a tail cutoff where the density is below 1e−14.
    """
    th = np.linspace(-np.pi, np.pi, grid, endpoint=False)
    dens = f.cayley_sq(th)
    if np.min(dens) < -1e-10:
        raise PreconditionError("the line-picture density C_*f must be nonnegative")
    bps = set(f.breakpoints)
    if f.support is not None:
        bps.update((f.support[0], f.support[1]))
    nodes, weights = _quad.panel_rule(-np.pi, np.pi, tuple(bps), freq=96.0,
                                      nodes_per_panel=24)
    g = f.cayley_sq(nodes)
    dg = f.cayley_sq_deriv(nodes)
    w = 1.0 + np.cos(nodes)
    integrand = np.where(g > 1e-14, dg * dg / (4.0 * np.where(g > 1e-14, g, 1.0)), 0.0) * w
    return float(-c / (12.0 * np.pi) * np.sum(weights * integrand))


def qei_check(space: VermaLevelSpace, f: VectorField, max_mode: int, c: float,
              trials: int = 100, seed: int = 0, bound: float | None = None) -> float:
    """Minimum of ⟨ψ,T(f)ψ⟩ − bound over seeded random exact-block unit states.

    States are sampled in the positive part of the Shapovalov form on levels
    ≤ N − max_mode (null directions of degenerate modules are projected out)
    and normalized in the module's inner product.
    """
    if 2 * max_mode > space.N:
        raise TruncationError("max mode exceeds N/2: no robust exact block")
    series = _series_of(f, max_mode)
    T = stress_matrix(space, series)
    lmax = space.N - max_mode
    sel = space.levels <= lmax
    G = gram_block(space, lmax)
    M = T.matrix[np.ix_(sel, sel)]
    evals, evecs = np.linalg.eigh(G)
    keep = evals > 1e-10 * np.max(evals)
    Q = evecs[:, keep] / np.sqrt(evals[keep])
    A = Q.conj().T @ (G @ M @ Q)
    rng = np.random.default_rng(seed)
    d = Q.shape[1]
    if bound is None:
        bound = qei_bound(f, c)
    worst = np.inf
    for _ in range(trials):
        x = rng.normal(size=d) + 1j * rng.normal(size=d)
        x /= np.linalg.norm(x)
        val = float(np.real(x.conj() @ (A @ x)))
        worst = min(worst, val - bound)
    return worst


# ---------------------------------------------------------------------------
# the localized-transformation data of the translation cover

def transformed_generator(t: float, c: float):
    """(Exp(t·h₋𝔱)_*𝔱, β(Exp(t·h₋𝔱), 𝔱)) with the β integral restricted to
    supp(h₋𝔱); verifies the pushed field still agrees with 𝔱 near −1."""
    from .circle import exp_field, pushforward
    from .fields import half_cutoffs, translation_generator
    if abs(t) > 2.0:
        raise DomainError("|t| ≤ 2 is required for the shipped cutoffs")
    h_minus_t, _, _, _ = half_cutoffs()
    tgen = translation_generator()
    flow = exp_field(h_minus_t, t)
    pushed = pushforward(flow, tgen)
    beta = beta_cocycle(flow, tgen, c, support=(-np.pi, 0.0))
    th = np.linspace(-np.pi + 1e-6, -np.pi + 0.2, 64)
    mism = float(np.max(np.abs(pushed(th) - tgen(th))))
    if mism > 1e-8:
        raise ToolkitError(f"pushforward fails to agree with the generator near -1 ({mism:.2e})")
    return pushed, beta
