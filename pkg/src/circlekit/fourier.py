"""Fourier analysis on the circle: coefficients, Sobolev-type norms, and the
oscillatory mixed-mode integrals with their decay diagnostics.

All oscillatory integrals use breakpoint-aware composite Gauss panels rather
than the FFT: the maps involved are generally not band-limited and may have
corners, and the decay rate is precisely the quantity under test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _quad
from .circle import CircleMap
from .errors import ResolutionError
from .fields import TrigPolynomial, VectorField, wrap_angle

TWOPI = 2.0 * np.pi


@dataclass
class FourierSeries:
    """Truncated complex Fourier data: coeffs[k+K] = f̂_k for |k| ≤ K."""
    coeffs: np.ndarray
    K: int
    reality: bool = False

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (2 * self.K + 1,):
            raise ValueError("coefficient array must have length 2K+1")
        if self.reality:
            flipped = np.conj(self.coeffs[::-1])
            if np.max(np.abs(flipped - self.coeffs)) > 1e-10:
                self.reality = False

    def coefficient(self, k):
        k = int(k)
        if abs(k) > self.K:
            return 0.0 + 0.0j
        return self.coeffs[k + self.K]

    @property
    def modes(self):
        return np.arange(-self.K, self.K + 1)

    @property
    def max_mode(self):
        nz = np.nonzero(np.abs(self.coeffs) > 1e-14)[0]
        if len(nz) == 0:
            return 0
        return int(np.max(np.abs(nz - self.K)))

    def synthesis(self, theta):
        th = np.asarray(theta, dtype=float)
        return np.exp(1j * np.outer(np.atleast_1d(th), self.modes)) @ self.coeffs \
            if th.ndim else (np.exp(1j * th * self.modes) @ self.coeffs)

    def __add__(self, other):
        K = max(self.K, other.K)
        out = np.zeros(2 * K + 1, dtype=complex)
        out[K - self.K: K + self.K + 1] += self.coeffs
        out[K - other.K: K + other.K + 1] += other.coeffs
        return FourierSeries(out, K, self.reality and other.reality)

    def __rmul__(self, a):
        return FourierSeries(a * self.coeffs, self.K, self.reality and np.isreal(a))


def fourier_coeffs(f, K: int, breakpoints=None, samples: int | None = None) -> FourierSeries:
    """Fourier coefficients f̂_k = (1/2π)∫ e^{-ikθ} f(e^{iθ}) dθ for |k| ≤ K.

    Smooth inputs use the uniform (trapezoidal) rule, which is exact for
    band-limited functions once `samples ≥ 4K`; declared breakpoints switch to
    composite Gauss panels split at the corners.
    """
    if isinstance(f, VectorField):
        breakpoints = f.breakpoints if breakpoints is None else breakpoints
        fn = f
    else:
        fn = f
        breakpoints = () if breakpoints is None else breakpoints
    if not breakpoints:
        M = samples if samples is not None else max(4 * K, 512)
        if M < max(4 * K, 2):
            raise ResolutionError(f"need at least {4*K} samples for K={K}")
        th = np.arange(M) * TWOPI / M
        vals = np.asarray(fn(th), dtype=complex)
        spec = np.fft.fft(vals) / M
        ks = np.arange(-K, K + 1)
        coeffs = spec[np.mod(ks, M)]
    else:
        nodes, weights = _quad.panel_rule(-np.pi, np.pi, breakpoints,
                                          freq=float(K) + 8.0,
                                          points_budget=samples)
        vals = np.asarray(fn(nodes), dtype=complex) * weights
        ks = np.arange(-K, K + 1)
        coeffs = np.exp(-1j * np.outer(ks, nodes)) @ vals / TWOPI
    real_input = bool(np.max(np.abs(np.imag(vals))) < 1e-12)
    return FourierSeries(coeffs, K, reality=real_input)


def series_to_field(series: FourierSeries) -> TrigPolynomial:
    """Real trig-polynomial field from a (real) Fourier series."""
    K = series.K
    cos = np.zeros(K + 1)
    sin = np.zeros(K + 1)
    cos[0] = series.coefficient(0).real
    for k in range(1, K + 1):
        cos[k] = 2.0 * series.coefficient(k).real
        sin[k] = -2.0 * series.coefficient(k).imag
    return TrigPolynomial(cos=cos, sin=sin)


def h_s_norm(series: FourierSeries, s: float) -> float:
    """Sobolev norm (Σ_k (1+k²)^s |f̂_k|²)^{1/2} over the stored modes."""
    k = series.modes.astype(float)
    return float(np.sqrt(np.sum((1.0 + k * k) ** s * np.abs(series.coeffs) ** 2)))


def norm_3_2(series: FourierSeries) -> float:
    """The smeared-field norm Σ_k |f̂_k| (1 + |k|^{3/2})."""
    k = np.abs(series.modes.astype(float))
    return float(np.sum(np.abs(series.coeffs) * (1.0 + k ** 1.5)))


# ---------------------------------------------------------------------------
# oscillatory integrals λ_{m,n}

def _slope_bound(gamma: CircleMap) -> float:
    th = np.linspace(-np.pi, np.pi, 512, endpoint=False)
    d = _quad.central_derivative(gamma.lift, th, 1, 1e-4)
    return float(np.max(np.abs(d)))


def _lambda_rule(gamma: CircleMap, max_m: int, max_n: int,
                 quad_points: int | None = None):
    freq = max_m + max_n * (_slope_bound(gamma) * 1.1 + 0.5) + 16.0
    return _quad.panel_rule(-np.pi, np.pi, gamma.breakpoints, freq=freq,
                            points_budget=quad_points)


def lambda_matrix(gamma: CircleMap, ms, ns, quad_points: int | None = None,
                  rule=None) -> np.ndarray:
    """λ_{m,n}(γ) = (1/2π)∫ e^{-imθ} e^{in·γ̃(θ)} dθ for all pairs (m, n).

    One shared panel rule serves every pair; the result has shape
    (len(ms), len(ns)).
    """
    ms = np.asarray(ms, dtype=int)
    ns = np.asarray(ns, dtype=int)
    if rule is None:
        rule = _lambda_rule(gamma, int(np.max(np.abs(ms))), int(np.max(np.abs(ns))),
                            quad_points)
    nodes, weights = rule
    lift_vals = gamma.lift(nodes)
    G = np.exp(1j * np.outer(ns, lift_vals)) * weights  # (n, q)
    E = np.exp(-1j * np.outer(ms, nodes))               # (m, q)
    return (E @ G.T) / TWOPI


def lambda_mn(gamma: CircleMap, m: int, n: int,
              quad_points: int | None = None) -> complex:
    """Single oscillatory integral λ_{m,n}(γ) by breakpoint-aware panels."""
    if quad_points is not None and quad_points < 8 * (abs(m) + abs(n)):
        raise ResolutionError("quad_points must be at least 8(|m|+|n|)")
    return complex(lambda_matrix(gamma, [m], [n], quad_points)[0, 0])


@dataclass
class DecayReport:
    """Mixed-sign decay data: |λ_{m,n}| on m > 0 > n, with the weighted sup."""
    grid: np.ndarray          # (count, 2) int pairs (m, n)
    values: np.ndarray        # |λ_{m,n}| ≥ 0
    s: float
    sup_weighted: float
    fitted_constant: float
    fitted_exponent: float
    degenerate: bool = False

    def rows(self):
        w = self.values * (np.abs(self.grid[:, 0]) + np.abs(self.grid[:, 1])) ** (self.s - 1.0)
        for (m, n), v, wv in zip(self.grid, self.values, w):
            yield int(m), int(n), float(v), float(wv)


def lambda_decay_report(gamma: CircleMap, s: float, pmax: int,
                        quad_points: int | None = None) -> DecayReport:
    """Survey |λ_{m,n}| over the mixed-sign grid m > 0 > n, |m|+|n| ≤ pmax.

    Reports sup |λ|·(|m|+|n|)^{s-1} and a log-log fit of the antidiagonal
    maxima against |m|+|n| (fitted_exponent is the decay rate; degenerate
    reports with all-zero values are flagged).
    """
    ms = np.arange(1, pmax)
    ns = -np.arange(1, pmax)
    lam = np.abs(lambda_matrix(gamma, ms, ns, quad_points))
    M, Nn = np.meshgrid(ms, -ns, indexing="ij")
    P = M + Nn
    mask = P <= pmax
    grid = np.stack([M[mask], -Nn[mask]], axis=1)
    values = lam[mask]
    p = P[mask].astype(float)
    weighted = values * p ** (s - 1.0)
    if np.max(values) < 1e-14:
        return DecayReport(grid, values, s, 0.0, 0.0, np.inf, degenerate=True)
    sup_w = float(np.max(weighted))
    # antidiagonal maxima for the log-log fit, over the asymptotic half
    pvals = np.arange(2, pmax + 1)
    amax = np.array([np.max(values[p == pv]) if np.any(p == pv) else 0.0
                     for pv in pvals])
    sel = (amax > 1e-15) & (pvals >= max(4, pmax // 4))
    if np.count_nonzero(sel) >= 2:
        slope, intercept = np.polyfit(np.log(pvals[sel]), np.log(amax[sel]), 1)
        fitted_exponent = float(-slope)
        fitted_constant = float(np.exp(intercept))
    else:
        fitted_exponent = np.inf
        fitted_constant = 0.0
    return DecayReport(grid, values, s, sup_w, fitted_constant, fitted_exponent)


def ds_membership(gamma: CircleMap, s: float, K: int = 256) -> float:
    """H^s size of γ̃ − id as a periodic function (Sobolev-class diagnostic).

    Returns the truncated norm at cutoff K; growth of the value as K doubles
    is the caller's non-membership diagnostic.
    """
    series = fourier_coeffs(lambda th: gamma.lift(th) - th, K,
                            breakpoints=gamma.breakpoints)
    return h_s_norm(series, s)
