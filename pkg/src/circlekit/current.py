"""One-particle space of the U(1) current and its truncated Fock layer.

Mode space: coefficients f̂_k for 1 ≤ |k| ≤ K (constants are quotiented out).
The complex structure multiplies positive modes by +i and negative modes by
−i; the Hermitian product ⟨f,g⟩ = Σ_{k≥1} k f̂_k conj(ĝ_k) (linear in the
first slot) reproduces the energy-weighted squared seminorm as Re⟨f,f⟩ and
the symplectic form as Im⟨f,g⟩ on real pairs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, logm

from .circle import CircleMap, invert
from .errors import DomainError, PreconditionError
from .fourier import lambda_matrix

TWOPI = 2.0 * np.pi


@dataclass
class OneParticleVector:
    """Mode data f̂_k, 1 ≤ |k| ≤ K, stored as coeffs[k+K] with the k=0 slot zero."""
    coeffs: np.ndarray
    K: int

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (2 * self.K + 1,):
            raise ValueError("coefficient array must have length 2K+1")
        self.coeffs[self.K] = 0.0  # constants are quotiented out

    @classmethod
    def zero(cls, K):
        return cls(np.zeros(2 * K + 1, dtype=complex), K)

    @classmethod
    def from_modes(cls, K, **modes):
        """Build from keyword mode amplitudes, e.g. from_modes(8, k1=1.0, km1=1.0)."""
        v = cls.zero(K)
        for name, a in modes.items():
            k = int(name[2:]) * -1 if name.startswith("km") else int(name[1:])
            v.coeffs[k + K] = a
        return v

    @classmethod
    def real_field(cls, K, cos=(), sin=()):
        """Real combination Σ c_j cos(jθ) + s_j sin(jθ) as mode data."""
        v = cls.zero(K)
        for j, c in enumerate(cos):
            if j and c:
                v.coeffs[j + K] += c / 2.0
                v.coeffs[-j + K] += c / 2.0
        for j, s in enumerate(sin):
            if j and s:
                v.coeffs[j + K] += -1j * s / 2.0
                v.coeffs[-j + K] += 1j * s / 2.0
        return v

    def mode(self, k):
        return self.coeffs[k + self.K] if abs(k) <= self.K else 0.0 + 0.0j

    def is_real(self, tol=1e-12):
        return bool(np.max(np.abs(np.conj(self.coeffs[::-1]) - self.coeffs)) < tol)

    def positive_modes(self):
        return self.coeffs[self.K + 1:]

    def copy_with(self, coeffs):
        return OneParticleVector(coeffs, self.K)


def seminorm_sq(f: OneParticleVector) -> float:
    """Energy-weighted squared seminorm Σ_{k≥1} k |f̂_k|²."""
    k = np.arange(1, f.K + 1, dtype=float)
    return float(np.sum(k * np.abs(f.positive_modes()) ** 2))


def inner_product(f: OneParticleVector, g: OneParticleVector) -> complex:
    """⟨f,g⟩ = Σ_{k≥1} k f̂_k conj(ĝ_k); Re⟨f,f⟩ is the squared seminorm and
    Im⟨f,g⟩ equals the symplectic form on real vectors."""
    k = np.arange(1, f.K + 1, dtype=float)
    return complex(np.sum(k * f.positive_modes() * np.conj(g.positive_modes())))


def complex_structure(f: OneParticleVector) -> OneParticleVector:
    """J: multiply positive modes by i, negative modes by −i."""
    out = f.coeffs.copy()
    out[f.K + 1:] *= 1j
    out[:f.K] *= -1j
    return f.copy_with(out)


def symplectic_form(f: OneParticleVector, g: OneParticleVector) -> float:
    """σ([f],[g]) = (1/4π)∫ f g' dθ, computed in Fourier space."""
    if not (f.is_real() and g.is_real()):
        raise DomainError("symplectic form is defined for real vectors")
    k = np.arange(-f.K, f.K + 1, dtype=float)
    val = 0.5 * np.sum(1j * k * f.coeffs[::-1] * g.coeffs)
    return float(np.real(val))


# ---------------------------------------------------------------------------
# the real-linear composition operator and the implementability diagnostic

@dataclass
class RealLinearOp:
    """Operator on the mode space in the orthonormal basis e_k/√|k|, k ≠ 0.

    Stored as a full (2K)×(2K) complex matrix over the index order
    (-K, ..., -1, 1, ..., K); the four sign blocks are addressable views.
    """
    matrix: np.ndarray
    K: int

    @property
    def mode_index(self):
        return np.concatenate([np.arange(-self.K, 0), np.arange(1, self.K + 1)])

    def block(self, row_sign, col_sign):
        K = self.K
        r = slice(K, 2 * K) if row_sign > 0 else slice(0, K)
        c = slice(K, 2 * K) if col_sign > 0 else slice(0, K)
        return self.matrix[r, c]

    def j_matrix(self):
        s = np.sign(self.mode_index).astype(complex)
        return np.diag(1j * s)

    def frobenius(self):
        return float(np.sqrt(np.sum(np.abs(self.matrix) ** 2)))

    def apply(self, f: OneParticleVector) -> OneParticleVector:
        idx = self.mode_index
        scale = np.sqrt(np.abs(idx).astype(float))
        amp = f.coeffs[idx + f.K] * scale  # coefficients of e_k -> amplitudes on ê_k
        out_amp = self.matrix @ amp
        coeffs = np.zeros(2 * f.K + 1, dtype=complex)
        coeffs[idx + f.K] = out_amp / scale
        return f.copy_with(coeffs)


def v_gamma(gamma: CircleMap, K: int, quad_points: int | None = None,
            gamma_inv: CircleMap | None = None) -> RealLinearOp:
    """Matrix of V(γ)[f] = [f∘γ⁻¹] in the basis e_k/√|k|.

    Entry (m,n) = √(|m|/|n|)·λ_{m,n}(γ⁻¹); the k = 0 output mass (constants)
    is projected out by construction of the index set.
    """
    ginv = gamma_inv if gamma_inv is not None else invert(gamma)
    ms = np.concatenate([np.arange(-K, 0), np.arange(1, K + 1)])
    lam = lambda_matrix(ginv, ms, ms, quad_points)
    scale = np.sqrt(np.abs(ms).astype(float))
    return RealLinearOp((scale[:, None] / scale[None, :]) * lam, K)


def a_operator(gamma: CircleMap | RealLinearOp, K: int | None = None,
               quad_points: int | None = None) -> RealLinearOp:
    """A = ½J[V(γ),J] = ½(JVJ + V): the sign-mixing part of V(γ).

    Same-sign blocks vanish identically and A anticommutes with J.
    """
    V = gamma if isinstance(gamma, RealLinearOp) else v_gamma(gamma, K, quad_points)
    s = np.sign(V.mode_index).astype(float)
    mixed = s[:, None] * s[None, :] < 0
    return RealLinearOp(np.where(mixed, V.matrix, 0.0), V.K)


def hs_norm_sweep(gamma: CircleMap, cutoffs) -> list[tuple[int, float]]:
    """Frobenius norm of the sign-mixing operator at each cutoff K.

    The operator entries do not depend on the cutoff, so the sweep is a family
    of nested partial sums of one matrix computed at max(cutoffs): exactly
    monotone non-decreasing in K.
    """
    cutoffs = sorted(int(k) for k in cutoffs)
    A = a_operator(gamma, cutoffs[-1])
    idx = A.mode_index
    out = []
    for K in cutoffs:
        sel = np.abs(idx) <= K
        sub = A.matrix[np.ix_(sel, sel)]
        out.append((K, float(np.sqrt(np.sum(np.abs(sub) ** 2)))))
    return out


def sweep_verdict(sweep, tail_tol: float = 1e-6, growth_tol: float = 0.10) -> str:
    """Three-valued implementability verdict from a Hilbert-Schmidt sweep.

    `converged` when the last doubling adds less than `tail_tol` in absolute
    terms (Cauchy tail); otherwise `diverging` when the norm grew by more than
    `growth_tol` relatively across the whole sweep; else `inconclusive`.
    Finite sweeps cannot decide limits; the thresholds are explicit knobs.
    """
    if len(sweep) < 2:
        return "inconclusive"
    hs = [v for _, v in sweep]
    if hs[-1] - hs[-2] < tail_tol:
        return "converged"
    if hs[0] > 0 and hs[-1] / hs[0] - 1.0 > growth_tol:
        return "diverging"
    return "inconclusive"


def hs_series_bound(s: float, C: float, pmax: int) -> float:
    """Partial sum Σ_{p=2}^{pmax} C²(p−1)(2+log p)/p^{2(s−1)}.

    Dominating series for the (quarter) squared Hilbert-Schmidt norm of the
    sign-mixing operator of a Sobolev-class map; converges exactly when s > 2.
    """
    if s <= 1.5:
        raise DomainError("series bound requires s > 3/2")
    p = np.arange(2, pmax + 1, dtype=float)
    return float(C * C * np.sum((p - 1.0) * (2.0 + np.log(p)) / p ** (2.0 * (s - 1.0))))


# ---------------------------------------------------------------------------
# truncated Fock space

@dataclass
class TruncatedFock:
    """Occupation-number truncation of the symmetric Fock space.

    `modes` is an increasing subset of positive mode numbers; each mode is
    capped at occupation `n_max`.  The basis enumerates occupation tuples with
    the last mode varying fastest.
    """
    modes: tuple
    n_max: int
    basis: list = field(init=False)
    dim: int = field(init=False)

    def __post_init__(self):
        self.modes = tuple(int(m) for m in self.modes)
        if any(m <= 0 for m in self.modes):
            raise DomainError("Fock modes must be positive")
        self.basis = list(itertools.product(range(self.n_max + 1),
                                            repeat=len(self.modes)))
        self.dim = (self.n_max + 1) ** len(self.modes)

    def annihilator(self, mode_pos: int) -> np.ndarray:
        n = self.n_max
        a1 = np.diag(np.sqrt(np.arange(1, n + 1, dtype=float)), k=1)
        mats = []
        for i in range(len(self.modes)):
            mats.append(a1 if i == mode_pos else np.eye(n + 1))
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    def total_occupation(self):
        return np.array([sum(b) for b in self.basis])

    def sector(self, max_total: int) -> np.ndarray:
        """Boolean mask of basis states with total occupation ≤ max_total."""
        return self.total_occupation() <= max_total


def weyl_matrix(fock: TruncatedFock, f: OneParticleVector) -> np.ndarray:
    """Unitary Weyl operator W(f) = exp(Σ_k α_k a_k† − conj(α_k) a_k).

    The per-mode amplitudes α_k = √(k/2)·conj(f̂_k) are fixed by the scalar
    product so that W(f)W(g) = e^{-i·Im⟨f,g⟩/2} W(f+g) holds on sectors the
    truncation leaves exact.
    """
    for k in range(1, f.K + 1):
        if k not in fock.modes and abs(f.mode(k)) > 1e-12:
            raise DomainError(f"vector has mass on mode {k} outside the Fock mode set")
    G = np.zeros((fock.dim, fock.dim), dtype=complex)
    for pos, k in enumerate(fock.modes):
        alpha = np.sqrt(k / 2.0) * np.conj(f.mode(k))
        if alpha == 0:
            continue
        a = fock.annihilator(pos)
        G += alpha * a.conj().T - np.conj(alpha) * a
    return expm(G)


def second_quantize(fock: TruncatedFock, u1: np.ndarray) -> np.ndarray:
    """Multiplicative (particle-conserving) second quantization of a one-particle
    unitary acting on the mode coefficients of `fock.modes`.

    Diagonal inputs act by products of phases over occupation tuples; general
    inputs exponentiate the quadratic generator dΓ(log ũ), where ũ is the
    amplitude-space unitary induced by the energy weights.
    """
    u1 = np.asarray(u1, dtype=complex)
    nm = len(fock.modes)
    if u1.shape != (nm, nm):
        raise DomainError("one-particle matrix must act on the Fock mode set")
    w = np.sqrt(np.array(fock.modes, dtype=float))
    util = (w[:, None] / w[None, :]) * np.conj(u1)
    if np.max(np.abs(util.conj().T @ util - np.eye(nm))) > 1e-10:
        raise DomainError("one-particle matrix is not unitary for the energy metric")
    if np.max(np.abs(util - np.diag(np.diag(util)))) < 1e-14:
        phases = np.diag(util)
        diag = np.ones(fock.dim, dtype=complex)
        for i, b in enumerate(fock.basis):
            diag[i] = np.prod(phases ** np.array(b))
        return np.diag(diag)
    H = logm(util)
    dG = np.zeros((fock.dim, fock.dim), dtype=complex)
    ladders = [fock.annihilator(p) for p in range(nm)]
    for i in range(nm):
        for j in range(nm):
            if abs(H[i, j]) > 1e-16:
                dG += H[i, j] * ladders[i].conj().T @ ladders[j]
    return expm(dG)


def apply_u1(u1: np.ndarray, fock: TruncatedFock, f: OneParticleVector) -> OneParticleVector:
    """Apply a mode-space matrix (over fock.modes) to a vector's positive modes."""
    coeffs = f.coeffs.copy()
    amps = np.array([f.mode(k) for k in fock.modes])
    out = np.asarray(u1, dtype=complex) @ amps
    for k in range(1, f.K + 1):
        coeffs[k + f.K] = 0.0
        coeffs[-k + f.K] = 0.0
    for k, a in zip(fock.modes, out):
        coeffs[k + f.K] = a
    return f.copy_with(coeffs)
