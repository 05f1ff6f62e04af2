"""Single-qubit decoherence channels and their Pauli/Clifford twirls.

Amplitude damping (AD), phase damping (PD) and the combined channel (APD)
are parameterised by the damping probability ``gamma`` and the scattering
probability ``lam``.  Times are in microseconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import PauliString

ATOL = 1e-12
_CLAMP = 1e-15


class DomainError(ValueError):
    """A numerical precondition was violated."""


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def _clean_prob(value: float, name: str = "probability") -> float:
    # rounding residue below zero is clamped, anything larger is a bug upstream
    if value < 0.0:
        if value >= -_CLAMP:
            return 0.0
        raise DomainError(f"{name} is negative: {value!r}")
    return value


@dataclass(frozen=True)
class PauliChannelParams:
    """Probabilities of I, X, Y, Z acting on one qubit."""

    pI: float
    px: float
    py: float
    pz: float

    def __post_init__(self):
        for name in ("pI", "px", "py", "pz"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name}={v!r} is not a probability")
        if abs(self.pI + self.px + self.py + self.pz - 1.0) > ATOL:
            raise DomainError("Pauli channel probabilities must sum to 1")

    @classmethod
    def from_errors(cls, px: float, py: float, pz: float) -> "PauliChannelParams":
        px, py, pz = (_clean_prob(v) for v in (px, py, pz))
        pI = _clean_prob(1.0 - px - py - pz, "pI")
        return cls(pI, px, py, pz)

    @classmethod
    def depolarizing(cls, p: float) -> "PauliChannelParams":
        _check_unit("p", p)
        return cls.from_errors(p / 3, p / 3, p / 3)

    @property
    def p(self) -> float:
        return self.px + self.py + self.pz

    @property
    def alpha(self) -> float:
        return self.pz / self.px if self.px > 0 else math.inf

    def as_array(self) -> np.ndarray:
        """Probabilities ordered (I, X, Y, Z)."""
        return np.array([self.pI, self.px, self.py, self.pz])


@dataclass(frozen=True)
class DensityMatrix2:
    """A single-qubit density matrix."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError("density matrix must be 2x2")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_bloch(cls, rx: float, ry: float, rz: float) -> "DensityMatrix2":
        if rx * rx + ry * ry + rz * rz > 1 + ATOL:
            raise DomainError("Bloch vector longer than 1")
        rho = 0.5 * np.array([[1 + rz, rx - 1j * ry], [rx + 1j * ry, 1 - rz]])
        return cls(rho)

    def is_valid(self, tol: float = ATOL) -> bool:
        r = self.rho
        herm = np.allclose(r, r.conj().T, atol=tol)
        trace = abs(np.trace(r) - 1) <= tol
        return bool(herm and trace and np.linalg.eigvalsh(r).min() >= -tol)


@dataclass(frozen=True)
class KrausChannel:
    ops: tuple[np.ndarray, ...]

    def completeness_residual(self) -> float:
        total = sum(e.conj().T @ e for e in self.ops)
        return float(np.abs(total - np.eye(2)).max())

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Serial concatenation ``other ∘ self`` (self acts first)."""
        return KrausChannel(tuple(b @ a for b in other.ops for a in self.ops))


def decoherence_params(t: float, t1: float, t2: float) -> tuple[float, float]:
    """Damping and scattering probabilities after time ``t``."""
    if t < 0:
        raise DomainError("time must be non-negative")
    if t1 <= 0 or t2 <= 0:
        raise DomainError("T1 and T2 must be positive")
    if t2 > 2 * t1 * (1 + 1e-15):
        raise DomainError(f"T2={t2} exceeds the Ramsey limit 2*T1={2 * t1}")
    gamma = -math.expm1(-t / t1)
    lam = -math.expm1(t / t1 - 2 * t / t2)
    return gamma, max(lam, 0.0)


def t2_from_tphi(t1: float, tphi: float | None) -> float:
    """Dephasing time from relaxation and pure-dephasing times."""
    if tphi is None or math.isinf(tphi):
        return 2 * t1
    return 1.0 / (1.0 / (2 * t1) + 1.0 / tphi)


def make_apd(gamma: float, lam: float) -> KrausChannel:
    _check_unit("gamma", gamma)
    _check_unit("lambda", lam)
    a = math.sqrt(max(1 - gamma - (1 - gamma) * lam, 0.0))
    e0 = np.array([[1, 0], [0, a]], dtype=complex)
    e1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    e2 = np.array([[0, 0], [0, math.sqrt((1 - gamma) * lam)]], dtype=complex)
    return KrausChannel((e0, e1, e2))


def make_ad(gamma: float) -> KrausChannel:
    return make_apd(gamma, 0.0)


def make_pd(lam: float) -> KrausChannel:
    return make_apd(0.0, lam)


def apply(ch: KrausChannel, rho: DensityMatrix2) -> DensityMatrix2:
    r = rho.rho
    return DensityMatrix2(sum(e @ r @ e.conj().T for e in ch.ops))


def apd_closed_form(gamma: float, lam: float, rho: DensityMatrix2) -> DensityMatrix2:
    """Output of the APD channel written entrywise."""
    r = rho.rho
    a = math.sqrt(max(1 - gamma - (1 - gamma) * lam, 0.0))
    out = np.array(
        [
            [1 - (1 - gamma) * r[1, 1], r[0, 1] * a],
            [np.conj(r[0, 1]) * a, (1 - gamma) * r[1, 1]],
        ]
    )
    return DensityMatrix2(out)


def _coherence(gamma: float, lam: float) -> float:
    return math.sqrt(max(1 - gamma - (1 - gamma) * lam, 0.0))


def pta(gamma: float, lam: float = 0.0) -> PauliChannelParams:
    """Pauli twirl of the APD channel."""
    _check_unit("gamma", gamma)
    _check_unit("lambda", lam)
    s = _coherence(gamma, lam)
    pxy = gamma / 4
    pz = (2 - gamma - 2 * s) / 4
    return PauliChannelParams.from_errors(pxy, pxy, pz)


def cta(gamma: float, lam: float = 0.0) -> float:
    """Depolarizing probability of the Clifford twirl of the APD channel."""
    _check_unit("gamma", gamma)
    _check_unit("lambda", lam)
    return _clean_prob((2 + gamma - 2 * _coherence(gamma, lam)) / 4)


def cta_params(gamma: float, lam: float = 0.0) -> PauliChannelParams:
    return PauliChannelParams.depolarizing(cta(gamma, lam))


def gamma_from_cta(p: float) -> float:
    """Inverse of ``cta(gamma, 0)`` on [0, 3/4]."""
    if not 0.0 <= p <= 0.75:
        raise DomainError("an AD Clifford twirl has p in [0, 3/4]")
    # 4p = 2 + g - 2 sqrt(1-g); with s = sqrt(1-g): s^2 + 2s + (4p - 3) = 0
    s = -1 + math.sqrt(4 - 4 * p)
    return min(max(1 - s * s, 0.0), 1.0)


def gamma_from_pta_p(p: float) -> float:
    """Gamma whose AD Pauli twirl has total error probability ``p``."""
    return gamma_from_cta(p)


def asymmetry(t: float, t1: float, t2: float) -> float:
    """Ratio pz/px of the Pauli twirl at time ``t``."""
    gamma, lam = decoherence_params(t, t1, t2)
    params = pta(gamma, lam)
    if params.px == 0:
        raise DomainError("asymmetry undefined at t=0")
    return params.pz / params.px


def asymmetry_approx(t1: float, t2: float) -> float:
    """Short-time limit 2*T1/T2 - 1."""
    return 2 * t1 / t2 - 1


def pauli_from_alpha(p: float, alpha: float) -> PauliChannelParams:
    _check_unit("p", p)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if math.isinf(alpha):
        return PauliChannelParams.from_errors(0.0, 0.0, p)
    pxy = p / (alpha + 2)
    return PauliChannelParams.from_errors(pxy, pxy, alpha * pxy)


# -- error sampling -----------------------------------------------------------

# per-qubit codes follow pauli.LABELS: 0=I, 1=X, 2=Y, 3=Z


def sample_codes(params: PauliChannelParams, shape, rng: np.random.Generator) -> np.ndarray:
    """IID per-qubit Pauli codes with the given probabilities."""
    cdf = np.cumsum(params.as_array()[:3])
    u = rng.random(shape)
    return np.searchsorted(cdf, u, side="right").astype(np.uint8)


def sample_error(params: PauliChannelParams, n: int, rng: np.random.Generator) -> PauliString:
    return PauliString.from_codes(sample_codes(params, n, rng))


def markov_transition_matrix(params: PauliChannelParams, mu: float) -> np.ndarray:
    """``T[a, b] = P(next = b | previous = a)``."""
    _check_unit("mu", mu)
    p = params.as_array()
    return (1 - mu) * np.tile(p, (4, 1)) + mu * np.eye(4)


def sample_markov_codes(
    params: PauliChannelParams, mu: float, shape: int | Sequence[int], rng: np.random.Generator
) -> np.ndarray:
    """Markov-correlated Pauli codes along the last axis.

    Each step keeps the previous operator with probability ``mu`` and
    otherwise redraws from ``params``; this gives exactly the transition
    ``(1-mu) p_b + mu delta_ab``.
    """
    _check_unit("mu", mu)
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    fresh = sample_codes(params, shape, rng)
    if shape[-1] == 0:
        return fresh
    keep = rng.random(shape) < mu
    out = fresh.copy()
    for j in range(1, shape[-1]):
        out[..., j] = np.where(keep[..., j], out[..., j - 1], fresh[..., j])
    return out


def sample_markov_error(
    params: PauliChannelParams, mu: float, n: int, rng: np.random.Generator
) -> PauliString:
    return PauliString.from_codes(sample_markov_codes(params, mu, n, rng))
