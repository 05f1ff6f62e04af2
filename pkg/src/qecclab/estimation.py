"""Channel identification: Fisher information, estimator-averaged WER and the
online (decoder-coupled) estimators.

The online estimators only need a map from the current channel estimate to
per-qubit posteriors.  Here that map is exact enumeration on a small code
(``small_codes.all_posterior_marginals``).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .channels import DomainError, PauliChannelParams
from .decoherence import TruncGauss
from .limits import depolarizing_noise_limit
from .small_codes import (
    StabilizerCode,
    all_posterior_marginals,
    coset_probabilities,
    dqmld_classes,
    syndrome_index,
)

PROBES = ("pure", "epr")
CLAMP = 1e-12
DEFAULT_MAX_ITERS = 32
DEFAULT_TOL = 1e-9


def fisher(p: float, probe: str) -> float:
    """Single-use Fisher information of a depolarizing channel."""
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    if probe == "pure":
        return 9 / (8 * p * (3 - 2 * p))
    if probe == "epr":
        return 9 / (16 * p * (1 - p))
    raise ValueError(f"probe must be one of {PROBES}")


def cramer_rao_var(p: float, probe: str, N: int) -> float:
    if N < 1:
        raise DomainError("need at least one probe")
    return 1 / (N * fisher(p, probe))


def estimator_pdf(p: float, probe: str, N: int) -> TruncGauss:
    return TruncGauss(p, math.sqrt(cramer_rao_var(p, probe, N)), 0.0, 1.0)


@dataclass(frozen=True)
class SensitivityCurve:
    """WER as a function of the decoder's channel estimate."""

    p_hat: np.ndarray
    wer: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.p_hat, dtype=float)
        y = np.asarray(self.wer, dtype=float)
        if x.shape != y.shape or x.ndim != 1 or x.size == 0:
            raise ValueError("curve needs matching 1-D arrays")
        if np.any(np.diff(x) < 0):
            raise ValueError("p_hat must be nondecreasing")
        object.__setattr__(self, "p_hat", x)
        object.__setattr__(self, "wer", y)

    def __call__(self, x):
        # linear inside, flat outside
        return np.interp(x, self.p_hat, self.wer)

    @classmethod
    def constant(cls, value: float) -> "SensitivityCurve":
        return cls(np.array([0.0, 1.0]), np.array([value, value]))

    @classmethod
    def from_csv(cls, path: str | Path) -> "SensitivityCurve":
        xs, ys = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].startswith("#"):
                    continue
                try:
                    x, y = float(row[0]), float(row[1])
                except ValueError:
                    continue  # header line
                xs.append(x)
                ys.append(y)
        return cls(np.array(xs), np.array(ys))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["p_hat", "wer"])
            for x, y in zip(self.p_hat, self.wer):
                w.writerow([repr(float(x)), repr(float(y))])


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, eps: float, max_depth: int = 48) -> float:
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6 * (fa + 4 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, eps, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * eps:
            return left + right + delta / 15
        return rec(a, m, fa, flm, fm, left, eps / 2, depth - 1) + rec(m, b, fm, frm, fb, right, eps / 2, depth - 1)

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), eps, max_depth)


def averaged_wer(curve: SensitivityCurve, p: float, probe: str, N: int, rtol: float = 1e-6) -> float:
    """WER averaged over the estimator's truncated-normal distribution."""
    dist = estimator_pdf(p, probe, N)
    sigma = dist.sigma
    if sigma < 1e-12:
        return float(curve(p))
    # split at curve nodes and around the peak so no subinterval hides structure
    cuts = {0.0, 1.0}
    cuts.update(float(x) for x in curve.p_hat if 0 < x < 1)
    for k in (0.5, 1, 2, 4, 8, 16):
        cuts.update(min(max(p + s * k * sigma, 0.0), 1.0) for s in (-1, 1))
    edges = sorted(cuts)
    f = lambda x: float(curve(x)) * float(dist.pdf(x))
    spans = [(a, b) for a, b in zip(edges, edges[1:]) if b > a]
    coarse = []
    for a, b in spans:
        xs = np.linspace(a, b, 65)
        coarse.append(float(np.trapezoid([f(x) for x in xs], xs)))
    # error budget follows each piece's share of the mass, not its width
    floor = 1e-12 * max(abs(sum(coarse)), 1e-300)
    return sum(adaptive_simpson(f, a, b, rtol * max(abs(c), floor)) for (a, b), c in zip(spans, coarse))


# -- online estimation --------------------------------------------------------


def online_estimate_step(marginals) -> float:
    """1 - mean_i P(E_i = I | s)."""
    m = np.asarray(marginals, dtype=float)
    return float(1.0 - m[:, 0].mean())


@dataclass(frozen=True)
class AsymEstimate:
    px: float
    py: float
    pz: float

    @property
    def alpha(self) -> float | None:
        return None if self.px == 0 else self.pz / self.px

    @property
    def p(self) -> float:
        return self.px + self.py + self.pz

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.px, self.py, self.pz)


def online_estimate_step_asym(marginals) -> AsymEstimate:
    m = np.asarray(marginals, dtype=float)
    px, py, pz = (float(v) for v in m[:, 1:].mean(axis=0))
    return AsymEstimate(px, py, pz)


class EstimationError(RuntimeError):
    def __init__(self, message: str, trajectory: list):
        super().__init__(message)
        self.trajectory = trajectory


def _clamp_estimate(est, kind: str) -> PauliChannelParams:
    if kind == "depolarizing":
        p = min(max(float(est), CLAMP), 1 - CLAMP)
        return PauliChannelParams.depolarizing(p)
    q = np.clip(np.asarray(est, dtype=float), CLAMP, 1 - CLAMP)
    if q.sum() > 1 - CLAMP:
        q = q / q.sum() * (1 - CLAMP)
    return PauliChannelParams.from_errors(*q)


def _initial(init, kind: str):
    if kind == "depolarizing":
        return float(init)
    if kind == "pauli":
        if np.ndim(init) == 0:
            return np.full(3, float(init) / 3)
        q = np.asarray(init, dtype=float)
        if q.shape != (3,):
            raise ValueError("asymmetric init needs (px, py, pz)")
        return q
    raise ValueError("channel_kind must be 'depolarizing' or 'pauli'")


def default_init(code: StabilizerCode, kind: str = "depolarizing"):
    """Depolarizing hashing limit at the code rate, split evenly for 'pauli'."""
    p_star = depolarizing_noise_limit(code.k / code.n)
    return p_star if kind == "depolarizing" else np.full(3, p_star / 3)


@dataclass
class OnlineResult:
    trajectory: list = field(default_factory=list)
    logical_class: int | np.ndarray = 0
    converged: bool = False

    @property
    def final(self):
        return self.trajectory[-1]

    @property
    def iterations(self) -> int:
        return len(self.trajectory) - 1


def _iterate(weights_fn, code, init, kind, max_iters, tol) -> OnlineResult:
    """Plain fixed-point loop; ``weights_fn`` maps marginals of all syndromes
    to the pooled per-qubit marginal used by the estimator step."""
    est = _initial(init, kind)
    traj = [est if kind == "depolarizing" else est.copy()]
    converged = False
    for _ in range(max_iters):
        marg = weights_fn(all_posterior_marginals(code, _clamp_estimate(est, kind)))
        if kind == "depolarizing":
            new = online_estimate_step(marg)
            delta = abs(new - est)
        else:
            new = np.array(online_estimate_step_asym(marg).as_tuple())
            delta = float(np.abs(new - est).max())
        if not np.all(np.isfinite(new)):
            raise EstimationError("estimate became non-finite", traj)
        est = new
        traj.append(est if kind == "depolarizing" else est.copy())
        if delta < tol:
            converged = True
            break
    return OnlineResult(traj, 0, converged)


def online_decode(
    code: StabilizerCode,
    syndrome,
    init=None,
    channel_kind: str = "depolarizing",
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> OnlineResult:
    """Iterate estimate -> posteriors -> estimate on one block."""
    if init is None:
        init = default_init(code, channel_kind)
    si = syndrome_index(syndrome)
    res = _iterate(lambda all_m: all_m[si], code, init, channel_kind, max_iters, tol)
    res.logical_class = int(dqmld_classes(code, _clamp_estimate(res.final, channel_kind))[si])
    return res


def online_fixed_points(
    code: StabilizerCode,
    init=None,
    channel_kind: str = "depolarizing",
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Final per-block estimate for every syndrome (the loop is deterministic
    given the syndrome, so Monte Carlo runs can look results up)."""
    out = [
        online_decode(code, _bits(si, code), init, channel_kind, max_iters, tol).final
        for si in range(code.n_syndromes)
    ]
    return np.array(out, dtype=float)


def _bits(si: int, code: StabilizerCode) -> tuple[int, ...]:
    m = code.n - code.k
    return tuple((si >> (m - 1 - i)) & 1 for i in range(m))


def online_expectation(code: StabilizerCode, params: PauliChannelParams, fixed_points: np.ndarray) -> np.ndarray:
    """Exact mean of the per-block final estimate under the true channel."""
    ps = coset_probabilities(code, params).sum(axis=1)
    return np.tensordot(ps, fixed_points, axes=(0, 0))


def online_decode_pooled(
    code: StabilizerCode,
    syndrome_indices: Sequence[int],
    init=None,
    channel_kind: str = "depolarizing",
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> OnlineResult:
    """One shared estimate over a window of blocks treated as a single long block."""
    if init is None:
        init = default_init(code, channel_kind)
    counts = np.bincount(np.asarray(syndrome_indices, dtype=np.int64), minlength=code.n_syndromes)
    if counts.sum() == 0:
        raise ValueError("empty window")
    w = counts / counts.sum()
    # pooled per-qubit marginal: average over blocks, shape (n, 4)
    res = _iterate(lambda all_m: np.tensordot(w, all_m, axes=(0, 0)), code, init, channel_kind, max_iters, tol)
    classes = dqmld_classes(code, _clamp_estimate(res.final, channel_kind))
    res.logical_class = classes[np.asarray(syndrome_indices, dtype=np.int64)]
    return res


def population_fixed_point(
    code: StabilizerCode,
    true_params: PauliChannelParams,
    init=None,
    channel_kind: str = "depolarizing",
    max_iters: int = 500,
    tol: float = 1e-13,
):
    """Limit of the pooled estimator for an infinitely long window."""
    if init is None:
        init = default_init(code, channel_kind)
    ps = coset_probabilities(code, true_params).sum(axis=1)
    res = _iterate(lambda all_m: np.tensordot(ps, all_m, axes=(0, 0)), code, init, channel_kind, max_iters, tol)
    return res.final
