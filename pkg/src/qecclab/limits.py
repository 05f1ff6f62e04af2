"""Capacities, hashing bounds, noise limits and outage probabilities."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import erfc

from .channels import DomainError, PauliChannelParams, cta, pta
from .decoherence import TruncGauss

KINDS = ("AD", "ADPTA", "ADCTA")
_GOLDEN = (math.sqrt(5) - 1) / 2


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binary entropy needs p in [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def entropy4(params: PauliChannelParams | Sequence[float]) -> float:
    probs = params.as_array() if isinstance(params, PauliChannelParams) else np.asarray(params, float)
    return float(-sum(p * math.log2(p) for p in probs if p > 0))


def _ad_objective(gamma: float, xi: float) -> float:
    return binary_entropy((1 - gamma) * xi) - binary_entropy(gamma * xi)


def capacity_ad(gamma: float, grid: int = 1024, tol: float = 1e-9) -> float:
    """Quantum capacity of the amplitude damping channel."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError("gamma must lie in [0, 1]")
    if gamma >= 0.5:
        return 0.0
    xs = np.linspace(0.0, 1.0, grid)
    vals = [_ad_objective(gamma, x) for x in xs]
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, grid - 1)]
    # golden-section refinement inside the bracketing grid cell pair
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = _ad_objective(gamma, c), _ad_objective(gamma, d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = _ad_objective(gamma, c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = _ad_objective(gamma, d)
    return max(vals[i], fc, fd, 0.0)


def capacity_pd(lam: float) -> float:
    if not 0.0 <= lam <= 1.0:
        raise DomainError("lambda must lie in [0, 1]")
    return 1.0 - binary_entropy((1 - math.sqrt(1 - lam)) / 2)


def capacity_apd_bottleneck(gamma: float, lam: float) -> float:
    """Upper bound min(C_AD, C_PD) for the combined channel."""
    return min(capacity_ad(gamma), capacity_pd(lam))


def hashing_bound(params: PauliChannelParams) -> float:
    return 1.0 - entropy4(params)


def capacity(gamma: float, kind: str) -> float:
    """Capacity (AD) or hashing bound (twirls) at damping ``gamma``."""
    if kind == "AD":
        return capacity_ad(gamma)
    if kind == "ADPTA":
        return hashing_bound(pta(gamma, 0.0))
    if kind == "ADCTA":
        return hashing_bound(PauliChannelParams.depolarizing(cta(gamma, 0.0)))
    raise ValueError(f"unknown channel kind {kind!r}; expected one of {KINDS}")


def bisect_decreasing(f: Callable[[float], float], target: float, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Root of f(x) = target for decreasing f on [lo, hi]."""
    flo, fhi = f(lo) - target, f(hi) - target
    if flo < 0 or fhi > 0:
        raise DomainError(f"target {target} not bracketed on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=256)
def noise_limit(rate: float, kind: str = "AD", tol: float = 1e-9) -> float:
    """Damping at which the capacity (or hashing bound) equals ``rate``."""
    if not 0.0 < rate < 1.0:
        raise DomainError("rate must lie in (0, 1)")
    if kind not in KINDS:
        raise ValueError(f"unknown channel kind {kind!r}; expected one of {KINDS}")
    hi = 0.5 - 1e-9 if kind == "AD" else 1 - 1e-9
    f = lambda g: max(capacity(g, kind), 0.0) if kind != "AD" else capacity(g, kind)
    return bisect_decreasing(f, rate, 1e-9, hi, tol)


def depolarizing_noise_limit(rate: float, tol: float = 1e-12) -> float:
    """Depolarizing probability at which the hashing bound equals ``rate``."""
    if not 0.0 < rate < 1.0:
        raise DomainError("rate must lie in (0, 1)")
    f = lambda p: hashing_bound(PauliChannelParams.depolarizing(p))
    return bisect_decreasing(f, rate, 0.0, 0.75, tol)


def critical_t1(rate: float, gamma: float, mu_t1: float, kind: str = "AD") -> float:
    if not 0 < gamma <= 1 - math.exp(-1) + 1e-15:
        raise DomainError("gamma must lie in (0, 1 - 1/e]")
    return mu_t1 * math.log1p(-gamma) / math.log1p(-noise_limit(rate, kind))


def q_function(x):
    """Gaussian tail probability, 0.5*erfc(x/sqrt(2))."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2)) if np.ndim(x) else 0.5 * float(erfc(x / math.sqrt(2)))


def _outage(gamma: float, gamma_star: float, cv: float) -> float:
    if not 0 < gamma <= 1 - math.exp(-1) + 1e-15:
        raise DomainError("gamma must lie in (0, 1 - 1/e]")
    if cv < 0:
        raise DomainError("coefficient of variation must be non-negative")
    ratio = math.log1p(-gamma) / math.log1p(-gamma_star)
    if cv == 0:
        # static channel: a step at the noise limit
        return 0.0 if gamma < gamma_star else (0.5 if gamma == gamma_star else 1.0)
    num = q_function((ratio - 1) / cv)
    den = 1 - q_function(1 / cv)
    return min(max(1 - num / den, 0.0), 1.0)


def outage_tvad(rate: float, gamma: float, cv: float) -> float:
    """Quantum outage probability of the time-varying AD channel."""
    return _outage(gamma, noise_limit(rate, "AD"), cv)


def hashing_outage(rate: float, gamma: float, cv: float, twirl: str = "CTA") -> float:
    """Hashing outage probability of the twirled time-varying AD channel."""
    kind = {"PTA": "ADPTA", "CTA": "ADCTA"}.get(twirl.upper())
    if kind is None:
        raise ValueError("twirl must be 'PTA' or 'CTA'")
    return _outage(gamma, noise_limit(rate, kind), cv)


def outage(rate: float, gamma: float, cv: float, kind: str = "AD") -> float:
    return _outage(gamma, noise_limit(rate, kind), cv)


def classical_rayleigh_outage(rate: float, snr: float) -> float:
    if snr <= 0:
        raise DomainError("SNR must be positive")
    return -math.expm1(-math.expm1(rate * math.log(2)) / snr)


@dataclass
class OutageCurve:
    rate: float
    cv: float
    kind: str
    points: list[tuple[float, float]] = field(default_factory=list)

    @classmethod
    def compute(cls, rate: float, cv: float, kind: str, gammas: Iterable[float]) -> "OutageCurve":
        pts = [(float(g), outage(rate, g, cv, kind)) for g in gammas]
        return cls(rate, cv, kind, pts)

    def is_monotone(self) -> bool:
        ys = [p for _, p in self.points]
        return all(b >= a - 1e-15 for a, b in zip(ys, ys[1:]))

    def to_csv(self, path, digits: int = 12) -> None:
        write_curve_csv(path, ("gamma", "p_out"), self.points, digits)


def write_curve_csv(path, header: Sequence[str], rows: Iterable[Sequence[float]], digits: int = 12) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.{digits}g}" for v in row])


def _crossing(xs: Sequence[float], ys: Sequence[float], level: float) -> float | None:
    """Abscissa where ``ys`` first crosses ``level``, log-linear interpolation."""
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    for i in range(len(xs) - 1):
        y0, y1 = ys[i], ys[i + 1]
        if y0 == level:
            return float(xs[i])
        if (y0 - level) * (y1 - level) < 0:
            if y0 > 0 and y1 > 0 and xs[i] > 0 and xs[i + 1] > 0:
                lx0, lx1 = math.log(xs[i]), math.log(xs[i + 1])
                ly0, ly1, ll = math.log(y0), math.log(y1), math.log(level)
                return math.exp(lx0 + (ll - ly0) * (lx1 - lx0) / (ly1 - ly0))
            return float(xs[i] + (level - y0) * (xs[i + 1] - xs[i]) / (y1 - y0))
    if ys[-1] == level:
        return float(xs[-1])
    return None


def delta_out(wer_curve, outage_curve, chi: float) -> float | None:
    """Gap in dB between the code's and the outage curve's abscissas at level ``chi``.

    Curves are sequences of (p, value) pairs.  Returns None when either
    curve does not cross ``chi`` in its range.
    """
    wx, wy = zip(*wer_curve)
    ox, oy = zip(*outage_curve)
    p_code = _crossing(wx, wy, chi)
    p_out = _crossing(ox, oy, chi)
    if p_code is None or p_out is None or p_code <= 0 or p_out <= 0:
        return None
    return 10 * math.log10(p_out / p_code)


def outage_monte_carlo(
    rate: float, gamma: float, cv: float, draws: int, rng: np.random.Generator, kind: str = "AD"
) -> float:
    """Fraction of T1 draws (mean 1, truncated at 0) below the critical T1."""
    if cv <= 0:
        raise DomainError("Monte Carlo outage needs cv > 0")
    t_star = critical_t1(rate, gamma, 1.0, kind)
    t1 = TruncGauss(1.0, cv).sample(rng, draws)
    return float(np.count_nonzero(t1 < t_star) / draws)
