"""Closed-form diamond-norm distances and adjusted boxplot statistics."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .channels import DomainError, PauliChannelParams, cta, cta_params, pta
from .decoherence import TruncGauss, tv_gamma

DIAMOND_KINDS = ("AD", "ADPTA", "ADCTA")


def diamond_pauli(a: PauliChannelParams, b: PauliChannelParams) -> float:
    return float(np.abs(a.as_array() - b.as_array()).sum())


def diamond_ad(g1: float, g2: float) -> float:
    s1, s2 = math.sqrt(1 - g1), math.sqrt(1 - g2)
    if s1 + s2 > 1:
        return 2 * abs(g1 - g2)
    return 2 * abs(s1 - s2) / (2 - (s1 + s2))


def diamond_pd(l1: float, l2: float) -> float:
    return abs(math.sqrt(1 - l1) - math.sqrt(1 - l2))


def twirled_nonidentity_part(g1: float, g2: float) -> float:
    """Non-identity contribution |g1-g2|/4 + |sqrt(1-g2)-sqrt(1-g1)|/2.

    Shared by the Pauli and Clifford twirls of two AD channels.
    """
    return 0.25 * abs(g1 - g2) + 0.5 * abs(math.sqrt(1 - g2) - math.sqrt(1 - g1))


def diamond_ad_twirled(g1: float, g2: float) -> float:
    """Diamond distance between the twirls (PTA or CTA, identical) of two AD channels.

    The identity probabilities move by exactly the non-identity total, so
    the full distance is twice the non-identity part.
    """
    return 2 * twirled_nonidentity_part(g1, g2)


def discrimination_error(distance: float) -> float:
    """Minimum error probability when telling two channels apart."""
    return 0.5 - distance / 4


def _distance(kind: str, g_static: float, g: float) -> float:
    if kind == "AD":
        return diamond_ad(g_static, g)
    if kind == "ADPTA":
        return diamond_pauli(pta(g_static), pta(g))
    if kind == "ADCTA":
        return diamond_pauli(cta_params(g_static), cta_params(g))
    raise ValueError(f"unknown kind {kind!r}")


def _kahan_sum(values: Sequence[float]) -> float:
    return math.fsum(values)


def mean_diamond_tv(
    gamma_nominal: float,
    mu_t1: float,
    dist: TruncGauss,
    kind: str,
    L: int,
    rng: np.random.Generator,
) -> tuple[float, np.ndarray]:
    """Average distance between the static channel and L time-varying draws."""
    if L < 1:
        raise DomainError("need at least one round")
    if not 0 < gamma_nominal < 1:
        raise DomainError("gamma must lie in (0, 1)")
    t1 = dist.sample(rng, L)
    gammas = tv_gamma(gamma_nominal, t1, mu_t1)
    samples = np.array([_distance(kind, gamma_nominal, float(g)) for g in gammas])
    return _kahan_sum(samples) / L, samples


# -- adjusted boxplots --------------------------------------------------------


def quantile7(sorted_x: np.ndarray, q: float) -> float:
    """Linear interpolation of order statistics (numpy's default method)."""
    return float(np.quantile(sorted_x, q, method="linear"))


def medcouple(samples: Sequence[float]) -> float:
    """Medcouple via the O(n^2) pairwise kernel."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 4:
        raise DomainError("medcouple needs at least 4 samples")
    med = float(np.median(x))
    z = x - med
    upper = z[z >= 0][::-1]  # descending, largest first
    lower = z[z <= 0][::-1]  # descending, zeros first
    n_up, n_lo = upper.size, lower.size
    h = np.empty((n_up, n_lo))
    for i in range(n_up):
        zi = upper[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            h[i] = (zi + lower) / (zi - lower)
    k = int(np.count_nonzero(z == 0))
    if k:
        # both at the median: sign(k - 1 - i - j) over the tied block
        iu = np.arange(n_up - k, n_up)  # zeros sit at the end of ``upper``
        jl = np.arange(k)  # and at the start of ``lower``
        ii, jj = np.meshgrid(iu - (n_up - k), jl, indexing="ij")
        h[np.ix_(iu, jl)] = np.sign(k - 1 - ii - jj)
    return float(np.median(h))


@dataclass
class BoxplotSummary:
    Q1: float
    Q3: float
    median: float
    MC: float
    lower_whisker: float
    upper_whisker: float
    outliers: list[float]

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def whisker_bounds(q1: float, q3: float, mc: float) -> tuple[float, float]:
    iqr = q3 - q1
    if mc >= 0:
        return q1 - 1.5 * math.exp(-4 * mc) * iqr, q3 + 1.5 * math.exp(3 * mc) * iqr
    return q1 - 1.5 * math.exp(-3 * mc) * iqr, q3 + 1.5 * math.exp(4 * mc) * iqr


def adjusted_boxplot(samples: Sequence[float]) -> BoxplotSummary:
    x = np.sort(np.asarray(samples, dtype=float))
    q1, q3 = quantile7(x, 0.25), quantile7(x, 0.75)
    mc = medcouple(x)
    lo, hi = whisker_bounds(q1, q3, mc)
    outliers = [float(v) for v in x if v < lo or v > hi]
    return BoxplotSummary(q1, q3, float(np.median(x)), mc, lo, hi, outliers)
