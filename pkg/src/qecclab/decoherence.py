"""Stochastic T1 (and optional T_phi) fluctuation models.

Per-block draws use a normal distribution truncated to ``[0, inf)``.  Time
series add two Lorentzian (first-order autoregressive) processes and white
noise to the mean.  Units: times in microseconds, frequencies in Hz except
the presets' ``inv_tau0*`` fields which are in micro-hertz as tabulated.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.special import ndtr

from .channels import DomainError, t2_from_tphi

# h0 is read as a one-sided PSD level; a discrete white sequence sampled at
# fs then has variance h0 * fs / 2.
WHITE_NOISE_SIDEDNESS = 0.5


@dataclass(frozen=True)
class TvPreset:
    name: str
    mu_t1: float
    sigma_t1: float
    h0: float
    A1: float
    inv_tau01: float
    A2: float
    inv_tau02: float
    mu_tphi: float | None = None
    sigma_tphi: float | None = None

    def __post_init__(self):
        for f in ("mu_t1", "sigma_t1", "h0", "A1", "inv_tau01", "A2", "inv_tau02"):
            if not getattr(self, f) > 0:
                raise DomainError(f"preset {self.name}: {f} must be positive")
        if not 0 < self.cv < 1:
            raise DomainError(f"preset {self.name}: coefficient of variation outside (0, 1)")
        if (self.mu_tphi is None) != (self.sigma_tphi is None):
            raise DomainError("mu_tphi and sigma_tphi must be given together")

    @property
    def cv(self) -> float:
        return self.sigma_t1 / self.mu_t1

    @property
    def tau01(self) -> float:
        """Lorentzian timescale in seconds."""
        return 1e6 / self.inv_tau01

    @property
    def tau02(self) -> float:
        return 1e6 / self.inv_tau02

    def t1_dist(self) -> "TruncGauss":
        return TruncGauss(self.mu_t1, self.sigma_t1)

    def with_cv(self, cv: float) -> "TvPreset":
        return TvPreset(**{**asdict(self), "sigma_t1": cv * self.mu_t1, "name": f"{self.name}@cv={cv}"})


_BUILTIN = (
    TvPreset("QA_C5", 44.49, 11.7, 2e-3, 5.2, 142.9, 2.6, 83.3),
    TvPreset("QB_C5", 81.63, 17.01, 1.4e-2, 3.2, 1000.0, 6.6, 90.9),
    TvPreset("QA_C6", 46.64, 10.24, 1.2e-3, 4.5, 333.3, 1.8, 71.4),
    TvPreset("QB_C6", 71.22, 14.31, 5.7e-3, 4.2, 1111.1, 2.2, 76.9),
)


def builtin_presets() -> list[TvPreset]:
    return list(_BUILTIN)


def get_preset(name: str, extra: Iterable[TvPreset] = ()) -> TvPreset:
    for p in (*extra, *_BUILTIN):
        if p.name == name:
            return p
    raise KeyError(f"unknown preset {name!r}")


def load_presets(path: str | Path) -> list[TvPreset]:
    records = json.loads(Path(path).read_text())
    names = {f.name for f in fields(TvPreset)}
    out = []
    for rec in records:
        unknown = set(rec) - names
        if unknown:
            raise ValueError(f"unknown preset fields: {sorted(unknown)}")
        out.append(TvPreset(**rec))
    return out


def dump_presets(presets: Iterable[TvPreset], path: str | Path | None = None) -> str:
    text = json.dumps([asdict(p) for p in presets], indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


@dataclass(frozen=True)
class TruncGauss:
    """Normal(mu, sigma^2) truncated to [lower, upper]."""

    mu: float
    sigma: float
    lower: float = 0.0
    upper: float = math.inf

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError("sigma must be non-negative")
        if not self.lower < self.upper:
            raise DomainError("empty truncation interval")

    def _ab(self):
        return (self.lower - self.mu) / self.sigma, (self.upper - self.mu) / self.sigma

    @property
    def mass(self) -> float:
        """Probability the parent normal falls inside the interval."""
        if self.sigma == 0:
            return 1.0
        a, b = self._ab()
        return float(ndtr(b) - ndtr(a))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.sigma == 0:
            raise DomainError("degenerate distribution has no density")
        z = (x - self.mu) / self.sigma
        dens = np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi) * self.mass)
        return np.where((x >= self.lower) & (x <= self.upper), dens, 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.sigma == 0:
            return np.where(x >= self.mu, 1.0, 0.0)
        a, _ = self._ab()
        raw = (ndtr((x - self.mu) / self.sigma) - ndtr(a)) / self.mass
        return np.clip(raw, 0.0, 1.0)

    def mean(self) -> float:
        if self.sigma == 0:
            return self.mu
        a, b = self._ab()
        phi = lambda z: 0.0 if math.isinf(z) else math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
        return self.mu + self.sigma * (phi(a) - phi(b)) / self.mass

    def variance(self) -> float:
        if self.sigma == 0:
            return 0.0
        a, b = self._ab()
        phi = lambda z: 0.0 if math.isinf(z) else math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
        za = 0.0 if math.isinf(a) else a * phi(a)
        zb = 0.0 if math.isinf(b) else b * phi(b)
        m = (phi(a) - phi(b)) / self.mass
        return self.sigma**2 * (1 + (za - zb) / self.mass - m * m)

    def sample(self, rng: np.random.Generator, size=None):
        """Rejection sampling from the parent normal."""
        if self.sigma == 0:
            return self.mu if size is None else np.full(size, float(self.mu))
        if self.mass < 1e-3:
            raise DomainError("truncation keeps too little mass for rejection sampling")
        count = 1 if size is None else int(np.prod(size))
        out = np.empty(count)
        filled = 0
        while filled < count:
            need = count - filled
            draw = rng.normal(self.mu, self.sigma, size=int(need / self.mass) + 8)
            ok = draw[(draw >= self.lower) & (draw <= self.upper)][:need]
            out[filled:filled + ok.size] = ok
            filled += ok.size
        return float(out[0]) if size is None else out.reshape(size)


def sample_t1(dist: TruncGauss, rng: np.random.Generator, size=None):
    return dist.sample(rng, size)


def sample_t2(preset: TvPreset, t1, rng: np.random.Generator):
    """T2 draws for the given T1 draws; T1-limited unless T_phi is set."""
    t1 = np.asarray(t1, dtype=float)
    if preset.mu_tphi is None:
        return 2 * t1
    tphi = TruncGauss(preset.mu_tphi, preset.sigma_tphi).sample(rng, t1.shape or None)
    return np.vectorize(t2_from_tphi)(t1, tphi)


def tv_gamma(gamma_nominal, t1, mu_t1: float):
    """Damping of a block whose relaxation time is ``t1``.

    The algorithm time is fixed so that the mean relaxation time gives
    ``gamma_nominal``; the realised damping is 1 - (1-gamma)^(mu/T1).
    """
    t1 = np.asarray(t1, dtype=float)
    log_keep = np.log1p(-np.asarray(gamma_nominal, dtype=float))
    g = -np.expm1(log_keep * mu_t1 / t1)
    return np.clip(g, np.finfo(float).tiny, np.nextafter(1.0, 0.0))


def _check_nominal(gamma_nominal: float) -> None:
    if not 0 < gamma_nominal <= 1 - math.exp(-1) + 1e-15:
        raise DomainError("gamma must lie in (0, 1 - 1/e]")


def tv_gamma_draw(gamma_nominal: float, mu_t1: float, dist: TruncGauss, rng: np.random.Generator, size=None):
    """Draw per-block damping probabilities around ``gamma_nominal``."""
    _check_nominal(gamma_nominal)
    t1 = dist.sample(rng, size)
    g = tv_gamma(gamma_nominal, t1, mu_t1)
    return float(g) if size is None else g


def lorentzian_series(A: float, tau0: float, fs: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stationary AR(1) sequence with Lorentzian spectrum.

    Pole ``exp(-dt/tau0)``, variance ``2*A**2``; started in the stationary
    distribution.
    """
    if A == 0:
        return np.zeros(n)
    from scipy.signal import lfilter

    a = math.exp(-1.0 / (fs * tau0))
    var = 2 * A * A
    drive = rng.normal(0.0, math.sqrt(var * (1 - a * a)), n)
    drive[0] = rng.normal(0.0, math.sqrt(var))
    return lfilter([1.0], [1.0, -a], drive)


def simulate_t1_series(preset: TvPreset, fs: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sampled T1(t) in microseconds at rate ``fs`` (Hz)."""
    if not fs > 0 or n <= 0:
        raise DomainError("fs and n must be positive")
    bw = max(preset.inv_tau01, preset.inv_tau02) * 1e-6
    if fs <= 2 * bw:
        raise DomainError(f"fs={fs} Hz does not exceed twice the bandwidth {bw} Hz")
    out = np.full(n, float(preset.mu_t1))
    out += lorentzian_series(preset.A1, preset.tau01, fs, n, rng)
    out += lorentzian_series(preset.A2, preset.tau02, fs, n, rng)
    if preset.h0 > 0:
        out += rng.normal(0.0, math.sqrt(preset.h0 * fs * WHITE_NOISE_SIDEDNESS), n)
    return out


def lorentzian_psd(f, A: float, tau0: float):
    f = np.asarray(f, dtype=float)
    return 4 * A * A * tau0 / (1 + (2 * math.pi * f * tau0) ** 2)


def psd_sigma(preset: TvPreset, bandwidth: float | None = None) -> float:
    """Standard deviation implied by integrating the Lorentzian spectra.

    With ``bandwidth=None`` the full integral (2*A1^2 + 2*A2^2) is used;
    otherwise the integral over [-bandwidth, bandwidth] Hz, white noise
    included.  Diagnostic only; block draws use ``sigma_t1``.
    """
    if bandwidth is None:
        return math.sqrt(2 * preset.A1**2 + 2 * preset.A2**2)
    var = 0.0
    for A, tau in ((preset.A1, preset.tau01), (preset.A2, preset.tau02)):
        var += 4 * A * A / math.pi * math.atan(2 * math.pi * bandwidth * tau)
    var += preset.h0 * WHITE_NOISE_SIDEDNESS * 2 * bandwidth
    return math.sqrt(var)


def periodogram_at_zero(x: np.ndarray, fs: float, segment: int) -> float:
    """Averaged two-sided periodogram at f=0 (units of x^2 per Hz)."""
    x = np.asarray(x, dtype=float)
    nseg = x.size // segment
    if nseg == 0:
        raise ValueError("series shorter than one segment")
    segs = x[: nseg * segment].reshape(nseg, segment)
    segs = segs - x.mean()
    sums = segs.sum(axis=1)
    return float(np.mean(sums**2) / (segment * fs))
