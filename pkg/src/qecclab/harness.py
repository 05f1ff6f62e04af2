"""Monte Carlo word-error-rate engine.

Trials run in fixed-size batches.  Batch ``b`` of stream ``s`` draws from
``SeedSequence([seed, s, b])`` and batches are reduced in index order, so a
run stops at the same batch (and gives the same record) whatever the number
of worker processes.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .channels import (
    DomainError,
    PauliChannelParams,
    cta,
    gamma_from_cta,
    pauli_from_alpha,
    pta,
    sample_codes,
    sample_markov_codes,
)
from .decoherence import TruncGauss, TvPreset, get_preset, tv_gamma
from .estimation import SensitivityCurve
from .small_codes import StabilizerCode, batch_outcomes, coset_probabilities, dqmld_classes, error_index, five_qubit_code
from .toric import decode_codes_full

SCHEMA_LINE = "# qecc-lab v1"
DEFAULT_SEED = 20240917
MIN_ERRORS = 100
MAX_TRIALS = 10**8
Z95 = 1.959963984540054


@lru_cache(maxsize=None)
def _five() -> StabilizerCode:
    return five_qubit_code()


@dataclass(frozen=True)
class DecoderTask:
    """``toric`` with distance ``d``, or ``five_qubit`` with ``lookup``/``dqmld``."""

    family: str
    d: int = 0
    decoder: str = "mwpm"

    def __post_init__(self):
        if self.family == "toric":
            if self.d < 2:
                raise DomainError("toric task needs d >= 2")
        elif self.family == "five_qubit":
            if self.decoder not in ("lookup", "dqmld"):
                raise ValueError("five_qubit decoder must be 'lookup' or 'dqmld'")
        else:
            raise ValueError(f"unknown task family {self.family!r}")

    @classmethod
    def toric(cls, d: int) -> "DecoderTask":
        return cls("toric", d, "mwpm")

    @classmethod
    def five_qubit(cls, decoder: str = "lookup") -> "DecoderTask":
        return cls("five_qubit", 0, decoder)

    @property
    def n(self) -> int:
        return 2 * self.d * self.d if self.family == "toric" else 5

    @property
    def batch_size(self) -> int:
        return 2000 if self.family == "toric" else 20000

    def label(self) -> str:
        return f"toric-d{self.d}" if self.family == "toric" else f"five_qubit-{self.decoder}"

    def failures(self, codes: np.ndarray, prior: PauliChannelParams | None) -> tuple[int, int]:
        """(degeneracy-aware, exact-match) failure counts for a batch."""
        if self.family == "toric":
            outcome, mismatch = decode_codes_full(self.d, codes)
            return int(np.count_nonzero(outcome)), int(np.count_nonzero(mismatch))
        deg, exact = batch_outcomes(_five(), codes, self.decoder, prior)
        return int(np.count_nonzero(deg)), int(np.count_nonzero(exact))


@dataclass(frozen=True)
class ChannelSpec:
    """Noise model for one WER point.

    kind ``pauli``: iid Pauli channel ``params``.  kind ``markov``: the same
    marginals with memory ``mu`` along the block.  kind ``tv``: every block
    draws T1 from ``t1_dist`` and uses the twirl of the resulting damping
    (``gamma`` is the nominal damping at the mean T1).
    """

    kind: str
    params: PauliChannelParams | None = None
    mu: float = 0.0
    gamma: float = 0.0
    mu_t1: float = 0.0
    t1_dist: TruncGauss | None = None
    twirl: str = "cta"

    def sample(self, shape: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
        if self.kind == "pauli":
            return sample_codes(self.params, shape, rng)
        if self.kind == "markov":
            return sample_markov_codes(self.params, self.mu, shape, rng)
        if self.kind == "tv":
            g = tv_gamma(self.gamma, self.t1_dist.sample(rng, shape[0]), self.mu_t1)
            probs = np.array([_twirl(x, self.twirl) for x in g])  # (B, 4)
            cdf = np.cumsum(probs[:, :3], axis=1)
            u = rng.random(shape)
            out = (u >= cdf[:, 0:1]).astype(np.uint8)
            out += u >= cdf[:, 1:2]
            out += u >= cdf[:, 2:3]
            return out
        raise ValueError(f"unknown channel kind {self.kind!r}")

    def nominal(self) -> PauliChannelParams:
        """Static channel at the nominal operating point."""
        if self.kind == "tv":
            return PauliChannelParams(*_twirl(self.gamma, self.twirl))
        return self.params

    def is_noiseless(self) -> bool:
        return self.kind != "tv" and self.params.p == 0


def _twirl(gamma: float, twirl: str) -> tuple[float, float, float, float]:
    if twirl == "cta":
        p = cta(float(gamma))
        return (1 - p, p / 3, p / 3, p / 3)
    if twirl == "pta":
        return tuple(pta(float(gamma)).as_array())
    raise ValueError("twirl must be 'cta' or 'pta'")


@dataclass(frozen=True)
class WerRecord:
    task: str
    kind: str
    param: float
    alpha: float = 1.0
    cv: float = 0.0
    preset: str = ""
    mu: float = 0.0
    prior: float | None = None
    trials: int = 0
    word_errors: int = 0
    exact_errors: int = 0
    seed: int = DEFAULT_SEED
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.word_errors <= self.trials or not 0 <= self.exact_errors <= self.trials:
            raise ValueError("error counts must lie in [0, trials]")

    @property
    def wer(self) -> float:
        return self.word_errors / self.trials if self.trials else math.nan

    @property
    def exact_wer(self) -> float:
        return self.exact_errors / self.trials if self.trials else math.nan

    @property
    def ci_halfwidth(self) -> float:
        w = self.wer
        return Z95 * math.sqrt(w * (1 - w) / self.trials) if self.trials else math.nan

    def ci(self) -> tuple[float, float]:
        return self.wer - self.ci_halfwidth, self.wer + self.ci_halfwidth

    def as_dict(self) -> dict:
        out = asdict(self)
        out.update(wer=self.wer, exact_wer=self.exact_wer, ci_halfwidth=self.ci_halfwidth)
        return out


CSV_FIELDS = [f.name for f in fields(WerRecord)] + ["wer", "exact_wer", "ci_halfwidth"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_records(records: Iterable[WerRecord], csv_path: str | Path, jsonl_path: str | Path | None = None) -> None:
    """Append records to a CSV (schema line and header on creation) and its JSONL mirror."""
    csv_path = Path(csv_path)
    records = list(records)
    fresh = not csv_path.exists() or csv_path.stat().st_size == 0
    with open(csv_path, "a", newline="") as fh:
        if fresh:
            fh.write(SCHEMA_LINE + "\n")
        w = csv.writer(fh, lineterminator="\n")
        if fresh:
            w.writerow(CSV_FIELDS)
        for r in records:
            d = r.as_dict()
            w.writerow([_fmt(d[k]) for k in CSV_FIELDS])
    if jsonl_path is None:
        jsonl_path = csv_path.with_suffix(".jsonl")
    with open(jsonl_path, "a") as fh:
        for r in records:
            fh.write(json.dumps(r.as_dict()) + "\n")


def read_records(csv_path: str | Path) -> list[WerRecord]:
    with open(csv_path, newline="") as fh:
        first = fh.readline().strip()
        if first != SCHEMA_LINE:
            raise ValueError(f"missing schema line, found {first!r}")
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        kw = {}
        for f in fields(WerRecord):
            raw = row[f.name]
            if f.type == "int":
                kw[f.name] = int(raw)
            elif f.type == "float":
                kw[f.name] = float(raw)
            elif f.type == "float | None":
                kw[f.name] = float(raw) if raw else None
            else:
                kw[f.name] = raw
        out.append(WerRecord(**kw))
    return out


# -- batch engine -------------------------------------------------------------


def _batch(task: DecoderTask, channel: ChannelSpec, prior, seed: int, stream: int, index: int, size: int):
    rng = np.random.default_rng(np.random.SeedSequence([seed, stream, index]))
    codes = channel.sample((size, task.n), rng)
    return task.failures(codes, prior)


def _batch_star(args):
    return _batch(*args)


def _run(task, channel, prior, seed, stream, min_errors, max_trials, workers) -> tuple[int, int, int]:
    """Deterministic batched loop; returns (trials, word errors, exact errors)."""
    bs = task.batch_size
    trials = deg = exact = 0
    index = 0
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while trials < max_trials and deg < min_errors:
            sizes = []
            left = max_trials - trials
            for k in range(max(workers, 1)):
                if left <= 0:
                    break
                sizes.append(min(bs, left))
                left -= sizes[-1]
            jobs = [(task, channel, prior, seed, stream, index + k, s) for k, s in enumerate(sizes)]
            results = list(pool.map(_batch_star, jobs)) if pool else [_batch(*j) for j in jobs]
            for s, (dg, ex) in zip(sizes, results):
                trials += s
                deg += dg
                exact += ex
                index += 1
                if deg >= min_errors:
                    break
    finally:
        if pool:
            pool.shutdown()
    return trials, deg, exact


def _default_prior(task: DecoderTask, channel: ChannelSpec):
    return channel.nominal() if task.decoder == "dqmld" else None


def run_static_wer(
    task: DecoderTask,
    params: PauliChannelParams,
    seed: int = DEFAULT_SEED,
    min_errors: int = MIN_ERRORS,
    max_trials: int = MAX_TRIALS,
    workers: int = 1,
    mu: float = 0.0,
    prior: PauliChannelParams | None = None,
    stream: int = 0,
) -> WerRecord:
    """WER on a static Pauli channel (Markov memory ``mu`` along the block if > 0).

    ``prior`` overrides the DQMLD decoder's channel model (mismatch runs).
    """
    channel = ChannelSpec("markov", params, mu=mu) if mu > 0 else ChannelSpec("pauli", params)
    if prior is None:
        prior = _default_prior(task, channel)
    kind = "depolarizing" if params.px == params.py == params.pz else "pauli"
    alpha = params.alpha if params.p > 0 else 1.0
    base = WerRecord(
        task.label(), kind, params.p, alpha=alpha, mu=mu,
        prior=prior.p if (prior is not None and task.decoder == "dqmld") else None,
        seed=seed, stream=stream,
    )
    if channel.is_noiseless():
        return replace(base, trials=max_trials)
    trials, deg, exact = _run(task, channel, prior, seed, stream, min_errors, max_trials, workers)
    return replace(base, trials=trials, word_errors=deg, exact_errors=exact)


def _t1_dist(preset: TvPreset | str | None, cv: float | None) -> tuple[TvPreset | None, float, TruncGauss]:
    """T1 law from a preset, optionally with its spread replaced by ``cv``."""
    if isinstance(preset, str):
        preset = get_preset(preset)
    if preset is None:
        if cv is None:
            raise ValueError("give a preset or a coefficient of variation")
        return None, 1.0, TruncGauss(1.0, cv)
    mu = preset.mu_t1
    sigma = preset.sigma_t1 if cv is None else cv * mu
    return preset, mu, TruncGauss(mu, sigma)


def run_tv_wer(
    task: DecoderTask,
    grid: Sequence[float],
    preset: TvPreset | str | None = None,
    cv: float | None = None,
    seed: int = DEFAULT_SEED,
    grid_is_p: bool = True,
    twirl: str = "cta",
    min_errors: int = MIN_ERRORS,
    max_trials: int = MAX_TRIALS,
    workers: int = 1,
) -> list[WerRecord]:
    """WER per grid point over a time-varying amplitude-damping channel.

    Grid points are depolarizing probabilities of the nominal twirled channel
    (``grid_is_p``) or nominal damping values.  Grid point ``k`` uses stream
    ``k + 1`` so each record can be replayed on its own.
    """
    preset_obj, mu_t1, dist = _t1_dist(preset, cv)
    cv_value = dist.sigma / dist.mu
    out = []
    for k, x in enumerate(grid):
        gamma = gamma_from_cta(x) if grid_is_p else float(x)
        channel = ChannelSpec("tv", gamma=gamma, mu_t1=mu_t1, t1_dist=dist, twirl=twirl)
        prior = _default_prior(task, channel)
        trials, deg, exact = _run(task, channel, prior, seed, k + 1, min_errors, max_trials, workers)
        out.append(
            WerRecord(
                task.label(), f"tv-{twirl}", float(x), cv=cv_value,
                preset=preset_obj.name if preset_obj else "", seed=seed, stream=k + 1,
                trials=trials, word_errors=deg, exact_errors=exact,
            )
        )
    return out


# -- mismatch ------------------------------------------------------------------


def exact_mismatch_wer(p_true: float, p_hat: float, alpha: float = 10.0) -> float:
    """Exact five-qubit DQMLD word error rate with prior p_hat and channel p_true."""
    code = _five()
    truth = pauli_from_alpha(p_true, alpha)
    cls = dqmld_classes(code, pauli_from_alpha(max(p_hat, 1e-12), alpha))
    cp = coset_probabilities(code, truth)
    return float(cp.sum() - cp[np.arange(code.n_syndromes), cls].sum())


def mismatch_sweep(
    p_true: float,
    p_hat_grid: Sequence[float],
    alpha: float = 10.0,
    mode: str = "exact",
    seed: int = DEFAULT_SEED,
    min_errors: int = 1000,
    max_trials: int = 10**7,
    workers: int = 1,
) -> SensitivityCurve | list[WerRecord]:
    """WER(p_hat) on the five-qubit DQMLD testbed.

    The channel is the Pauli channel with total probability ``p_true`` and
    ratio ``alpha`` = pz/px; the decoder assumes the same ratio but total
    probability ``p_hat``.  ``mode='exact'`` enumerates, ``mode='mc'`` samples
    with common random numbers (one stream for all grid points).
    """
    grid = sorted(float(x) for x in p_hat_grid)
    if mode == "exact":
        return SensitivityCurve(np.array(grid), np.array([exact_mismatch_wer(p_true, g, alpha) for g in grid]))
    if mode != "mc":
        raise ValueError("mode must be 'exact' or 'mc'")
    task = DecoderTask.five_qubit("dqmld")
    truth = pauli_from_alpha(p_true, alpha)
    return [
        run_static_wer(task, truth, seed, min_errors, max_trials, workers,
                       prior=pauli_from_alpha(max(g, 1e-12), alpha))
        for g in grid
    ]


def records_to_curve(records: Sequence[WerRecord]) -> SensitivityCurve:
    pts = sorted((r.prior, r.wer) for r in records)
    return SensitivityCurve(np.array([p for p, _ in pts]), np.array([w for _, w in pts]))


# -- online estimation runs ----------------------------------------------------


def sample_syndromes(params: PauliChannelParams, blocks: int, seed: int = DEFAULT_SEED, stream: int = 0) -> np.ndarray:
    """Syndrome indices of ``blocks`` five-qubit blocks through ``params``."""
    code = _five()
    rng = np.random.default_rng(np.random.SeedSequence([seed, stream, 0]))
    codes = sample_codes(params, (blocks, code.n), rng)
    return code.table.syn[error_index(codes)]
