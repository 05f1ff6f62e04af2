"""Command-line front end: ``qecclab <subcommand> [options]``.

Every subcommand writes a table (CSV with a schema line, or JSON) to
``--out`` or stdout and prints a one-line summary.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import channels, decoherence, distances, estimation, harness, interleavers, limits
from .channels import DomainError, PauliChannelParams, pauli_from_alpha
from .harness import SCHEMA_LINE

KIND_NAMES = {"ad": "AD", "adpta": "ADPTA", "adcta": "ADCTA"}


def _floats(text: str) -> list[float]:
    """Comma list ``a,b,c`` or range ``start:stop:count`` (inclusive)."""
    if ":" in text:
        a, b, n = text.split(":")
        return [float(x) for x in np.linspace(float(a), float(b), int(n))]
    return [float(x) for x in text.split(",") if x]


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("QECCLAB_SEED")
    return int(env) if env else harness.DEFAULT_SEED


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def emit(rows: list[dict], args: argparse.Namespace) -> None:
    rows = [{k: _plain(v) for k, v in r.items()} for r in rows]
    if args.format == "json":
        text = json.dumps(rows, indent=1) + "\n"
    else:
        buf = io.StringIO()
        buf.write(SCHEMA_LINE + "\n")
        if rows:
            w = csv.writer(buf, lineterminator="\n")
            cols = list(rows[0])
            w.writerow(cols)
            for r in rows:
                w.writerow([_cell(r.get(c)) for c in cols])
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([args.seed, 0]))


# -- subcommands ---------------------------------------------------------------


def cmd_capacity(args) -> str:
    gammas = _floats(args.grid)
    rows = []
    for g in gammas:
        if args.kind == "pd":
            c = limits.capacity_pd(g)
        elif args.kind == "hashing":
            c = limits.hashing_bound(PauliChannelParams.depolarizing(g))
        else:
            c = limits.capacity(g, KIND_NAMES[args.kind])
        rows.append({"gamma": g, "capacity": c})
    emit(rows, args)
    if args.rq is not None:
        if args.kind == "pd":
            raise DomainError("no noise limit is defined here for the dephasing channel")
        if args.kind == "hashing":
            return f"p*(R={args.rq}) = {limits.depolarizing_noise_limit(args.rq):.6f}"
        return f"gamma*_{KIND_NAMES[args.kind]}(R={args.rq}) = {limits.noise_limit(args.rq, KIND_NAMES[args.kind]):.6f}"
    return f"{len(rows)} capacity points for {args.kind}"


def cmd_noise_limit(args) -> str:
    rows = [{"kind": k, "rate": args.rq, "gamma_star": limits.noise_limit(args.rq, k)} for k in limits.KINDS]
    rows.append({"kind": "depolarizing", "rate": args.rq, "gamma_star": limits.depolarizing_noise_limit(args.rq)})
    emit(rows, args)
    return ", ".join(f"{r['kind']}={r['gamma_star']:.4f}" for r in rows)


def cmd_outage(args) -> str:
    kind = KIND_NAMES[args.kind]
    gammas = _floats(args.gamma)
    rng = _rng(args)
    rows = []
    for g in gammas:
        row = {"gamma": g, "p_out": limits.outage(args.rq, g, args.cv, kind)}
        if args.oracle_draws and args.cv > 0:
            row["p_out_mc"] = limits.outage_monte_carlo(args.rq, g, args.cv, args.oracle_draws, rng, kind)
        rows.append(row)
    emit(rows, args)
    return f"outage {kind} R={args.rq} cv={args.cv}: max p_out {max(r['p_out'] for r in rows):.6g} over {len(rows)} points"


def cmd_diamond(args) -> str:
    if args.rounds:
        preset, mu_t1, dist = harness._t1_dist(args.preset, args.cv)
        mean, samples = distances.mean_diamond_tv(args.gamma1, mu_t1, dist, KIND_NAMES[args.kind], args.rounds, _rng(args))
        box = distances.adjusted_boxplot(samples)
        row = {"kind": KIND_NAMES[args.kind], "gamma": args.gamma1, "rounds": args.rounds, "mean": mean}
        row.update({k: v for k, v in box.__dict__.items() if k != "outliers"})
        row["n_outliers"] = len(box.outliers)
        emit([row], args)
        return f"mean diamond distance {mean:.6g} over {args.rounds} rounds"
    if args.gamma2 is None:
        raise DomainError("pairwise mode needs --gamma2")
    g1, g2 = args.gamma1, args.gamma2
    rows = [
        {"kind": "AD", "distance": distances.diamond_ad(g1, g2)},
        {"kind": "ADPTA", "distance": distances.diamond_pauli(channels.pta(g1), channels.pta(g2))},
        {"kind": "ADCTA", "distance": distances.diamond_pauli(channels.cta_params(g1), channels.cta_params(g2))},
        {"kind": "ADPTA-closed", "distance": distances.diamond_ad_twirled(g1, g2)},
    ]
    emit(rows, args)
    return f"diamond distances for gamma=({g1}, {g2}): AD {rows[0]['distance']:.6g}"


def cmd_stochastic(args) -> str:
    preset = decoherence.get_preset(args.preset)
    rng = _rng(args)
    if args.draws:
        t1 = decoherence.sample_t1(preset.t1_dist(), rng, args.draws)
        rows = [{"preset": preset.name, "draws": args.draws, "mean": float(t1.mean()), "std": float(t1.std(ddof=1))}]
        emit(rows, args)
        return f"{preset.name}: {args.draws} T1 draws, mean {rows[0]['mean']:.4f} us"
    x = decoherence.simulate_t1_series(preset, args.fs, args.n, rng)
    rows = [{"preset": preset.name, "fs": args.fs, "n": args.n, "mean": float(x.mean()), "std": float(x.std(ddof=1))}]
    emit(rows, args)
    return f"{preset.name}: T1 series of {args.n} samples, std {rows[0]['std']:.4f} us"


def _records(recs, args) -> None:
    emit([r.as_dict() for r in recs], args)


def _wer_summary(recs) -> str:
    return "; ".join(f"{r.param:g}: WER {r.wer:.4g} ({r.word_errors}/{r.trials})" for r in recs)


def _run_grid(task, args, make_params) -> list:
    grid = _floats(args.p)
    if args.preset or args.cv is not None:
        return harness.run_tv_wer(
            task, grid, preset=args.preset, cv=args.cv, seed=args.seed, twirl=args.twirl,
            min_errors=args.min_errors, max_trials=args.max_trials, workers=args.workers,
        )
    return [
        harness.run_static_wer(task, make_params(p), args.seed, args.min_errors, args.max_trials,
                               args.workers, mu=args.mu, stream=k)
        for k, p in enumerate(grid)
    ]


def cmd_toric_wer(args) -> str:
    recs = _run_grid(harness.DecoderTask.toric(args.d), args, PauliChannelParams.depolarizing)
    _records(recs, args)
    return f"toric d={args.d}: " + _wer_summary(recs)


def cmd_fivequbit_wer(args) -> str:
    task = harness.DecoderTask.five_qubit(args.decoder)
    recs = _run_grid(task, args, lambda p: pauli_from_alpha(p, args.alpha))
    _records(recs, args)
    return f"five-qubit {args.decoder}: " + _wer_summary(recs)


def cmd_mismatch(args) -> str:
    grid = _floats(args.grid)
    if args.mode == "exact":
        curve = harness.mismatch_sweep(args.p_true, grid, args.alpha, "exact")
        rows = [{"p_hat": x, "wer": y} for x, y in zip(curve.p_hat, curve.wer)]
        emit(rows, args)
        best = curve.p_hat[int(np.argmin(curve.wer))]
    else:
        recs = harness.mismatch_sweep(args.p_true, grid, args.alpha, "mc", args.seed,
                                      args.min_errors, args.max_trials, args.workers)
        _records(recs, args)
        best = min(recs, key=lambda r: r.wer).prior
    return f"mismatch p_true={args.p_true} alpha={args.alpha}: lowest WER at p_hat={best:g}"


def _build_interleaver(args) -> interleavers.Permutation:
    if args.load:
        return interleavers.Permutation.from_file(args.load)
    if args.n is None:
        raise DomainError("--n is required unless --load is given")
    if args.kind == "welch-costas":
        if args.alpha is None:
            raise DomainError("welch-costas needs --alpha")
        return interleavers.welch_costas(args.n, args.alpha)
    if args.kind == "jpl":
        return interleavers.jpl(args.n, args.k1)
    if args.kind == "s-random":
        return interleavers.s_random(args.n, args.s, _rng(args))
    if args.kind == "random":
        return interleavers.random_interleaver(args.n, _rng(args))
    return interleavers.identity_interleaver(args.n)


def cmd_interleaver(args) -> str:
    perm = _build_interleaver(args)
    if args.emit:
        perm.to_file(args.emit)
    row = {"kind": args.kind if not args.load else "file", "N": perm.N}
    if args.metrics:
        row["spread"] = interleavers.spread(perm)
        row["dispersion"] = interleavers.dispersion(perm)
    emit([row], args)
    parts = [f"{row['kind']} N={perm.N}"]
    if args.metrics:
        parts.append(f"spread {row['spread']}, dispersion {row['dispersion']:.6g}")
    return ": ".join(parts)


def cmd_estimate(args) -> str:
    if args.mode == "fisher":
        rows = [
            {"probe": pr, "p": args.p, "N": args.n_probes, "fisher": estimation.fisher(args.p, pr),
             "cramer_rao_var": estimation.cramer_rao_var(args.p, pr, args.n_probes)}
            for pr in estimation.PROBES
        ]
        emit(rows, args)
        return f"J1(p={args.p}): pure {rows[0]['fisher']:.6g}, epr {rows[1]['fisher']:.6g}"
    if args.mode == "averaged-wer":
        if not args.curve:
            raise DomainError("averaged-wer needs --curve")
        curve = estimation.SensitivityCurve.from_csv(args.curve)
        rows = [{"probe": args.probe, "p": args.p, "N": n,
                 "wer": estimation.averaged_wer(curve, args.p, args.probe, n)} for n in _int_list(args.n_list)]
        emit(rows, args)
        return f"averaged WER at p={args.p}: " + ", ".join(f"N={r['N']}: {r['wer']:.6g}" for r in rows)
    return _online(args)


def _int_list(text: str) -> list[int]:
    return [int(float(x)) for x in text.split(",") if x]


def _online(args) -> str:
    code = harness._five()
    kind = args.channel_kind
    truth = pauli_from_alpha(args.p, args.alpha) if kind == "pauli" else PauliChannelParams.depolarizing(args.p)
    init = estimation.default_init(code, kind) if args.init is None else args.init
    syn = harness.sample_syndromes(truth, args.blocks, args.seed)
    rows = []
    if args.window:
        nwin = args.blocks // args.window
        for w in range(nwin):
            res = estimation.online_decode_pooled(code, syn[w * args.window:(w + 1) * args.window], init, kind)
            est = np.atleast_1d(res.final)
            row = {"window": w, "p_hat": float(est.sum()) if kind == "pauli" else float(est[0])}
            if kind == "pauli":
                a = estimation.AsymEstimate(*est)
                row.update(px=a.px, py=a.py, pz=a.pz, alpha=a.alpha)
            rows.append(row)
    else:
        table = estimation.online_fixed_points(code, init, kind)
        finals = table[syn]
        p_hat = finals.sum(axis=1) if kind == "pauli" else finals
        rows = [{"blocks": args.blocks, "mean_p_hat": float(p_hat.mean()),
                 "std_error": float(p_hat.std(ddof=1) / math.sqrt(args.blocks)),
                 "oracle_mean": float(np.sum(estimation.online_expectation(code, truth, table)))}]
    emit(rows, args)
    if args.window:
        return f"{len(rows)} pooled windows, mean p_hat {np.mean([r['p_hat'] for r in rows]):.6g}"
    return f"mean final p_hat {rows[0]['mean_p_hat']:.6g} (oracle {rows[0]['oracle_mean']:.6g})"


def cmd_presets(args) -> str:
    presets = decoherence.load_presets(args.file) if args.file else decoherence.builtin_presets()
    rows = [
        {"name": p.name, "mu_t1": p.mu_t1, "sigma_t1": p.sigma_t1, "cv": p.cv, "h0": p.h0,
         "A1": p.A1, "inv_tau01": p.inv_tau01, "A2": p.A2, "inv_tau02": p.inv_tau02}
        for p in presets
    ]
    emit(rows, args)
    return f"{len(rows)} presets"


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = argparse.ArgumentParser(prog="qecclab", description="Quantum channel and QECC analysis workbench")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = add("capacity", cmd_capacity, "capacity and hashing curves")
    sp.add_argument("--kind", choices=("ad", "pd", "adpta", "adcta", "hashing"), default="ad")
    sp.add_argument("--rq", type=float, default=None)
    sp.add_argument("--grid", default="0.01:0.49:49")

    sp = add("noise-limit", cmd_noise_limit, "noise limits at a rate")
    sp.add_argument("--rq", type=float, required=True)

    sp = add("outage", cmd_outage, "quantum outage probability")
    sp.add_argument("--rq", type=float, required=True)
    sp.add_argument("--cv", type=float, required=True)
    sp.add_argument("--kind", choices=tuple(KIND_NAMES), default="ad")
    sp.add_argument("--gamma", default="0.05:0.6:12")
    sp.add_argument("--oracle-draws", type=int, default=0)

    sp = add("diamond", cmd_diamond, "diamond-norm distances")
    sp.add_argument("--kind", choices=tuple(KIND_NAMES), default="ad")
    sp.add_argument("--gamma1", type=float, required=True)
    sp.add_argument("--gamma2", type=float, default=None)
    sp.add_argument("--rounds", type=int, default=0)
    sp.add_argument("--preset", default=None)
    sp.add_argument("--cv", type=float, default=None)

    sp = add("stochastic", cmd_stochastic, "T1 fluctuation series and draws")
    sp.add_argument("--preset", default="QA_C5")
    sp.add_argument("--fs", type=float, default=1e4)
    sp.add_argument("--n", type=int, default=10**5)
    sp.add_argument("--draws", type=int, default=0)

    for name, fn in (("toric-wer", cmd_toric_wer), ("fivequbit-wer", cmd_fivequbit_wer)):
        sp = add(name, fn, "Monte Carlo word error rate")
        if name == "toric-wer":
            sp.add_argument("--d", type=int, default=3)
        else:
            sp.add_argument("--decoder", choices=("lookup", "dqmld"), default="lookup")
            sp.add_argument("--alpha", type=float, default=1.0)
        sp.add_argument("--p", default="0.05")
        sp.add_argument("--mu", type=float, default=0.0)
        sp.add_argument("--preset", default=None)
        sp.add_argument("--cv", type=float, default=None)
        sp.add_argument("--twirl", choices=("cta", "pta"), default="cta")
        sp.add_argument("--min-errors", type=int, default=harness.MIN_ERRORS)
        sp.add_argument("--max-trials", type=int, default=harness.MAX_TRIALS)

    sp = add("mismatch", cmd_mismatch, "WER versus decoder channel estimate")
    sp.add_argument("--p-true", type=float, default=0.1)
    sp.add_argument("--alpha", type=float, default=10.0)
    sp.add_argument("--grid", default="0.01,0.05,0.09,0.1,0.11,0.2,0.3")
    sp.add_argument("--mode", choices=("exact", "mc"), default="exact")
    sp.add_argument("--min-errors", type=int, default=1000)
    sp.add_argument("--max-trials", type=int, default=10**7)

    sp = add("interleaver", cmd_interleaver, "build, measure and emit interleavers")
    sp.add_argument("--kind", choices=("welch-costas", "jpl", "s-random", "random", "identity"), default="random")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--alpha", type=int, default=None)
    sp.add_argument("--s", type=int, default=25)
    sp.add_argument("--k1", type=int, default=8)
    sp.add_argument("--metrics", action="store_true")
    sp.add_argument("--emit", default=None)
    sp.add_argument("--load", default=None)

    sp = add("estimate", cmd_estimate, "Fisher information, averaged WER, online estimation")
    sp.add_argument("--mode", choices=("fisher", "averaged-wer", "online"), default="fisher")
    sp.add_argument("--p", type=float, default=0.05)
    sp.add_argument("--probe", choices=estimation.PROBES, default="epr")
    sp.add_argument("--n-probes", type=int, default=1000)
    sp.add_argument("--n-list", default="10,100,1000,10000")
    sp.add_argument("--curve", default=None)
    sp.add_argument("--channel-kind", choices=("depolarizing", "pauli"), default="depolarizing")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--init", type=float, default=None)
    sp.add_argument("--blocks", type=int, default=10**4)
    sp.add_argument("--window", type=int, default=0)

    sp = add("presets", cmd_presets, "list decoherence presets")
    sp.add_argument("--file", default=None)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    args.seed = resolve_seed(args.seed)
    if args.workers < 1:
        parser.error("--workers must be at least 1")
    try:
        summary = args.func(args)
    except (DomainError, interleavers.InterleaverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    # keep stdout parseable when the table itself goes there
    print(summary, file=sys.stderr if args.out is None else sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
