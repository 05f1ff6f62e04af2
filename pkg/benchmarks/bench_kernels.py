"""Compare the compiled and pure-Python toric decoding kernels.

    python3 benchmarks/bench_kernels.py [--trials 2000] [--p 0.05]

Both backends decode the same error batch; the outcome arrays must match.
"""

import argparse
import time

import numpy as np

from qecclab._kernels import _pykernels
from qecclab.channels import PauliChannelParams, sample_codes

try:
    from qecclab._kernels import _ckernels
except ImportError:
    _ckernels = None


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--p", type=float, default=0.05)
    ap.add_argument("--distances", default="3,5,7")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernel not built; only the fallback is available")
    rng = np.random.default_rng(args.seed)
    params = PauliChannelParams.depolarizing(args.p)
    print(f"{'d':>3} {'python s':>10} {'cython s':>10} {'speedup':>8}  identical")
    for d in (int(x) for x in args.distances.split(",")):
        codes = sample_codes(params, (args.trials, 2 * d * d), rng)
        ref, t_py = timed(_pykernels.decode_toric_batch, codes, d)
        if _ckernels is None:
            print(f"{d:>3} {t_py:>10.3f} {'-':>10} {'-':>8}  -")
            continue
        fast, t_c = timed(_ckernels.decode_toric_batch, codes, d)
        print(f"{d:>3} {t_py:>10.3f} {t_c:>10.4f} {t_py / t_c:>8.1f}  {np.array_equal(ref, fast)}")


if __name__ == "__main__":
    main()
