"""Plot CSV tables written by the ``qecclab`` CLI.

    python scripts/plot_curves.py out.csv --x param --y wer --group task -o wer.png

matplotlib is needed here only; the library does not import it.
"""

import argparse
import csv
from collections import defaultdict


def read_table(path):
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("tables", nargs="+")
    ap.add_argument("--x", default="param")
    ap.add_argument("--y", default="wer")
    ap.add_argument("--group", default=None, help="column that splits rows into curves")
    ap.add_argument("--err", default=None, help="column with symmetric error bars, e.g. ci_halfwidth")
    ap.add_argument("--logx", action="store_true")
    ap.add_argument("--logy", action="store_true")
    ap.add_argument("-o", "--output", default=None)
    args = ap.parse_args(argv)

    import matplotlib

    if args.output:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    for path in args.tables:
        curves = defaultdict(list)
        for row in read_table(path):
            key = row.get(args.group, path) if args.group else path
            err = float(row[args.err]) if args.err and row.get(args.err) else 0.0
            curves[key].append((float(row[args.x]), float(row[args.y]), err))
        for key, pts in curves.items():
            pts.sort()
            xs, ys, es = zip(*pts)
            ax.errorbar(xs, ys, yerr=es if args.err else None, marker="o", ms=3, label=str(key))
    if args.logx:
        ax.set_xscale("log")
    if args.logy:
        ax.set_yscale("log")
    ax.set_xlabel(args.x)
    ax.set_ylabel(args.y)
    ax.legend(fontsize="small")
    fig.tight_layout()
    if args.output:
        fig.savefig(args.output, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
