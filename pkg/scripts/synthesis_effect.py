"""How much receptor synthesis (null -> R) changes the deterministic G-protein cycle.

Integrates the full network and the synthesis-free program and prints the
largest relative gap per species, plus the values at a few checkpoints.
"""

import argparse

import numpy as np

from hln.models import gprotein_hln, gprotein_network
from hln.ode import OdeConfig, build_ode, integrate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=600.0)
    ap.add_argument("--csv", help="write both trajectories side by side")
    args = ap.parse_args()

    cfg = OdeConfig(args.t_end, 601)
    full, bare = gprotein_network(), gprotein_hln()
    a = integrate(build_ode(full.network), full.initial.counts, cfg)
    b = integrate(build_ode(bare.network), bare.initial.counts, cfg)

    print(f"{'species':>8} {'max rel gap':>12} {'at t':>8} {'with':>12} {'without':>12}")
    for name in a.species:
        rel = np.abs(a[name] - b[name]) / np.maximum(np.abs(a[name]), 1.0)
        k = int(np.argmax(rel))
        print(f"{name:>8} {rel[k]:12.4f} {a.times[k]:8g} {a[name][k]:12.1f} {b[name][k]:12.1f}")

    if args.csv:
        cols = [f"{s}_{tag}" for s in a.species for tag in ("with", "without")]
        rows = [",".join(["time", *cols])]
        for k, t in enumerate(a.times):
            cells = [repr(float(t))]
            for name in a.species:
                cells += [repr(float(a[name][k])), repr(float(b[name][k]))]
            rows.append(",".join(cells))
        with open(args.csv, "w") as fh:
            fh.write("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
