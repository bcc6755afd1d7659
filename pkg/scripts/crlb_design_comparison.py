"""Rooted CRLB of ITS, ITS-color and SGS under matched edge budgets.

Example:
    python scripts/crlb_design_comparison.py --nodes 10000 --alpha 0.1
"""

import argparse

import numpy as np

from triadic.fisher import crlb_known
from triadic.model import BETABIN, SGS, build_model
from triadic.oracle import exact_distribution
from triadic.stream import UU, build_multigraph
from triadic.synth import powerlaw_social, shuffle_stream, truncate_stream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=10_000)
    ap.add_argument("--attach", type=int, default=3)
    ap.add_argument("--p-triangle", type=float, default=0.3)
    ap.add_argument("--W", type=int, default=20)
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--p-tri", type=float, default=0.1, help="ITS triangle probability")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = powerlaw_social(args.nodes, args.attach, args.p_triangle, args.seed)
    acts = truncate_stream(shuffle_stream(g, args.seed).activities, args.W)
    theta = exact_distribution(build_multigraph(acts, UU), n_override=args.nodes).truncated(args.W)
    m, n = len(acts), args.nodes
    p = args.p_tri ** (1 / 3)
    p_n = min(1.0, m * p / (n * float(np.arange(args.W + 1) @ theta)))
    print(f"# n={n} m={m} edge rate p={p:.4f} ITS-color p_tri={p * p:.4f} SGS p_n={p_n:.4f}")
    rows = {
        "its": crlb_known(theta, build_model(BETABIN, args.W, p_tri=args.p_tri, alpha=args.alpha), n),
        "its-color": crlb_known(theta, build_model(BETABIN, args.W, p_tri=p * p, alpha=args.alpha), n),
        "sgs": crlb_known(theta, build_model(SGS, args.W, p_n=p_n), n),
    }
    print("i,theta_i," + ",".join(rows))
    for i in range(args.W + 1):
        print(f"{i},{theta[i]:.5f}," + ",".join(f"{r.rooted[i]:.5g}" for r in rows.values()))


if __name__ == "__main__":
    main()
