"""Per-coordinate NRMSE of ITS, ITS-color, SGS and their mixture over sampling rates.

Example:
    python scripts/nrmse_sweep.py --nodes 10000 --rates 0.1,0.2 --trials 100
"""

import argparse

import numpy as np

from triadic.burst import nrmse
from triadic.estimator import mixture
from triadic.oracle import exact_distribution
from triadic.pipeline import EstimatorSpec, SamplerSpec, estimate_window
from triadic.rng import trial_seeds
from triadic.stream import UU, SocialGraph, build_multigraph
from triadic.synth import powerlaw_social, shuffle_stream, truncate_stream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=10_000)
    ap.add_argument("--attach", type=int, default=3)
    ap.add_argument("--p-triangle", type=float, default=0.3)
    ap.add_argument("--rates", default="0.1,0.2")
    ap.add_argument("--p-n-scale", type=float, default=0.5, help="SGS p_n = scale * rate")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--W", type=int, default=20)
    ap.add_argument("--c", type=float, default=0.5, help="mixture weight on ITS-color")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    n, W = args.nodes, args.W
    g = powerlaw_social(n, args.attach, args.p_triangle, args.seed)
    acts = truncate_stream(shuffle_stream(g, args.seed).activities, W)
    social = SocialGraph.from_edges([(a.source, a.target) for a in acts], directed=False)
    theta = exact_distribution(build_multigraph(acts, UU), n_override=n).truncated(W)
    est = EstimatorSpec(W=W, known_n=n)
    seeds = trial_seeds(args.seed, args.trials)
    print("method,rate,i,theta_i,nrmse")
    for rate in (float(r) for r in args.rates.split(",")):
        specs = {"its": SamplerSpec("its", p=rate),
                 "its-color": SamplerSpec("its-color", n_colors=max(1, round(1 / rate))),
                 "sgs": SamplerSpec("sgs", p_n=min(1.0, args.p_n_scale * rate))}
        runs = {m: np.array([estimate_window(acts, s, est, UU, social, sd).estimate.theta
                             for sd in seeds]) for m, s in specs.items()}
        runs["mixture"] = np.array([mixture(a, b, args.c)
                                    for a, b in zip(runs["its-color"], runs["sgs"])])
        for m, r in runs.items():
            for i, v in enumerate(nrmse(r, theta)):
                print(f"{m},{rate},{i},{theta[i]:.5f},{v:.4f}")


if __name__ == "__main__":
    main()
