"""KL shift of a synthetic week under Random / RandomFriend spam and planted triangles.

Sweeps the week's interaction count to show where random spam stops being
harmless.

Example:
    python scripts/spam_robustness.py --weeks 500,1000,2000 --seeds 20
"""

import argparse

import numpy as np

from triadic.burst import SpamPlan, inject_spam, kl_divergence
from triadic.oracle import exact_distribution
from triadic.stream import UU, ActivityWindow, SocialActivity, SocialGraph, build_multigraph
from triadic.synth import powerlaw_social, social_window


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=5_000)
    ap.add_argument("--weeks", default="250,500,1000,2000,4000", help="interactions per week")
    ap.add_argument("--spam", type=int, default=10_000)
    ap.add_argument("--triangles", type=int, default=500)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--W", type=int, default=20)
    args = ap.parse_args()

    n = args.nodes
    g = powerlaw_social(n, 2, 0.5, seed=0)
    users = [f"u{i}" for i in range(n)]
    length = 7000

    def dist(win):
        return exact_distribution(build_multigraph(win, UU), n_override=n + 1).truncated(args.W)

    print("week_interactions,kl_triangles,kl_random,kl_random_friend")
    for k in (int(x) for x in args.weeks.split(",")):
        kl = {"tri": [], "rand": [], "friend": []}
        for seed in range(args.seeds):
            rng = np.random.default_rng(seed)
            week = ActivityWindow(0, 0, length, social_window(g, k, rng, 0, length))
            base = dist(week)
            friends = SocialGraph.from_edges([(a.source, a.target) for a in week.activities],
                                             directed=False)
            extra = []
            for _ in range(args.triangles):
                x, y, z = (users[i] for i in rng.choice(n, 3, replace=False))
                t = int(rng.integers(0, length))
                extra += [SocialActivity(UU, x, y, t), SocialActivity(UU, y, z, t),
                          SocialActivity(UU, x, z, t)]
            planted = ActivityWindow(0, 0, length,
                                     sorted(week.activities + extra, key=lambda a: a.timestamp))
            kl["tri"].append(kl_divergence(base, dist(planted)))
            rand = inject_spam(week, SpamPlan("random", args.spam, seed=seed), population=users)
            kl["rand"].append(kl_divergence(base, dist(rand)))
            rf = inject_spam(week, SpamPlan("random-friend", args.spam, seed=seed), friends,
                             population=users)
            kl["friend"].append(kl_divergence(base, dist(rf)))
        med = {key: float(np.median(v)) for key, v in kl.items()}
        print(f"{k},{med['tri']:.4f},{med['rand']:.4f},{med['friend']:.4f}")


if __name__ == "__main__":
    main()
