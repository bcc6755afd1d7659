"""Sampled versus exact pipeline wall-clock across ITS rates on a clustered stream.

Example:
    python scripts/benchmark_speedup.py --nodes 80000 --rates 0.1,0.2,0.3
"""

import argparse

from triadic.pipeline import EstimatorSpec, SamplerSpec, benchmark
from triadic.stream import SocialGraph
from triadic.synth import clustered_edges, edges_to_stream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=80_000)
    ap.add_argument("--group-size", type=int, default=40)
    ap.add_argument("--p-in", type=float, default=0.6)
    ap.add_argument("--out-edges", type=int, default=100_000)
    ap.add_argument("--rates", default="0.1,0.2,0.3")
    ap.add_argument("--repeats", type=int, default=2)
    args = ap.parse_args()

    edges = clustered_edges(args.nodes, args.group_size, args.p_in, args.out_edges)
    acts = edges_to_stream(edges)
    print(f"# {len(acts)} activities")
    print("p,exact_s,sampled_s,speedup,kept")
    for p in (float(x) for x in args.rates.split(",")):
        rep = benchmark(acts, SamplerSpec("its", p=p), EstimatorSpec(W=20), social=SocialGraph(),
                        repeats=args.repeats)
        print(f"{p},{rep.exact_seconds:.2f},{rep.sampled_seconds:.2f},{rep.speedup:.1f},{rep.kept}")


if __name__ == "__main__":
    main()
