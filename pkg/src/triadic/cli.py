"""Command-line entry point.

Every output file starts with its full configuration: CSV files carry a
``# config: {...}`` comment line and JSON files a ``"config"`` key.  Exit
codes: 0 ok, 1 usage, 2 input format, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

import numpy as np

from . import burst as burst_mod
from .errors import InputFormatError, NumericalError, ParseError
from .estimator import EmOptions, em_known_n, em_unknown_n, mixture, phi_from_theta_plus
from .fisher import crlb_known, crlb_theta_plus
from .model import BETABIN, SGS as SGS_MODEL, bin_model, build_model
from .oracle import exact_distribution
from .pipeline import EstimatorSpec, SamplerSpec, benchmark, estimate_window, track, windows_of
from .rng import trial_seeds
from .sampling import (ITS, ITS_COLOR, METHODS, SGS, TriangleStatistics, calibrate_g0,
                       collect_statistics, make_sampler, write_sampled_graph)
from .stream import KINDS, UC, UU, SocialGraph, build_multigraph, read_social_graph, read_stream, \
    write_social_graph, write_stream

log = logging.getLogger("triadic")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
_NOT_CONFIG = {"config", "func", "jobs", "progress"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_sampler_flags(p, method_required=True):
    p.add_argument("--method", choices=METHODS, required=method_required)
    p.add_argument("--p", type=float, help="ITS edge sampling probability")
    p.add_argument("--p-prime", type=float, help="ITS social-edge check probability")
    p.add_argument("--n-colors", type=int, help="ITS-color number of colors")
    p.add_argument("--p-n", type=float, help="SGS node sampling probability")
    p.add_argument("--expected-contents", type=int, default=100_000,
                   help="SGS Bloom filter capacity")


def _add_estimator_flags(p):
    p.add_argument("--alpha", default="fit", help="'fit' or a fixed value (also 'fixed:<v>')")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--known-n", type=int, help="population size used to calibrate g0")
    g.add_argument("--unknown-n", action="store_true", help="estimate n_plus and theta_plus")
    p.add_argument("--binned", action="store_true")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-8)


def _common(p):
    p.add_argument("--config", help="JSON file with flag values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--progress", action="store_true", help="per-window status on stderr")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="triadic", description="Triadic cardinality estimation on activity streams")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic stream, social graph and truth")
    _common(p)
    p.add_argument("--kind", choices=["planted", "shuffle", "burst", "clustered"], default="planted")
    p.add_argument("--mode", choices=KINDS, default=UU)
    p.add_argument("--hist", help="planted histogram, e.g. '0:50,1:30,2:20'")
    p.add_argument("--edges", help="edge-list file for shuffle mode")
    p.add_argument("--nodes", type=int, default=1000)
    p.add_argument("--attach", type=int, default=3, help="powerlaw attachment count")
    p.add_argument("--p-triangle", type=float, default=0.5)
    p.add_argument("--windows", type=int, default=14)
    p.add_argument("--per-window", type=int, default=2000)
    p.add_argument("--burst-windows", default="10")
    p.add_argument("--burst-triangles", type=int, default=500)
    p.add_argument("--group-size", type=int, default=40)
    p.add_argument("--p-in", type=float, default=0.6)
    p.add_argument("--out-edges", type=int, default=0)
    p.add_argument("--window-length", type=int, default=1000)
    p.add_argument("--out-stream", required=True)
    p.add_argument("--out-social", required=True)
    p.add_argument("--out-truth")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sample", help="sample a stream and dump the sampled graph")
    _common(p)
    p.add_argument("stream")
    p.add_argument("--social")
    p.add_argument("--mode", choices=KINDS, default=UU)
    _add_sampler_flags(p)
    p.add_argument("--w-cap", type=int, default=20)
    p.add_argument("--stats-out", help="also write the observation vector as CSV j,count")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("oracle", help="exact triadic cardinality distribution")
    _common(p)
    p.add_argument("stream")
    p.add_argument("--social")
    p.add_argument("--mode", choices=KINDS, default=UU)
    p.add_argument("--n-override", type=int)
    p.add_argument("--window-length", type=int, help="one distribution per window")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("estimate", help="EM estimate from an observation vector")
    _common(p)
    p.add_argument("stats", help="CSV j,count")
    p.add_argument("--model", choices=[BETABIN, SGS_MODEL], required=True)
    p.add_argument("--p-tri", type=float)
    p.add_argument("--p-n", type=float)
    _add_estimator_flags(p)
    p.add_argument("--dump-model", help="write the sampling model as JSON")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("crlb", help="Cramer-Rao bounds for a ground-truth distribution")
    _common(p)
    p.add_argument("truth", help="CSV i,theta_i")
    p.add_argument("--model", choices=[BETABIN, SGS_MODEL], required=True)
    p.add_argument("--p-tri", type=float)
    p.add_argument("--p-n", type=float)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--n", type=float, required=True, help="n (known) or n_plus (--unknown-n)")
    p.add_argument("--unknown-n", action="store_true")
    p.add_argument("--sweep", help="e.g. p-tri=0.1:0.9:0.1 or p-n=0.05:1:0.05")
    p.set_defaults(func=cmd_crlb)

    p = sub.add_parser("track", help="KL burst series over windows")
    _common(p)
    p.add_argument("stream")
    p.add_argument("--social")
    p.add_argument("--mode", choices=KINDS, default=UU)
    _add_sampler_flags(p)
    _add_estimator_flags(p)
    p.add_argument("--w-cap", type=int, default=20)
    p.add_argument("--window-length", type=int, required=True)
    p.add_argument("--reorder-horizon", type=int)
    p.add_argument("--baseline-windows", default="0..6")
    p.add_argument("--policy", default="fixed:0.05")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="NRMSE sweep against the exact distribution")
    _common(p)
    p.add_argument("stream")
    p.add_argument("--social")
    p.add_argument("--methods", default="its,its-color,sgs")
    p.add_argument("--rates", default="0.1,0.2", help="edge rates p (SGS uses --p-n-scale * p)")
    p.add_argument("--p-n-scale", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--w-cap", type=int, default=20)
    p.add_argument("--alpha", default="fit")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("benchmark", help="sampled versus exact pipeline timing")
    _common(p)
    p.add_argument("stream")
    p.add_argument("--social")
    p.add_argument("--mode", choices=KINDS, default=UU)
    _add_sampler_flags(p)
    _add_estimator_flags(p)
    p.add_argument("--w-cap", type=int, default=20)
    p.add_argument("--repeats", type=int, default=1)
    p.set_defaults(func=cmd_benchmark)
    return parser


# serialization ------------------------------------------------------------

def config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}


def _header(args) -> str:
    return "# config: " + json.dumps(config_of(args), sort_keys=True) + "\n"


def read_provenance(path) -> dict:
    """Configuration recorded at the top of an output file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.startswith("# config: "):
        return json.loads(text.splitlines()[0][len("# config: "):])
    return json.loads(text)["config"]


def _write_text(args, text: str):
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _write_csv(args, header, rows):
    buf = io.StringIO()
    buf.write(_header(args))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    _write_text(args, buf.getvalue())


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return "nan" if np.isnan(x) else repr(float(x))
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return x


def _write_json(args, payload: dict):
    payload = {"config": config_of(args)} | payload
    _write_text(args, json.dumps(payload, indent=2, sort_keys=False, default=_json_default) + "\n")


def _json_default(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"cannot serialize {type(x)}")


def read_vector_csv(path, value_cast=float) -> np.ndarray:
    """Read ``index,value`` rows (comments and a header row allowed)."""
    rows = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = [s.strip() for s in body.split(",")]
            if len(parts) != 2:
                raise ParseError(f"expected 2 comma-separated fields, got {len(parts)}", lineno)
            try:
                idx = int(parts[0])
            except ValueError:
                if not rows:
                    continue  # header row
                raise ParseError(f"index {parts[0]!r} is not an integer", lineno) from None
            try:
                val = value_cast(parts[1])
            except ValueError:
                raise ParseError(f"value {parts[1]!r} is not numeric", lineno) from None
            if idx < 0 or idx in rows:
                raise ParseError(f"index {idx} is negative or repeated", lineno)
            rows[idx] = val
    if not rows:
        raise InputFormatError(f"{path}: no data rows")
    out = np.zeros(max(rows) + 1)
    for k, v in rows.items():
        out[k] = v
    return out


# validation -----------------------------------------------------------------

def _sampler_spec(args) -> SamplerSpec:
    m = args.method
    given = {k: getattr(args, k, None) is not None for k in ("p", "p_prime", "n_colors", "p_n")}
    allowed = {ITS: {"p", "p_prime"}, ITS_COLOR: {"n_colors"}, SGS: {"p_n"}}[m]
    extra = [k for k, v in given.items() if v and k not in allowed]
    if extra:
        flags = ", ".join("--" + k.replace("_", "-") for k in extra)
        raise UsageError(f"{flags} cannot be used with --method {m}")
    try:
        spec = SamplerSpec(m, p=args.p if args.p is not None else 1.0,
                           p_prime=args.p_prime if args.p_prime is not None else 1.0,
                           n_colors=args.n_colors if args.n_colors is not None else 1,
                           p_n=args.p_n if args.p_n is not None else 1.0,
                           expected_contents=getattr(args, "expected_contents", 100_000))
        spec.config(0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return spec


def _alpha(text) -> float | None:
    if text is None or str(text) == "fit":
        return None
    s = str(text)
    if s.startswith("fixed:"):
        s = s[len("fixed:"):]
    try:
        v = float(s)
    except ValueError:
        raise UsageError(f"--alpha must be 'fit' or a number, got {text!r}") from None
    if v < 0:
        raise UsageError("--alpha must be nonnegative")
    return v


def _em_options(args) -> EmOptions:
    try:
        return EmOptions(max_iters=args.max_iters, loglik_tol=args.tol, alpha_fixed=_alpha(args.alpha))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _estimator_spec(args) -> EstimatorSpec:
    if args.w_cap < 1:
        raise UsageError("--w-cap must be >= 1")
    return EstimatorSpec(W=args.w_cap, alpha=_alpha(args.alpha), known_n=args.known_n,
                         binned=args.binned, options=_em_options(args))


def _model_from_flags(args, W):
    if args.model == SGS_MODEL:
        if args.p_tri is not None:
            raise UsageError("--p-tri cannot be used with --model sgs")
        if args.p_n is None:
            raise UsageError("--model sgs needs --p-n")
        return build_model(SGS_MODEL, W, p_n=args.p_n)
    if args.p_n is not None:
        raise UsageError("--p-n cannot be used with --model betabin")
    if args.p_tri is None:
        raise UsageError("--model betabin needs --p-tri")
    alpha = _alpha(args.alpha) if isinstance(args.alpha, str) else args.alpha
    return build_model(BETABIN, W, p_tri=args.p_tri, alpha=0.1 if alpha is None else alpha)


def _social(args) -> SocialGraph | None:
    return read_social_graph(args.social) if getattr(args, "social", None) else None


def _check_mode(args, social):
    if args.mode == UC and social is None:
        raise UsageError("--mode uc needs --social")
    if getattr(args, "method", None) == SGS and args.mode == UU and social is None:
        raise UsageError("--method sgs needs --social")


def _parse_range(text: str):
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"bad window list {text!r}; use 0..6 or 0,1,2") from None


def _progress(args):
    if not args.progress:
        return None
    return lambda msg: print(msg, file=sys.stderr, flush=True)


# commands -------------------------------------------------------------------

def cmd_synth(args):
    from . import synth
    mode = args.mode
    if args.kind == "planted":
        if not args.hist:
            raise UsageError("--kind planted needs --hist")
        try:
            hist = {int(k): int(v) for k, v in (kv.split(":") for kv in args.hist.split(","))}
        except ValueError:
            raise UsageError(f"bad --hist {args.hist!r}; use 'card:count,...'") from None
        s = synth.planted_stream(hist, mode, args.seed, window_length=args.window_length)
    elif args.kind == "shuffle":
        if not args.edges:
            raise UsageError("--kind shuffle needs --edges")
        edges = []
        with open(args.edges, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                body = line.split("#", 1)[0].split()
                if not body:
                    continue
                if len(body) != 2:
                    raise ParseError("expected 2 node ids", lineno)
                edges.append(tuple(body))
        s = synth.shuffle_stream(edges, args.seed, args.window_length)
    elif args.kind == "clustered":
        e = synth.clustered_edges(args.nodes, args.group_size, args.p_in, args.out_edges, args.seed)
        acts = synth.edges_to_stream(e, args.seed, args.window_length)
        s = synth.SyntheticStream(acts, SocialGraph.from_edges(
            ((a.source, a.target) for a in acts), directed=False))
    else:
        g = synth.powerlaw_social(args.nodes, args.attach, args.p_triangle, args.seed)
        bursts = _parse_range(args.burst_windows)
        s = synth.burst_stream(g, args.windows, args.per_window, bursts, args.burst_triangles,
                               args.window_length, args.seed)
    header = _header(args)
    write_stream(s.activities, args.out_stream, header)
    write_social_graph(s.social, args.out_social, header)
    if args.out_truth:
        g = build_multigraph(s.activities, mode, s.social)
        gt = exact_distribution(g, s.social)
        with open(args.out_truth, "w", encoding="utf-8") as fh:
            fh.write(header + "i,theta_i\n")
            for i, t in enumerate(gt.distribution):
                fh.write(f"{i},{float(t)!r}\n")
    _write_json(args, {"activities": len(s.activities), "social_edges": s.social.n_edges()})


def cmd_sample(args):
    spec = _sampler_spec(args)
    social = _social(args)
    _check_mode(args, social)
    acts = read_stream(args.stream)
    sg = make_sampler(spec.method, spec.config(args.seed), social).offer_all(acts)
    if args.out == "-":
        raise UsageError("sample needs --out for the sampled graph")
    write_sampled_graph(sg, args.out, _header(args))
    if args.stats_out:
        st = collect_statistics(sg, args.w_cap, args.mode)
        with open(args.stats_out, "w", encoding="utf-8") as fh:
            fh.write(_header(args) + "j,count\n")
            for j, c in st.to_rows():
                fh.write(f"{j},{c}\n")


def cmd_oracle(args):
    social = _social(args)
    _check_mode(args, social)
    acts = read_stream(args.stream)
    if args.window_length:
        rows = []
        for w in windows_of(acts, args.window_length):
            gt = exact_distribution(build_multigraph(w, args.mode, social), social, args.n_override)
            rows.extend((w.window_index, i, t) for i, t in enumerate(gt.distribution))
        _write_csv(args, ["window", "i", "theta_i"], rows)
        return
    gt = exact_distribution(build_multigraph(acts, args.mode, social), social, args.n_override)
    _write_csv(args, ["i", "theta_i"], list(enumerate(gt.distribution)))


def cmd_estimate(args):
    g = read_vector_csv(args.stats)
    W = len(g) - 1
    if W < 1:
        raise InputFormatError("statistics need at least entries j=0 and j=1")
    model = _model_from_flags(args, W)
    if args.binned:
        model = bin_model(model)
    opts = _em_options(args)
    if args.dump_model:
        with open(args.dump_model, "w", encoding="utf-8") as fh:
            json.dump({"config": config_of(args)} | model.to_dict(), fh, indent=2, default=_json_default)
    if args.unknown_n:
        est = em_unknown_n(g, model, opts)
    else:
        if args.known_n is not None:
            g = calibrate_g0(TriangleStatistics(g, W, UU), args.known_n).counts
        est = em_known_n(g, model, opts)
    d = est.to_dict()
    _write_json(args, {k: d[k] for k in ("theta", "labels", "alpha_hat", "n_plus_hat",
                                         "n_plus_rounded", "loglik_trace", "iterations",
                                         "converged")})


def _sweep(text):
    try:
        name, rng_text = text.split("=")
        a, b, step = (float(x) for x in rng_text.split(":"))
    except ValueError:
        raise UsageError(f"bad --sweep {text!r}; use name=start:stop:step") from None
    if name not in ("p-tri", "p-n") or step <= 0 or a > b:
        raise UsageError("--sweep parameter must be p-tri or p-n with start <= stop, step > 0")
    vals = np.round(np.arange(a, b + step / 2, step), 12)
    return name, [float(v) for v in vals]


def cmd_crlb(args):
    theta = read_vector_csv(args.truth)
    if abs(theta.sum() - 1) > 1e-6:
        raise InputFormatError(f"truth distribution sums to {theta.sum()}, not 1")
    W = len(theta) - 1
    points = [(None, None)]
    if args.sweep:
        name, vals = _sweep(args.sweep)
        points = [(name, v) for v in vals]
    rows = []
    for name, v in points:
        point = argparse.Namespace(**vars(args))
        if name == "p-tri":
            point.p_tri = v
        elif name == "p-n":
            point.p_n = v
        model = _model_from_flags(point, W)
        if args.unknown_n:
            tp = theta[1:] / theta[1:].sum()
            phi = phi_from_theta_plus(tp, model.alpha, model)
            rep = crlb_theta_plus(phi, model.alpha, model, args.n)
        else:
            rep = crlb_known(theta, model, args.n)
        label = f"{name}={v}" if name else "base"
        rows.extend((label, lab, r) for lab, r in zip(rep.labels, rep.rooted))
    _write_csv(args, ["param", "coordinate", "rooted_crlb"], rows)


def _windows(args, acts):
    return windows_of(acts, args.window_length, args.reorder_horizon)


def cmd_track(args):
    spec = _sampler_spec(args)
    est = _estimator_spec(args)
    social = _social(args)
    _check_mode(args, social)
    try:
        policy = burst_mod.parse_policy(args.policy)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    base = _parse_range(args.baseline_windows)
    acts = read_stream(args.stream)
    windows = _windows(args, acts)
    series, _ = track(windows, spec, est, args.mode, social, args.seed, base, policy,
                      jobs=args.jobs, progress=_progress(args))
    rows = [(p.window_index, p.kl, "" if p.n_plus_hat is None else p.n_plus_hat, p.flagged)
            for p in series]
    _write_csv(args, ["window", "kl", "n_plus_hat", "flagged"], rows)


def cmd_eval(args):
    social = _social(args)
    acts = read_stream(args.stream)
    methods = [m for m in args.methods.split(",") if m]
    for m in methods:
        if m not in METHODS + ("mixture",):
            raise UsageError(f"unknown method {m!r}")
    if SGS in methods and social is None:
        raise UsageError("sgs needs --social")
    try:
        rates = [float(x) for x in args.rates.split(",")]
    except ValueError:
        raise UsageError(f"bad --rates {args.rates!r}") from None
    W = args.w_cap
    g = build_multigraph(acts, UU, social)
    gt = exact_distribution(g)
    n = gt.n
    truth = gt.truncated(W)
    alpha = _alpha(args.alpha)
    rows = []
    seeds = trial_seeds(args.seed, args.trials)
    for rate in rates:
        specs = {ITS: SamplerSpec(ITS, p=rate),
                 ITS_COLOR: SamplerSpec(ITS_COLOR, n_colors=max(1, round(1 / rate))),
                 SGS: SamplerSpec(SGS, p_n=min(1.0, rate * args.p_n_scale))}
        est = EstimatorSpec(W=W, alpha=alpha, known_n=n)
        results = {}
        for m in [x for x in (ITS, ITS_COLOR, SGS) if x in methods or
                  ("mixture" in methods and x in (ITS_COLOR, SGS))]:
            vals = []
            for k, s in enumerate(seeds):
                r = estimate_window(acts, specs[m], est, UU, social, s)
                vals.append(r.estimate.theta if r.estimate is not None else np.eye(W + 1)[0])
                if args.progress:
                    print(f"{m} rate={rate} trial {k + 1}/{len(seeds)}", file=sys.stderr)
            results[m] = np.array(vals)
        if "mixture" in methods:
            results["mixture"] = np.array([mixture(a, b, 0.5) for a, b in
                                           zip(results[ITS_COLOR], results[SGS])])
        for m in methods:
            for i, v in enumerate(burst_mod.nrmse(results[m], truth)):
                rows.append((m, rate, i, v))
    _write_csv(args, ["method", "param", "coordinate", "nrmse"], rows)


def cmd_benchmark(args):
    spec = _sampler_spec(args)
    est = _estimator_spec(args)
    social = _social(args)
    _check_mode(args, social)
    acts = read_stream(args.stream)
    rep = benchmark(acts, spec, est, args.mode, social, args.seed, args.repeats)
    _write_json(args, rep.to_dict())


# entry point ------------------------------------------------------------------

def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with open(known.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise InputFormatError("config file must hold a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in sub.choices.items():
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in cfg.items() if k in dests and k not in _NOT_CONFIG})
        # positional inputs may come from the config too
        for a in sp._actions:
            if a.dest in cfg:
                a.required = False
                if not a.option_strings:
                    a.nargs = "?"
                    a.default = cfg[a.dest]
    if "command" in cfg and not any(a in sub.choices for a in argv):
        argv.insert(0, cfg["command"])


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except InputFormatError as exc:
        print(f"triadic: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        args.func(args)
    except UsageError as exc:
        print(f"triadic: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputFormatError, OSError) as exc:
        print(f"triadic: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"triadic: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"triadic: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
