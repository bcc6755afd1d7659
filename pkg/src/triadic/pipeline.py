"""End-to-end window processing: sample, count, estimate, track."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import burst as burst_mod
from .estimator import DistributionEstimate, EmOptions, em_known_n, em_unknown_n
from .model import BETABIN, SGS as SGS_MODEL, SamplingModel, bin_model, build_model
from .oracle import exact_distribution
from .sampling import (ITS, ITS_COLOR, SGS, ItsColorConfig, ItsConfig, SgsConfig,
                       TriangleStatistics, calibrate_g0, collect_statistics, make_sampler)
from .stream import UU, SocialGraph, build_multigraph, window_partition

log = logging.getLogger(__name__)


def triangle_probability(method: str, config, mode: str = UU) -> float:
    """Probability that a fixed triangle survives the sampler."""
    if method == ITS:
        return config.p ** 3 if mode == UU else config.p ** 2 * config.p_prime
    if method == ITS_COLOR:
        return config.p ** 2
    if method == SGS:
        return 1.0
    raise ValueError(f"unknown method {method!r}")


@dataclass
class SamplerSpec:
    method: str = ITS
    p: float = 1.0
    p_prime: float = 1.0
    n_colors: int = 1
    p_n: float = 1.0
    expected_contents: int = 100_000

    def config(self, seed: int):
        if self.method == ITS:
            return ItsConfig(self.p, self.p_prime, seed)
        if self.method == ITS_COLOR:
            return ItsColorConfig(self.n_colors, seed)
        if self.method == SGS:
            return SgsConfig(self.p_n, seed, self.expected_contents)
        raise ValueError(f"unknown method {self.method!r}")


@dataclass
class EstimatorSpec:
    W: int = 20
    alpha: float | None = None  # None fits alpha, a number fixes it
    known_n: int | None = None
    binned: bool = False
    options: EmOptions = field(default_factory=EmOptions)


def model_for(sampler: SamplerSpec, est: EstimatorSpec, mode: str = UU, seed: int = 0) -> SamplingModel:
    if sampler.method == SGS:
        model = build_model(SGS_MODEL, est.W, p_n=sampler.p_n)
    else:
        p_tri = triangle_probability(sampler.method, sampler.config(seed), mode)
        alpha = est.alpha if est.alpha is not None else est.options.alpha_init
        model = build_model(BETABIN, est.W, p_tri=p_tri, alpha=alpha)
    return bin_model(model) if est.binned else model


def _options(est: EstimatorSpec) -> EmOptions:
    opts = est.options
    if est.alpha is not None and opts.alpha_fixed != est.alpha:
        opts = EmOptions(**(asdict(opts) | {"alpha_fixed": est.alpha}))
    return opts


def estimate_statistics(stats: TriangleStatistics, model: SamplingModel, est: EstimatorSpec,
                        n: int | None = None) -> DistributionEstimate:
    opts = _options(est)
    n = n if n is not None else est.known_n
    if n is not None:
        return em_known_n(calibrate_g0(stats, n), model, opts)
    return em_unknown_n(stats.counts, model, opts)


@dataclass
class WindowResult:
    window_index: int
    statistics: TriangleStatistics
    estimate: DistributionEstimate | None
    kept: int
    offered: int


def estimate_window(activities, sampler: SamplerSpec, est: EstimatorSpec, mode: str = UU,
                    social: SocialGraph | None = None, seed: int = 0,
                    n: int | None = None, window_index: int = 0) -> WindowResult:
    """Sample one window, histogram sampled triangles and run EM.

    Windows without any sampled triangle yield no estimate.
    """
    cfg = sampler.config(seed)
    sm = make_sampler(sampler.method, cfg, social)
    sg = sm.offer_all(activities)
    stats = collect_statistics(sg, est.W, mode)
    model = model_for(sampler, est, mode, seed)
    estimate = None
    if stats.counts[1:].sum() > 0:
        estimate = estimate_statistics(stats, model, est, n)
    return WindowResult(window_index, stats, estimate, sg.kept, sg.offered)


def window_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


def estimate_windows(windows, sampler: SamplerSpec, est: EstimatorSpec, mode: str = UU,
                     social: SocialGraph | None = None, seed: int = 0, jobs: int = 1,
                     progress=None) -> list[WindowResult]:
    windows = list(windows)

    def run(w):
        return estimate_window(w.activities, sampler, est, mode, social,
                               window_seed(seed, w.window_index), window_index=w.window_index)

    if jobs > 1 and len(windows) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(run, windows))
    else:
        results = []
        for w in windows:
            results.append(run(w))
            if progress:
                progress(f"window {w.window_index}: {len(w.activities)} activities")
    return results


def estimate_vector(result: WindowResult, n_categories: int) -> np.ndarray:
    """Estimated distribution, or all mass at the lowest category if none."""
    if result.estimate is not None:
        return np.asarray(result.estimate.theta, dtype=float)
    v = np.zeros(n_categories)
    v[0] = 1.0
    return v


def track(windows, sampler: SamplerSpec, est: EstimatorSpec, mode: str = UU,
          social: SocialGraph | None = None, seed: int = 0, baseline_windows=range(7),
          policy=None, eps: float = burst_mod.DEFAULT_EPS, jobs: int = 1, progress=None):
    """KL series of per-window estimates against the mean of baseline windows."""
    results = estimate_windows(windows, sampler, est, mode, social, seed, jobs, progress)
    if not results:
        return [], None
    k = model_for(sampler, est, mode, seed).n_categories - (0 if est.known_n else 1)
    vectors = [estimate_vector(r, k) for r in results]
    base_idx = [i for i, r in enumerate(results) if r.window_index in set(baseline_windows)]
    if not base_idx:
        raise ValueError("no baseline window present in the stream")
    base = burst_mod.baseline([vectors[i] for i in base_idx], eps,
                              [results[i].window_index for i in base_idx])
    series = [burst_mod.BurstPoint(r.window_index, burst_mod.kl_divergence(base, v),
                                   r.estimate.n_plus_hat if r.estimate else None)
              for r, v in zip(results, vectors)]
    return burst_mod.flag_bursts(series, policy), base


def exact_pipeline(activities, mode: str = UU, social: SocialGraph | None = None):
    return exact_distribution(build_multigraph(activities, mode, social), social)


@dataclass
class BenchmarkReport:
    activities: int
    exact_seconds: float
    sampled_seconds: float
    kept: int

    @property
    def speedup(self) -> float:
        return self.exact_seconds / self.sampled_seconds if self.sampled_seconds > 0 else float("inf")

    @property
    def throughput(self) -> float:
        """Activities per second through the sampled pipeline."""
        return self.activities / self.sampled_seconds if self.sampled_seconds > 0 else float("inf")

    def to_dict(self) -> dict:
        return asdict(self) | {"speedup": self.speedup, "throughput": self.throughput}


def benchmark(activities, sampler: SamplerSpec, est: EstimatorSpec, mode: str = UU,
              social: SocialGraph | None = None, seed: int = 0, repeats: int = 1) -> BenchmarkReport:
    """Wall-clock of sampled versus exact processing of in-memory activities.

    The sampled side includes sampling, statistics and EM; the exact side
    builds the multigraph and computes every cardinality.  The best of
    ``repeats`` runs is reported for each.
    """
    activities = activities if isinstance(activities, list) else list(activities)
    best_exact = best_sampled = float("inf")
    kept = 0
    for _ in range(max(1, repeats)):
        # sampled side first so any warm-up cost lands on it
        t0 = time.perf_counter()
        res = estimate_window(activities, sampler, est, mode, social, seed)
        best_sampled = min(best_sampled, time.perf_counter() - t0)
        kept = res.kept
        t0 = time.perf_counter()
        exact_pipeline(activities, mode, social)
        best_exact = min(best_exact, time.perf_counter() - t0)
    return BenchmarkReport(len(activities), best_exact, best_sampled, kept)


def windows_of(activities, window_length: int, reorder_horizon: int | None = None):
    return list(window_partition(activities, window_length, reorder_horizon))
