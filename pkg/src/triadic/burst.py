"""Burst tracking against a dormant baseline, spam injection and NRMSE.

KL divergence is taken as ``D(base || estimate)`` in nats on distributions
floored at ``eps`` and renormalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .stream import UU, ActivityWindow, SocialActivity, SocialGraph

DEFAULT_EPS = 1e-9
DEFAULT_TAU = 0.05
RANDOM = "random"
RANDOM_FRIEND = "random-friend"


def smooth(dist, eps: float = DEFAULT_EPS) -> np.ndarray:
    d = np.asarray(dist, dtype=float)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("distribution must be a nonempty vector")
    if np.any(d < 0):
        raise ValueError("distribution entries must be nonnegative")
    d = np.maximum(d, eps)
    return d / d.sum()


@dataclass
class BaselineDistribution:
    theta_base: np.ndarray
    source_windows: list = field(default_factory=list)
    smoothing_eps: float = DEFAULT_EPS


def baseline(estimates, eps: float = DEFAULT_EPS, source_windows=None) -> BaselineDistribution:
    """Componentwise mean of dormant-period estimates, floored and renormalized."""
    est = [np.asarray(e, dtype=float) for e in estimates]
    if not est:
        raise ValueError("baseline needs at least one estimate")
    if len({e.shape for e in est}) != 1:
        raise ValueError("estimates must share one length")
    mean = np.mean(est, axis=0)
    theta = smooth(mean, eps) if eps > 0 else mean / mean.sum()
    return BaselineDistribution(theta, list(source_windows or range(len(est))), eps)


def kl_divergence(base, estimate, eps: float | None = None) -> float:
    """``sum_i base_i log(base_i / est_i)`` after smoothing both arguments."""
    if isinstance(base, BaselineDistribution):
        eps = base.smoothing_eps if eps is None else eps
        base = base.theta_base
    eps = DEFAULT_EPS if eps is None else eps
    b = np.asarray(base, dtype=float)
    e = np.asarray(estimate, dtype=float)
    if b.shape != e.shape:
        raise ValueError(f"length mismatch: {b.shape} vs {e.shape}")
    if eps > 0:
        b, e = smooth(b, eps), smooth(e, eps)
    mask = b > 0
    return max(float(np.sum(b[mask] * np.log(b[mask] / e[mask]))), 0.0)


@dataclass
class BurstPoint:
    window_index: int
    kl: float
    n_plus_hat: float | None = None
    flagged: bool = False


@dataclass
class FixedThreshold:
    tau: float = DEFAULT_TAU


@dataclass
class RollingThreshold:
    window: int = 7
    k: float = 3.0
    tau: float = DEFAULT_TAU


def parse_policy(text: str):
    """``fixed:0.05`` or ``rolling:<window>:<k>``."""
    parts = text.split(":")
    try:
        if parts[0] == "fixed" and len(parts) <= 2:
            return FixedThreshold(float(parts[1]) if len(parts) == 2 else DEFAULT_TAU)
        if parts[0] == "rolling" and len(parts) == 3:
            return RollingThreshold(int(parts[1]), float(parts[2]))
    except ValueError:
        pass
    raise ValueError(f"bad policy {text!r}; use fixed:<tau> or rolling:<window>:<k>")


def flag_bursts(series: list, policy=None) -> list:
    """Mark windows whose KL exceeds the policy threshold.

    The rolling policy compares each window to the mean plus ``k`` standard
    deviations of the preceding ``window`` values and falls back to the fixed
    ``tau`` until that many values exist.
    """
    policy = policy or FixedThreshold()
    kl = np.array([p.kl for p in series], dtype=float)
    out = []
    for idx, p in enumerate(series):
        if isinstance(policy, RollingThreshold) and idx >= policy.window:
            past = kl[idx - policy.window:idx]
            thr = past.mean() + policy.k * past.std()
            flagged = bool(kl[idx] > thr and kl[idx] - past.mean() > 1e-12)
        else:
            flagged = bool(kl[idx] > policy.tau)
        out.append(BurstPoint(p.window_index, p.kl, p.n_plus_hat, flagged))
    return out


@dataclass
class SpamPlan:
    strategy: str
    count: int
    spammer: str = "uspammer"
    seed: int = 0

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("spam count must be nonnegative")
        if self.strategy not in (RANDOM, RANDOM_FRIEND):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def inject_spam(window: ActivityWindow, plan: SpamPlan, social: SocialGraph | None = None,
                population=None, max_retries: int = 20) -> ActivityWindow:
    """Append spammer interactions with uniform timestamps inside the window.

    Random targets are distinct while ``count`` does not exceed the target
    population and drawn with replacement beyond that.  RandomFriend performs
    ``count // 2`` steps, each hitting a random user and one of its friends.
    """
    if plan.count == 0:
        return ActivityWindow(window.window_index, window.start, window.end, list(window.activities))
    rng = np.random.default_rng(plan.seed)
    if population is None:
        population = sorted(social.users) if social is not None else \
            sorted({x for a in window.activities if a.kind == UU for x in (a.source, a.target)})
    population = [u for u in population if u != plan.spammer]
    targets: list = []
    if plan.strategy == RANDOM:
        if not population:
            raise ValueError("no users to target")
        replace = plan.count > len(population)
        idx = rng.choice(len(population), size=plan.count, replace=replace)
        targets = [population[i] for i in idx.tolist()]
    else:
        if social is None or social.n_edges() == 0:
            raise ValueError("RandomFriend needs a nonempty social graph")
        for _ in range(plan.count // 2):
            for _ in range(max_retries):
                w = population[int(rng.integers(len(population)))]
                friends = sorted(social.neighbors(w) - {plan.spammer})
                if friends:
                    x = friends[int(rng.integers(len(friends)))]
                    targets.extend((w, x))
                    break
    ts = np.sort(rng.integers(window.start, window.end, size=len(targets)))
    spam = [SocialActivity(UU, plan.spammer, t, int(s)) for t, s in zip(targets, ts.tolist())]
    merged = sorted(window.activities + spam, key=lambda a: a.timestamp)
    return ActivityWindow(window.window_index, window.start, window.end, merged)


def nrmse(estimates, truth) -> np.ndarray:
    """Per-coordinate ``sqrt(mean((est - truth)^2)) / truth``; NaN where truth is 0."""
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    truth = np.asarray(truth, dtype=float)
    if est.shape[0] == 0 or est.size == 0:
        raise ValueError("nrmse needs at least one trial")
    if est.shape[1] != truth.shape[0]:
        raise ValueError("estimate and truth lengths differ")
    rmse = np.sqrt(np.mean((est - truth) ** 2, axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(truth > 0, rmse / np.where(truth > 0, truth, 1.0), np.nan)
