"""Maximum likelihood estimation of triadic cardinality distributions via EM.

Two regimes are supported:

* known population ``n`` -- the observation vector ``g`` has ``g[0]``
  calibrated to include evaporated nodes and the estimate covers ``0..W``;
* unknown population -- ``g[0]`` is discarded, EM runs on the model
  conditioned on ``Y >= 1`` and the result is rescaled to the distribution
  over nodes with at least one triangle, together with an estimate of how
  many such nodes exist.

The Beta-binomial dependence parameter ``alpha`` is fitted by projected
gradient ascent with backtracking inside each M-step, which keeps the
log-likelihood trace monotone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import NoSignalError, SingularModelError
from .model import SamplingModel, bin_distribution

log = logging.getLogger(__name__)

UNIFORM = "uniform"
OBSERVED = "observed"


@dataclass
class EmOptions:
    max_iters: int = 500
    loglik_tol: float = 1e-8
    alpha_fixed: float | None = None
    alpha_init: float = 0.1
    alpha_step: float = 0.1
    alpha_max: float = 10.0
    alpha_inner_steps: int = 2
    init: str = UNIFORM

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.loglik_tol <= 0:
            raise ValueError("loglik_tol must be positive")
        if self.alpha_max <= 0:
            raise ValueError("alpha_max must be positive")
        if self.init not in (UNIFORM, OBSERVED):
            raise ValueError(f"unknown init {self.init!r}")
        if self.alpha_fixed is not None and not 0 <= self.alpha_fixed <= self.alpha_max:
            raise ValueError("alpha_fixed must lie in [0, alpha_max]")


@dataclass
class DistributionEstimate:
    theta: np.ndarray
    alpha_hat: float
    loglik_trace: list
    iterations: int
    converged: bool
    labels: list
    n_plus_hat: float | None = None
    phi: np.ndarray | None = None
    binned: bool = False
    known_n: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def n_plus_rounded(self) -> int | None:
        return None if self.n_plus_hat is None else int(round(self.n_plus_hat))

    def to_dict(self) -> dict:
        return {
            "theta": [float(x) for x in self.theta],
            "labels": list(self.labels),
            "alpha_hat": float(self.alpha_hat),
            "n_plus_hat": None if self.n_plus_hat is None else float(self.n_plus_hat),
            "n_plus_rounded": self.n_plus_rounded,
            "phi": None if self.phi is None else [float(x) for x in self.phi],
            "loglik_trace": [float(x) for x in self.loglik_trace],
            "iterations": self.iterations,
            "converged": self.converged,
            "binned": self.binned,
            "known_n": self.known_n,
        }


def _counts(g) -> np.ndarray:
    counts = getattr(g, "counts", g)
    counts = np.asarray(counts, dtype=float)
    if counts.ndim != 1:
        raise ValueError("observation vector must be one-dimensional")
    if np.any(counts < 0):
        raise ValueError("observation counts must be nonnegative")
    return counts


def _loglik(counts: np.ndarray, M: np.ndarray, theta: np.ndarray) -> float:
    mask = counts > 0
    P = M[mask] @ theta
    if np.any(P <= 0):
        return -np.inf
    return float(counts[mask] @ np.log(P))


def loglikelihood(g, model: SamplingModel, theta, conditioned: bool = False) -> float:
    """Log-likelihood of the observations ``g`` under ``theta``.

    With ``conditioned=True`` ``g`` holds counts for ``j >= 1`` only and
    ``theta`` is the observed-node distribution over the categories with
    ``X >= 1``.
    """
    counts = _counts(g)
    theta = np.asarray(theta, dtype=float)
    if conditioned:
        M = model.a_matrix()
    else:
        M = model.matrix
    if counts.shape[0] != M.shape[0] or theta.shape[0] != M.shape[1]:
        raise ValueError(f"dimension mismatch: g has {counts.shape[0]} entries, theta "
                         f"{theta.shape[0]}, model is {M.shape}")
    return _loglik(counts, M, theta)


def _q_alpha(R: np.ndarray, M: np.ndarray) -> float:
    pos = R > 0
    with np.errstate(divide="ignore"):
        return float(np.sum(R[pos] * np.log(M[pos])))


def _alpha_update(R, rows, alpha, step, design_at, design, opts: EmOptions):
    """Increase the alpha part of Q by projected gradient ascent.

    ``design_at(alpha)`` returns ``(M, dM)`` where ``dM`` is a zero-argument
    callable, so line-search trials never pay for the derivative.
    """
    total = R.sum()
    pos = R > 0
    M, dM = design
    q_cur = _q_alpha(R, M[rows])
    for _ in range(opts.alpha_inner_steps):
        Mr, dMr = M[rows], dM()[rows]
        grad = float(np.sum(R[pos] * dMr[pos] / Mr[pos])) / total
        if grad == 0.0 or (alpha <= 0 and grad < 0) or (alpha >= opts.alpha_max and grad > 0):
            break
        accepted = False
        while step > 1e-12:
            cand = float(np.clip(alpha + step * grad, 0.0, opts.alpha_max))
            cand_design = design_at(cand)
            q_cand = _q_alpha(R, cand_design[0][rows])
            if q_cand >= q_cur:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            step = opts.alpha_step
            break
        moved = abs(cand - alpha)
        alpha, (M, dM), q_cur = cand, cand_design, q_cand
        step *= 2.0
        if moved < 1e-10:
            break
    return alpha, step, (M, dM)


def _run_em(counts, design_at, theta0, alpha0, fit_alpha, opts: EmOptions):
    rows = counts > 0
    c = counts[rows]
    total = c.sum()
    if total <= 0:
        raise NoSignalError("observation vector is all zeros")
    alpha = alpha0
    step = opts.alpha_step
    design = design_at(alpha)
    theta = theta0
    ll = _loglik(counts, design[0], theta)
    trace = [ll]
    converged = False
    it = 0
    for it in range(1, opts.max_iters + 1):
        Mr = design[0][rows]
        P = Mr @ theta
        joint = Mr * theta[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            post = np.where(P[:, None] > 0, joint / P[:, None], 0.0)
        R = c[:, None] * post
        theta = R.sum(axis=0) / total
        if fit_alpha:
            alpha, step, design = _alpha_update(R, rows, alpha, step, design_at, design, opts)
        ll_new = _loglik(counts, design[0], theta)
        trace.append(ll_new)
        improvement = ll_new - ll
        ll = ll_new
        if improvement < opts.loglik_tol:
            converged = True
            break
    if not converged:
        log.debug("EM stopped after %d iterations without meeting tolerance", it)
    return theta, alpha, trace, it, converged


def _initial_theta(opts: EmOptions, k: int, observed: np.ndarray) -> np.ndarray:
    uniform = np.full(k, 1.0 / k)
    if opts.init == UNIFORM or observed.sum() <= 0:
        return uniform
    emp = observed / observed.sum()
    return 0.5 * emp + 0.5 * uniform


def _observed_in_categories(counts: np.ndarray, model: SamplingModel) -> np.ndarray:
    if model.binned:
        return bin_distribution(counts, model.W)
    return counts


def em_known_n(g, model: SamplingModel, opts: EmOptions | None = None) -> DistributionEstimate:
    """EM estimate of the distribution over ``0..W`` (or the bins).

    ``g`` must be calibrated so that ``g[0]`` includes nodes that vanished
    during sampling.
    """
    opts = opts or EmOptions()
    counts = _counts(g)
    if counts.shape[0] != model.W + 1:
        raise ValueError(f"g must have W+1 = {model.W + 1} entries, got {counts.shape[0]}")
    if counts.sum() <= 0:
        raise NoSignalError("observation vector is empty")
    fit_alpha = model.has_alpha and opts.alpha_fixed is None
    alpha0 = opts.alpha_fixed if opts.alpha_fixed is not None else opts.alpha_init
    if not model.has_alpha:
        alpha0 = model.alpha

    def design_at(a):
        m = model.with_alpha(a)
        return m.matrix, lambda: m.dalpha_matrix

    theta0 = _initial_theta(opts, model.n_categories, _observed_in_categories(counts, model))
    theta, alpha, trace, it, conv = _run_em(counts, design_at, theta0, alpha0, fit_alpha, opts)
    return DistributionEstimate(theta=theta, alpha_hat=float(alpha), loglik_trace=trace,
                                iterations=it, converged=conv, labels=model.labels,
                                binned=model.binned, known_n=True)


def _plus_counts(g, model: SamplingModel) -> np.ndarray:
    counts = _counts(g)
    if counts.shape[0] == model.W + 1:
        return counts[1:]
    if counts.shape[0] == model.W:
        return counts
    raise ValueError(f"g_plus must have W = {model.W} (or W+1) entries, got {counts.shape[0]}")


def rescale_to_theta_plus(phi, alpha: float, model: SamplingModel) -> np.ndarray:
    """Undo the detection bias: ``theta_plus`` proportional to ``phi / (1 - q)``."""
    phi = np.asarray(phi, dtype=float)
    det = 1.0 - model.with_alpha(alpha).q
    if np.any(det < 1e-12):
        raise SingularModelError("zero detection probability in rescaling")
    if np.all(det == 1.0):
        return phi.copy()
    x = phi / det
    return x / x.sum()


def phi_from_theta_plus(theta_plus, alpha: float, model: SamplingModel) -> np.ndarray:
    """Forward map: distribution of cardinalities among observed nodes."""
    theta_plus = np.asarray(theta_plus, dtype=float)
    det = 1.0 - model.with_alpha(alpha).q
    x = theta_plus * det
    return x / x.sum()


def estimate_n_plus(g_plus, theta_plus, alpha: float, model: SamplingModel) -> float:
    """Scale the observed node count up by the overall detection probability."""
    counts = _plus_counts(g_plus, model)
    q = float(model.with_alpha(alpha).q @ np.asarray(theta_plus, dtype=float))
    if q >= 1.0 - 1e-12:
        raise SingularModelError("overall detection probability is zero")
    return float(counts.sum() / (1.0 - q))


def em_unknown_n(g_plus, model: SamplingModel, opts: EmOptions | None = None) -> DistributionEstimate:
    """EM on nodes seen with at least one sampled triangle.

    Returns ``theta`` = the estimated distribution over nodes having at least
    one triangle (``phi`` is kept alongside) and ``n_plus_hat``.
    """
    opts = opts or EmOptions()
    counts = _plus_counts(g_plus, model)
    if counts.sum() <= 0:
        raise NoSignalError("no node was observed with a sampled triangle")
    fit_alpha = model.has_alpha and opts.alpha_fixed is None
    alpha0 = opts.alpha_fixed if opts.alpha_fixed is not None else opts.alpha_init
    if not model.has_alpha:
        alpha0 = model.alpha
    model.with_alpha(alpha0).a_matrix()  # raises early on a singular model

    def design_at(a):
        m = model.with_alpha(a)
        return m.a_matrix(), m.a_dalpha_matrix

    observed = _observed_in_categories(np.concatenate([[0.0], counts]), model)[1:]
    phi0 = _initial_theta(opts, model.n_categories - 1, observed)
    phi, alpha, trace, it, conv = _run_em(counts, design_at, phi0, alpha0, fit_alpha, opts)
    theta_plus = rescale_to_theta_plus(phi, alpha, model)
    n_plus = estimate_n_plus(counts, theta_plus, alpha, model)
    return DistributionEstimate(theta=theta_plus, alpha_hat=float(alpha), loglik_trace=trace,
                                iterations=it, converged=conv, labels=model.labels[1:],
                                n_plus_hat=n_plus, phi=phi, binned=model.binned, known_n=False)


def em_binned(g, model: SamplingModel, opts: EmOptions | None = None,
              known_n: bool = True) -> DistributionEstimate:
    """Same EM over logarithmic bins; ``g`` stays indexed by raw counts."""
    if not model.binned:
        from .model import bin_model
        model = bin_model(model)
    if known_n:
        return em_known_n(g, model, opts)
    return em_unknown_n(g, model, opts)


def mixture(theta_a, theta_b, c: float) -> np.ndarray:
    """Convex combination ``c * theta_a + (1 - c) * theta_b``."""
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"mixture weight must lie in [0, 1], got {c}")
    a = np.asarray(theta_a, dtype=float)
    b = np.asarray(theta_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("estimates must have equal length")
    return c * a + (1.0 - c) * b


def optimal_mixture_weight(var_a, var_b):
    """Variance-minimizing weight on ``theta_a``: ``var_b / (var_a + var_b)``.

    Returns 0.5 where both variances are zero.  Works elementwise on arrays.
    """
    va = np.asarray(var_a, dtype=float)
    vb = np.asarray(var_b, dtype=float)
    if np.any(va < 0) or np.any(vb < 0):
        raise ValueError("variances must be nonnegative")
    tot = va + vb
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(tot > 0, vb / np.where(tot > 0, tot, 1.0), 0.5)
    return float(c) if c.ndim == 0 else c
