"""Sampling models P(Y=j | X=i) for the three stream samplers.

``X`` is the true number of triangles of a node and ``Y`` the number that
survive sampling.  A model is stored as a dense matrix ``B[j, i]`` with rows
``j = 0..W`` (observed counts) and one column per true-cardinality category:
``i = 0..W`` for the raw model, or the logarithmic bins ``{0}, [1,2), [2,4),
...`` for the binned model.  Every column is a probability distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import SingularModelError

BETABIN = "betabin"
SGS = "sgs"

# below this i the pmf is evaluated as a plain product
_PRODUCT_FORM_MAX_I = 30
_SINGULAR_TOL = 1e-12


def _check_prob(name, value):
    if not (0.0 < value <= 1.0):
        raise ValueError(f"{name} must lie in (0, 1], got {value!r}")


def betabin_pmf(j: int, i: int, p_tri: float, alpha: float) -> float:
    """Beta-binomial probability of ``j`` sampled triangles out of ``i``.

    ``alpha`` controls the pairwise dependence of the triangle indicators;
    ``alpha = 0`` is the binomial distribution.
    """
    if not 0 <= j <= i:
        raise ValueError(f"need 0 <= j <= i, got j={j}, i={i}")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if i > _PRODUCT_FORM_MAX_I:
        return math.exp(betabin_logpmf(j, i, p_tri, alpha))
    num = 1.0
    for s in range(j):
        num *= s * alpha + p_tri
    for s in range(i - j):
        num *= s * alpha + 1.0 - p_tri
    den = 1.0
    for s in range(i):
        den *= s * alpha + 1.0
    return math.comb(i, j) * num / den


def betabin_logpmf(j: int, i: int, p_tri: float, alpha: float) -> float:
    if not 0 <= j <= i:
        raise ValueError(f"need 0 <= j <= i, got j={j}, i={i}")
    out = math.lgamma(i + 1) - math.lgamma(j + 1) - math.lgamma(i - j + 1)
    for s in range(j):
        out += math.log(s * alpha + p_tri)
    for s in range(i - j):
        term = s * alpha + 1.0 - p_tri
        if term <= 0.0:
            return -math.inf
        out += math.log(term)
    for s in range(i):
        out -= math.log(s * alpha + 1.0)
    return out


def betabin_logpmf_dalpha(j: int, i: int, p_tri: float, alpha: float) -> float:
    """Derivative of ``log betabin_pmf`` with respect to ``alpha``."""
    if not 0 <= j <= i:
        raise ValueError(f"need 0 <= j <= i, got j={j}, i={i}")
    out = 0.0
    for s in range(1, j):
        out += s / (s * alpha + p_tri)
    for s in range(1, i - j):
        out += s / (s * alpha + 1.0 - p_tri)
    for s in range(1, i):
        out -= s / (s * alpha + 1.0)
    return out


def sgs_bji(j: int, i: int, p_n: float) -> float:
    if not 0 <= j <= i:
        raise ValueError(f"need 0 <= j <= i, got j={j}, i={i}")
    if i == 0:
        return 1.0
    if j == 0:
        return 1.0 - p_n
    if j == i:
        return p_n
    return 0.0


def _cum_log(offset: float, alpha: float, W: int) -> np.ndarray:
    """out[m] = sum_{s<m} log(s*alpha + offset), m = 0..W."""
    s = np.arange(W, dtype=float)
    with np.errstate(divide="ignore"):
        terms = np.log(s * alpha + offset)
    return np.concatenate([[0.0], np.cumsum(terms)])


def _cum_ratio(offset: float, alpha: float, W: int) -> np.ndarray:
    """out[m] = sum_{s<m} s / (s*alpha + offset); the s = 0 term is zero."""
    s = np.arange(W, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(s > 0, s / (s * alpha + offset), 0.0)
    return np.concatenate([[0.0], np.cumsum(terms)])


@lru_cache(maxsize=64)
def _grid(W: int):
    idx = np.arange(W + 1)
    j = idx[:, None]
    i = idx[None, :]
    lower = j <= i
    jj = np.broadcast_to(np.minimum(j, i), (W + 1, W + 1))
    ii = np.broadcast_to(i, (W + 1, W + 1))
    m = np.where(lower, i - j, 0)
    logc = gammaln(ii + 1.0) - gammaln(jj + 1.0) - gammaln(m + 1.0)
    return lower, jj, ii, m, logc


def betabin_matrix(p_tri: float, alpha: float, W: int) -> np.ndarray:
    """Dense ``(W+1, W+1)`` matrix ``B[j, i] = BetaBin(j | i, p_tri, alpha)``."""
    lower, jj, ii, m, logc = _grid(W)
    L1 = _cum_log(p_tri, alpha, W)
    L2 = _cum_log(1.0 - p_tri, alpha, W)
    L3 = _cum_log(1.0, alpha, W)
    with np.errstate(invalid="ignore"):
        logb = logc + L1[jj] + L2[m] - L3[ii]
    return np.where(lower, np.exp(logb), 0.0)


def betabin_dalpha_matrix(p_tri: float, alpha: float, W: int, B: np.ndarray | None = None) -> np.ndarray:
    """Elementwise derivative ``dB/dalpha`` of :func:`betabin_matrix`."""
    if B is None:
        B = betabin_matrix(p_tri, alpha, W)
    _, jj, ii, m, _ = _grid(W)
    D = (_cum_ratio(p_tri, alpha, W)[jj]
         + _cum_ratio(1.0 - p_tri, alpha, W)[m]
         - _cum_ratio(1.0, alpha, W)[ii])
    with np.errstate(invalid="ignore"):
        return np.where(B > 0, B * D, 0.0)


def sgs_matrix(p_n: float, W: int) -> np.ndarray:
    B = np.zeros((W + 1, W + 1))
    B[0, 0] = 1.0
    B[0, 1:] = 1.0 - p_n
    B[np.arange(1, W + 1), np.arange(1, W + 1)] = p_n
    return B


def n_bins(W: int) -> int:
    """Index ``K`` of the last logarithmic bin, ``floor(log2 W)``."""
    if W < 1:
        raise ValueError("W must be at least 1")
    return W.bit_length() - 1


def bin_ranges(W: int) -> list[tuple[int, int]]:
    """Inclusive cardinality ranges of bins ``k = -1, 0, ..., K``.

    The top bin is truncated at ``W``.
    """
    out = [(0, 0)]
    for k in range(n_bins(W) + 1):
        out.append((2 ** k, min(2 ** (k + 1) - 1, W)))
    return out


@lru_cache(maxsize=64)
def binning_matrix(W: int) -> np.ndarray:
    """``(W+1, K+2)`` matrix averaging raw columns uniformly within each bin."""
    ranges = bin_ranges(W)
    M = np.zeros((W + 1, len(ranges)))
    for col, (lo, hi) in enumerate(ranges):
        M[lo:hi + 1, col] = 1.0 / (hi - lo + 1)
    M.setflags(write=False)
    return M


def bin_distribution(theta, W: int | None = None) -> np.ndarray:
    """Aggregate a raw distribution over ``0..W`` into logarithmic bins."""
    theta = np.asarray(theta, dtype=float)
    if W is None:
        W = len(theta) - 1
    if len(theta) != W + 1:
        raise ValueError("theta must have W+1 entries")
    return np.array([theta[lo:hi + 1].sum() for lo, hi in bin_ranges(W)])


@dataclass(frozen=True)
class SamplingModel:
    """Observation model of one sampling design.

    ``kind`` is ``"betabin"`` (ITS and ITS-color, triangle survival
    probability ``p_tri``) or ``"sgs"`` (node sampling probability ``p_n``).
    ``alpha`` only affects the Beta-binomial kind.
    """

    kind: str
    W: int
    p_tri: float = 1.0
    p_n: float = 1.0
    alpha: float = 0.0
    binned: bool = False
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in (BETABIN, SGS):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.W < 1:
            raise ValueError("W must be at least 1")
        _check_prob("p_tri", self.p_tri)
        _check_prob("p_n", self.p_n)
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")

    @property
    def has_alpha(self) -> bool:
        return self.kind == BETABIN

    @property
    def K(self) -> int:
        return n_bins(self.W)

    @property
    def n_categories(self) -> int:
        return self.K + 2 if self.binned else self.W + 1

    @property
    def labels(self) -> list:
        """Column labels: cardinalities ``0..W`` or bin indices ``-1..K``."""
        if self.binned:
            return list(range(-1, self.K + 1))
        return list(range(self.W + 1))

    def with_alpha(self, alpha: float) -> "SamplingModel":
        if alpha == self.alpha:
            return self
        return replace(self, alpha=float(alpha))

    def _raw_matrix(self):
        if self.kind == SGS:
            return sgs_matrix(self.p_n, self.W)
        return betabin_matrix(self.p_tri, self.alpha, self.W)

    @property
    def matrix(self) -> np.ndarray:
        """``B[j, c]``: rows ``j = 0..W``, one column per category."""
        B = self._cache.get("B")
        if B is None:
            raw = self._raw_matrix()
            self._cache["raw"] = raw
            B = raw @ binning_matrix(self.W) if self.binned else raw
            B.setflags(write=False)
            self._cache["B"] = B
        return B

    @property
    def dalpha_matrix(self) -> np.ndarray:
        dB = self._cache.get("dB")
        if dB is None:
            self.matrix
            raw = self._cache["raw"]
            if self.kind == SGS:
                dB = np.zeros_like(raw)
            else:
                dB = betabin_dalpha_matrix(self.p_tri, self.alpha, self.W, B=raw)
            if self.binned:
                dB = dB @ binning_matrix(self.W)
            dB.setflags(write=False)
            self._cache["dB"] = dB
        return dB

    @property
    def q(self) -> np.ndarray:
        """Miss probabilities ``P(Y=0 | X=i)`` for the categories with X >= 1."""
        return self.matrix[0, 1:].copy()

    def _detect(self):
        det = 1.0 - self.matrix[0, 1:]
        if np.any(det < _SINGULAR_TOL):
            bad = [self.labels[1:][k] for k in np.flatnonzero(det < _SINGULAR_TOL)]
            raise SingularModelError(f"zero detection probability for categories {bad}")
        return det

    def a_matrix(self) -> np.ndarray:
        """Observation model conditioned on ``Y >= 1``, rows ``j = 1..W``."""
        return self.matrix[1:, 1:] / self._detect()[None, :]

    def a_dalpha_matrix(self) -> np.ndarray:
        det = self._detect()
        B = self.matrix[1:, 1:]
        dB = self.dalpha_matrix[1:, 1:]
        dq = self.dalpha_matrix[0, 1:]
        return (dB * det[None, :] + B * dq[None, :]) / det[None, :] ** 2

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "W": self.W,
            "p_tri": self.p_tri,
            "p_n": self.p_n,
            "alpha": self.alpha,
            "binned": self.binned,
            "labels": self.labels,
            "matrix": self.matrix.tolist(),
        }


def build_model(kind: str, W: int, *, p_tri: float = 1.0, p_n: float = 1.0,
                alpha: float = 0.0, binned: bool = False) -> SamplingModel:
    return SamplingModel(kind=kind, W=W, p_tri=p_tri, p_n=p_n, alpha=alpha, binned=binned)


def q_vector(model: SamplingModel) -> np.ndarray:
    return model.q


def a_matrix(model: SamplingModel) -> np.ndarray:
    return model.a_matrix()


def bin_model(model: SamplingModel, K: int | None = None) -> SamplingModel:
    if K is not None and K != n_bins(model.W):
        raise ValueError(f"K must equal floor(log2 W) = {n_bins(model.W)}, got {K}")
    return replace(model, binned=True)
