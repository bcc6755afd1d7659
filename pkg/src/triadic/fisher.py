"""Fisher information and Cramer-Rao lower bounds for the sampling designs.

Bounds are evaluated on the support of the supplied distribution (the
coordinates with nonzero mass).  Off-support coordinates sit on the boundary
of the simplex where the bound is undefined; they are reported as NaN.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import SingularDesignError, SingularModelError
from .model import SamplingModel

MAX_CONDITION = 1e12


@dataclass
class CrlbReport:
    J: np.ndarray
    I: np.ndarray
    I_diag: np.ndarray
    rooted: np.ndarray
    params: dict
    n_used: float
    support: np.ndarray
    condition: float
    labels: list = field(default_factory=list)


def _support_mask(dist, support):
    dist = np.asarray(dist, dtype=float)
    if support is None:
        return dist > 0
    mask = np.asarray(support, dtype=bool)
    if mask.shape != dist.shape:
        raise ValueError("support mask must match the distribution shape")
    return mask


def _information(M: np.ndarray, dist: np.ndarray, size: float, mask: np.ndarray) -> np.ndarray:
    """``size * sum_j M[j,i] M[j,r] / P(Y=j)`` restricted to masked columns."""
    P = M @ dist
    Ms = M[:, mask]
    active = Ms.any(axis=1)
    if np.any(active & (P <= 0)):
        rows = np.flatnonzero(active & (P <= 0)).tolist()
        raise SingularDesignError(f"P(Y=j) = 0 for observable rows {rows}")
    Ms = Ms[active]
    w = 1.0 / P[active]
    J = size * (Ms.T * w) @ Ms
    return 0.5 * (J + J.T)


def fisher_known(theta, model: SamplingModel, n: float, support=None) -> np.ndarray:
    """Fisher information of ``theta`` from ``n`` node observations.

    Returns the matrix over the support coordinates.  With the default support
    (``theta > 0``) an identity model gives ``n * diag(1 / theta)``.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (model.n_categories,):
        raise ValueError(f"theta must have {model.n_categories} entries")
    mask = _support_mask(theta, support)
    return _information(model.matrix, theta, n, mask)


def fisher_unknown(phi, model: SamplingModel, size: float, support=None) -> np.ndarray:
    """Fisher information of ``phi`` (observed-node distribution over X >= 1).

    ``size`` is the number of observed nodes (those with at least one sampled
    triangle).  :func:`crlb_theta_plus` derives it from ``n_plus``.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (model.n_categories - 1,):
        raise ValueError(f"phi must have {model.n_categories - 1} entries")
    mask = _support_mask(phi, support)
    return _information(model.a_matrix(), phi, size, mask)


def _equilibrated_inverse(J: np.ndarray):
    d = np.sqrt(np.diag(J))
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise SingularDesignError("Fisher matrix has a nonpositive diagonal")
    Js = J / d[:, None] / d[None, :]
    cond = float(np.linalg.cond(Js))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularDesignError("Fisher matrix is numerically singular", condition=cond)
    try:
        factor = scipy.linalg.cho_factor(Js)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError("Fisher matrix is not positive definite", condition=cond) from exc
    inv = scipy.linalg.cho_solve(factor, np.eye(len(J)))
    inv = inv / d[:, None] / d[None, :]
    return 0.5 * (inv + inv.T), cond


def constrained_crlb(J: np.ndarray, theta=None) -> np.ndarray:
    """Inverse Fisher information under the constraint ``sum(theta) = 1``.

    Uses the projection form ``J^-1 - J^-1 1 (1' J^-1 1)^-1 1' J^-1``.  For a
    column-stochastic model ``J theta = n 1``, so this equals
    ``J^-1 - theta theta' / n``.  ``theta`` is accepted for symmetry with the
    bound's usual statement and only shape-checked.
    """
    if theta is not None and len(np.asarray(theta)) != len(J):
        raise ValueError("theta and J dimensions differ")
    inv, _ = _equilibrated_inverse(np.asarray(J, dtype=float))
    u = inv.sum(axis=1)
    return inv - np.outer(u, u) / u.sum()


def jacobian_H(phi, alpha: float, model: SamplingModel) -> np.ndarray:
    """Jacobian of the rescaling ``theta_plus(phi)`` with respect to ``phi``."""
    phi = np.asarray(phi, dtype=float)
    det = 1.0 - model.with_alpha(alpha).q
    if np.any(det < 1e-12):
        raise SingularModelError("zero detection probability in rescaling")
    w = 1.0 / det
    S = float(w @ phi)
    return (np.diag(w) * S - np.outer(w * phi, w)) / S ** 2


def _expand(values, mask, fill=np.nan):
    out = np.full(mask.shape, fill, dtype=float)
    out[mask] = values
    return out


def crlb_known(theta, model: SamplingModel, n: float, support=None) -> CrlbReport:
    theta = np.asarray(theta, dtype=float)
    mask = _support_mask(theta, support)
    J = fisher_known(theta, model, n, support=mask)
    inv, cond = _equilibrated_inverse(J)
    u = inv.sum(axis=1)
    I = inv - np.outer(u, u) / u.sum()
    diag = _expand(np.diag(I), mask)
    return CrlbReport(J=J, I=I, I_diag=diag, rooted=np.sqrt(np.clip(diag, 0, None)),
                      params={"model": model.to_dict() | {"matrix": None}, "theta": theta.tolist()},
                      n_used=float(n), support=mask, condition=cond, labels=model.labels)


def crlb_theta_plus(phi, alpha: float, model: SamplingModel, n_plus: float,
                    support=None) -> CrlbReport:
    """Bound on the estimation error of ``theta_plus`` when n is unknown.

    The information about ``phi`` comes from the observed nodes, of which
    there are ``n_plus * (1 - q(theta_plus))`` in expectation.  The covariance
    is transferred through the Jacobian of the rescaling map; since that
    Jacobian annihilates ``phi`` the result is already the constrained bound.
    """
    phi = np.asarray(phi, dtype=float)
    model = model.with_alpha(alpha)
    mask = _support_mask(phi, support)
    det = 1.0 - model.q
    w = 1.0 / det
    theta_plus = w * phi / (w @ phi)
    observed = n_plus * float(det @ theta_plus)
    J = fisher_unknown(phi, model, observed, support=mask)
    inv, cond = _equilibrated_inverse(J)
    H = jacobian_H(phi, alpha, model)[np.ix_(mask, mask)]
    # restricted map renormalizes over the support, which matches H on it
    I = H @ inv @ H.T
    diag = _expand(np.diag(I), mask)
    return CrlbReport(J=J, I=I, I_diag=diag, rooted=np.sqrt(np.clip(diag, 0, None)),
                      params={"model": model.to_dict() | {"matrix": None}, "phi": phi.tolist(),
                              "theta_plus": theta_plus.tolist()},
                      n_used=float(n_plus), support=mask, condition=cond,
                      labels=model.labels[1:])

