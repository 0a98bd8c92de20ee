"""The sigma combination of point blocks and its exact discrete pushforward.

A block of d+1 points collapses to sigma * X_1 + (1 - sigma)/(d+1) * sum(X_j),
an affine combination that stretches X_1 away from the block mean.  Applied
to i.i.d. draws it induces a transformed distribution whose covariance is
the original scaled by sigma_covariance_factor; for finite-support inputs
the transform is computed exactly by tuple enumeration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InsufficientDataError, ResourceCapError

MERGE_TOL = 1e-12
WEIGHT_TOL = 1e-12
DEFAULT_TUPLE_CAP = 10**7


def as_points(points) -> np.ndarray:
    """Validate and return an (n, d) float array of finite points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
        raise InputError(f"expected a nonempty (n, d) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InputError("points must be finite")
    return pts


def merge_close_points(points: np.ndarray, weights: np.ndarray, tol: float = MERGE_TOL):
    """Collapse points whose coordinates all match within tol, summing weights.

    Points are lexsorted, then grouped by walking adjacent rows and comparing
    against the open group's representative (its first row).  Intended for
    exact duplicates produced by symmetric affine combinations, where the
    float sums agree to well below tol.
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    wts = weights[order]
    n = len(pts)
    if n == 0:
        return pts, wts
    # Group ids: a new group starts where the row leaves the tol-box of the
    # current representative.
    rep = pts[0]
    gid = np.empty(n, dtype=np.int64)
    gid[0] = 0
    g = 0
    for i in range(1, n):
        if np.all(np.abs(pts[i] - rep) <= tol):
            gid[i] = g
        else:
            g += 1
            gid[i] = g
            rep = pts[i]
    reps = pts[np.searchsorted(gid, np.arange(g + 1))]
    summed = np.bincount(gid, weights=wts, minlength=g + 1)
    return reps, summed


def _merge_close_fast(points: np.ndarray, weights: np.ndarray, tol: float = MERGE_TOL):
    """merge_close_points for large arrays: vectorized adjacent-difference grouping.

    Slightly stricter than the representative walk (a long chain of points
    spaced just under tol merges there but may split here); both collapse
    exact duplicates, which is the case that matters.
    """
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    wts = weights[order]
    if len(pts) == 0:
        return pts, wts
    new = np.empty(len(pts), dtype=bool)
    new[0] = True
    new[1:] = np.any(np.abs(np.diff(pts, axis=0)) > tol, axis=1)
    gid = np.cumsum(new) - 1
    reps = pts[new]
    summed = np.bincount(gid, weights=wts)
    return reps, summed


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite-support distribution: support (k, d) points, weights summing to 1."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        sup = as_points(self.support)
        wts = np.asarray(self.weights, dtype=float).ravel()
        if len(wts) != len(sup):
            raise InputError("support and weights lengths differ")
        if np.any(wts < 0) or not np.all(np.isfinite(wts)):
            raise InputError("weights must be finite and >= 0")
        if abs(wts.sum() - 1.0) > WEIGHT_TOL:
            raise InputError(f"weights must sum to 1 within {WEIGHT_TOL}, got {wts.sum()!r}")
        merged, _ = _merge_close_fast(sup, wts)
        if len(merged) != len(sup):
            raise InputError("support points must be pairwise distinct (tol 1e-12)")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "weights", wts)

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    def mean(self) -> np.ndarray:
        return self.weights @ self.support

    def cov(self) -> np.ndarray:
        centered = self.support - self.mean()
        return (centered * self.weights[:, None]).T @ centered

    def to_json(self) -> str:
        return json.dumps(
            {"support": self.support.tolist(), "weights": self.weights.tolist()}
        )

    @staticmethod
    def from_json(text: str) -> "DiscreteDistribution":
        try:
            obj = json.loads(text)
            return DiscreteDistribution(
                np.asarray(obj["support"], dtype=float),
                np.asarray(obj["weights"], dtype=float),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad distribution JSON: {exc}") from exc


def uniform_on(points) -> DiscreteDistribution:
    pts = as_points(points)
    k = len(pts)
    return DiscreteDistribution(pts, np.full(k, 1.0 / k))


def point_mass(point) -> DiscreteDistribution:
    pts = as_points(np.asarray(point, dtype=float)[None, :])
    return DiscreteDistribution(pts, np.ones(1))


def check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not (np.isfinite(sigma) and sigma > 0):
        raise InputError(f"sigma must be finite and > 0, got {sigma}")
    return sigma


def sigma_combine(block, sigma: float) -> np.ndarray:
    """Collapse a block of d+1 points in R^d to one point.

    Returns sigma * X_1 + (1 - sigma)/(d+1) * sum_j X_j, the first point
    pushed away from the block mean; sigma = 1 returns X_1 unchanged.
    """
    sigma = check_sigma(sigma)
    pts = as_points(block)
    k, d = pts.shape
    if k != d + 1:
        raise InputError(f"block must hold d+1 points in R^d, got {k} points in R^{d}")
    return sigma * pts[0] + (1.0 - sigma) / k * pts.sum(axis=0)


def sample_sigma_blocks(data, sigma: float) -> np.ndarray:
    """Collapse consecutive disjoint blocks of d+1 data points.

    The first k*(d+1) rows, k = floor(n/(d+1)), are split in data order into
    k blocks; each yields one combined point (first element of the block
    privileged).  Trailing points are unused.  Deterministic in data order.
    """
    sigma = check_sigma(sigma)
    pts = as_points(data)
    n, d = pts.shape
    p = d + 1
    if n < p:
        raise InsufficientDataError(f"need at least d+1 = {p} points, got {n}")
    k = n // p
    blocks = pts[: k * p].reshape(k, p, d)
    return sigma * blocks[:, 0, :] + (1.0 - sigma) / p * blocks.sum(axis=1)


def sigma_covariance_factor(d: int, sigma: float) -> float:
    """Covariance multiplier of the transformed distribution: sigma^2 + (1-sigma^2)/(d+1)."""
    sigma = check_sigma(sigma)
    if int(d) != d or d < 1:
        raise InputError(f"d must be a positive integer, got {d}")
    return sigma**2 + (1.0 - sigma**2) / (d + 1)


def discrete_sigma_transform(
    P: DiscreteDistribution, sigma: float, cap: int = DEFAULT_TUPLE_CAP
) -> DiscreteDistribution:
    """Exact pushforward of P under the sigma combination of d+1 i.i.d. draws.

    Enumerates all |support|^(d+1) index tuples (leader first), maps each
    block through sigma_combine, accumulates product weights, and merges
    coincident outputs (coordinates within 1e-12).
    """
    sigma = check_sigma(sigma)
    sup = P.support
    wts = P.weights
    s, d = sup.shape
    p = d + 1
    total = s**p
    if total > cap:
        raise ResourceCapError(
            f"{s}^{p} = {total} tuples exceeds the cap {cap}; raise cap explicitly"
        )

    w_tail = (1.0 - sigma) / p
    out_pts = np.empty((total, d))
    out_wts = np.empty(total)
    # Unrank tuple ids into base-s digits chunk by chunk; digit 0 is the leader.
    chunk = max(1, min(total, 2**20))
    divisors = s ** np.arange(p - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        ids = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (ids[:, None] // divisors) % s
        pts = sup[digits]
        out_pts[start : start + len(ids)] = (
            sigma * pts[:, 0, :] + w_tail * pts.sum(axis=1)
        )
        out_wts[start : start + len(ids)] = np.prod(wts[digits], axis=1)

    merged_pts, merged_wts = _merge_close_fast(out_pts, out_wts)
    # Renormalize away accumulated rounding before the constructor's sum check.
    merged_wts = merged_wts / merged_wts.sum()
    return DiscreteDistribution(merged_pts, merged_wts)


def discrete_convolution(
    P: DiscreteDistribution,
    Q: DiscreteDistribution,
    coeffs=(1.0, 1.0),
    cap: int = DEFAULT_TUPLE_CAP,
) -> DiscreteDistribution:
    """Exact distribution of a*X + b*Y for independent X ~ P, Y ~ Q."""
    a, b = (float(c) for c in coeffs)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise InputError("coefficients must be finite")
    if P.dim != Q.dim:
        raise InputError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    kp, kq = len(P.support), len(Q.support)
    if kp * kq > cap:
        raise ResourceCapError(f"support product {kp}*{kq} exceeds the cap {cap}")
    pts = (a * P.support)[:, None, :] + (b * Q.support)[None, :, :]
    wts = P.weights[:, None] * Q.weights[None, :]
    merged_pts, merged_wts = merge_close_points(
        pts.reshape(kp * kq, P.dim), wts.ravel()
    )
    merged_wts = merged_wts / merged_wts.sum()
    return DiscreteDistribution(merged_pts, merged_wts)


def affine_image(P: DiscreteDistribution, scale, shift) -> DiscreteDistribution:
    """Exact distribution of scale * X + shift (scale scalar or (d, d) matrix)."""
    shift = np.asarray(shift, dtype=float).ravel()
    if shift.size != P.dim:
        raise InputError("shift dimension mismatch")
    scale = np.asarray(scale, dtype=float)
    if scale.ndim == 0:
        pts = float(scale) * P.support + shift
    elif scale.shape == (P.dim, P.dim):
        pts = P.support @ scale.T + shift
    else:
        raise InputError("scale must be a scalar or a (d, d) matrix")
    merged_pts, merged_wts = merge_close_points(pts, P.weights)
    merged_wts = merged_wts / merged_wts.sum()
    return DiscreteDistribution(merged_pts, merged_wts)
