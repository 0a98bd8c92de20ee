"""Point-in-simplex predicates, simplex enlargement, and hull membership.

Simplices are float arrays of shape (d+1, d): one vertex per row.  Points
are 1-D arrays of length d.  Containment is tested on the closed simplex
with a small slack ``eps`` applied to the barycentric coordinates, so a
point exactly on a facet counts as inside regardless of rounding.

Degenerate (affinely dependent) simplices are legal: containment then
falls back to convex-hull membership of the vertex set, so duplicated
data points behave deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import InputError

# Slack on barycentric coordinates for closed-simplex containment.
DEFAULT_EPS = 1e-9
# Relative determinant threshold below which a vertex matrix counts as singular.
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class GeomTolerance:
    """Absolute slack applied to barycentric coordinates (eps >= 0)."""

    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not (np.isfinite(self.eps) and self.eps >= 0):
            raise InputError(f"eps must be finite and >= 0, got {self.eps}")


def as_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1 or x.size < 1 or not np.all(np.isfinite(x)):
        raise InputError("point must be a finite 1-D coordinate vector")
    return x


def as_simplex(vertices) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2 or v.shape[0] != v.shape[1] + 1:
        raise InputError(f"simplex needs d+1 vertices in R^d, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError("simplex vertices must be finite")
    return v


def bary_affine_parts(verts: np.ndarray):
    """Det-scaled barycentric coordinates as affine maps of the query point.

    For a batch of simplices (m, d+1, d) the coordinates of a query x
    satisfy alpha(x) * det = const + lin @ x.  Returns (const (m, d+1),
    lin (m, d+1, d), det (m,), scale (m,)) where scale is the Hadamard
    bound of the homogeneous vertex matrix, used for the relative
    singularity test |det| <= PIVOT_RTOL * scale.

    Closed forms for d = 1, 2 keep the hot paths division-free; larger d
    goes through batched LAPACK.
    """
    verts = np.asarray(verts, dtype=float)
    m, k, d = verts.shape
    if k != d + 1:
        raise InputError(f"expected (m, d+1, d) vertex array, got {verts.shape}")

    # Hadamard bound: product of row norms of [[coords], [1 ... 1]].
    scale = np.sqrt(k) * np.prod(np.linalg.norm(verts, axis=1), axis=1)

    if d == 1:
        a = verts[:, 0, 0]
        b = verts[:, 1, 0]
        det = a - b
        const = np.stack([-b, a], axis=1)
        lin = np.empty((m, 2, 1))
        lin[:, 0, 0] = 1.0
        lin[:, 1, 0] = -1.0
        return const, lin, det, scale

    if d == 2:
        ax, ay = verts[:, 0, 0], verts[:, 0, 1]
        bx, by = verts[:, 1, 0], verts[:, 1, 1]
        cx, cy = verts[:, 2, 0], verts[:, 2, 1]
        const = np.stack(
            [bx * cy - by * cx, cx * ay - cy * ax, ax * by - ay * bx], axis=1
        )
        lin = np.empty((m, 3, 2))
        lin[:, 0, 0] = by - cy
        lin[:, 0, 1] = cx - bx
        lin[:, 1, 0] = cy - ay
        lin[:, 1, 1] = ax - cx
        lin[:, 2, 0] = ay - by
        lin[:, 2, 1] = bx - ax
        det = const.sum(axis=1)
        return const, lin, det, scale

    # Generic path: alpha = M^{-1} [x; 1]; multiply through by det.
    M = np.empty((m, k, k))
    M[:, :d, :] = verts.transpose(0, 2, 1)
    M[:, d, :] = 1.0
    det = np.linalg.det(M)
    good = np.abs(det) > PIVOT_RTOL * scale
    adj = np.zeros_like(M)
    if np.any(good):
        adj[good] = np.linalg.inv(M[good]) * det[good, None, None]
    const = adj[:, :, d].copy()
    lin = adj[:, :, :d].copy()
    return const, lin, det, scale


def barycentric_coordinates(simplex, x):
    """Barycentric coordinates of x in the simplex, or None if degenerate.

    The returned alpha satisfies sum(alpha) = 1 and alpha @ vertices = x.
    None signals an affinely dependent vertex set (relative determinant
    below PIVOT_RTOL).
    """
    v = as_simplex(simplex)
    x = as_point(x)
    if x.size != v.shape[1]:
        raise InputError(f"point dim {x.size} != simplex dim {v.shape[1]}")
    const, lin, det, scale = bary_affine_parts(v[None])
    if abs(det[0]) <= PIVOT_RTOL * scale[0]:
        return None
    return (const[0] + lin[0] @ x) / det[0]


def enlarge_simplex(simplex, sigma: float) -> np.ndarray:
    """Dilate a simplex by factor sigma about its vertex centroid.

    Each vertex maps to c + sigma * (v - c) with c the centroid, which is
    therefore preserved exactly; sigma = 1 is the identity.
    """
    v = as_simplex(simplex)
    if not (np.isfinite(sigma) and sigma > 0):
        raise InputError(f"sigma must be finite and > 0, got {sigma}")
    c = v.mean(axis=0)
    return c + sigma * (v - c)


def enlarge_batch(verts: np.ndarray, sigma: float) -> np.ndarray:
    """enlarge_simplex over a stacked (m, d+1, d) batch."""
    if sigma == 1.0:
        return verts
    c = verts.mean(axis=1, keepdims=True)
    return c + sigma * (verts - c)


def convex_hull_contains(points, x, tol: GeomTolerance = GeomTolerance()) -> bool:
    """True iff x lies within tol.eps of the convex hull of the points.

    Decided by the feasibility program  sum(lam_i * p_i) = x, sum(lam) = 1,
    lam >= 0, relaxed to minimal sup-norm residual t; membership is t <= eps.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InputError("hull needs a nonempty (k, d) point array")
    if not np.all(np.isfinite(pts)):
        raise InputError("hull points must be finite")
    x = as_point(x)
    k, d = pts.shape
    if x.size != d:
        raise InputError(f"point dim {x.size} != hull dim {d}")

    if d == 1:
        return pts.min() - tol.eps <= x[0] <= pts.max() + tol.eps

    # min t  s.t.  -t <= (lam @ pts - x)_j <= t,  sum(lam) = 1,  lam >= 0
    c = np.zeros(k + 1)
    c[-1] = 1.0
    A_ub = np.zeros((2 * d, k + 1))
    A_ub[:d, :k] = pts.T
    A_ub[d:, :k] = -pts.T
    A_ub[:, -1] = -1.0
    b_ub = np.concatenate([x, -x])
    A_eq = np.zeros((1, k + 1))
    A_eq[0, :k] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], method="highs")
    if not res.success:
        # HiGHS only fails here on numerically hopeless input; treat as outside.
        return False
    return res.fun <= tol.eps + 1e-12


def simplex_contains(simplex, x, tol: GeomTolerance = GeomTolerance()) -> bool:
    """Closed-simplex membership with barycentric slack tol.eps.

    Degenerate simplices fall back to hull membership of the vertex set.
    """
    v = as_simplex(simplex)
    x = as_point(x)
    if x.size != v.shape[1]:
        raise InputError(f"point dim {x.size} != simplex dim {v.shape[1]}")
    batch = SimplexBatch(v[None], eps=tol.eps)
    return bool(batch.contains_counts(x[None])[0])


class SimplexBatch:
    """Containment counting against a fixed stack of simplices.

    Precomputes the det-scaled barycentric affine maps once, then counts
    containments for many query points by chunked matrix products.  The
    per-simplex decision is: all d+1 barycentric coordinates >= t(sigma)
    where t(sigma) = (1-sigma)/(d+1) - eps*sigma, which is exactly closed
    membership (with slack eps) in the simplex dilated by sigma about its
    centroid, without touching the vertices.  sigma=1 gives the plain
    closed-simplex test.  Degenerate members are decided by hull fallback
    on the dilated vertex set.

    The t(sigma) threshold is monotone in sigma even in float arithmetic
    (products and sums of monotone terms), so containment indicators never
    flicker across a sigma sweep.
    """

    # Cap on the (queries x simplices) temporary, in elements.
    _CHUNK_ELEMS = 2**21

    def __init__(self, verts: np.ndarray, eps: float = DEFAULT_EPS, sigma: float = 1.0):
        verts = np.asarray(verts, dtype=float)
        self.m, k, self.d = verts.shape
        self.eps = float(eps)
        self.sigma = float(sigma)
        const, lin, det, scale = bary_affine_parts(verts)
        degenerate = np.abs(det) <= PIVOT_RTOL * scale
        self._good = ~degenerate
        sign = np.where(det < 0, -1.0, 1.0)
        t = (1.0 - self.sigma) / k - self.eps * self.sigma
        # Build the decision ingredients only for nonsingular members.
        self._const = const[self._good] * sign[self._good, None]
        self._lin = lin[self._good] * sign[self._good, None, None]
        self._thr = t * np.abs(det[self._good])
        self._degenerate_verts = enlarge_batch(verts[degenerate], self.sigma)

    @property
    def n_degenerate(self) -> int:
        return len(self._degenerate_verts)

    def contains_counts(self, X: np.ndarray) -> np.ndarray:
        """Number of member simplices containing each query row of X (q, d)."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        q = X.shape[0]
        counts = np.zeros(q, dtype=np.int64)

        mg = len(self._const)
        if mg:
            q_chunk = max(1, self._CHUNK_ELEMS // max(mg, 1))
            m_chunk = self._CHUNK_ELEMS
            for qs in range(0, q, q_chunk):
                Xc = X[qs : qs + q_chunk]
                for ms in range(0, mg, m_chunk):
                    lin = self._lin[ms : ms + m_chunk]
                    val = np.einsum("mkd,qd->qmk", lin, Xc)
                    val += self._const[ms : ms + m_chunk]
                    ok = (val >= self._thr[ms : ms + m_chunk, None]).all(axis=2)
                    counts[qs : qs + q_chunk] += ok.sum(axis=1)

        if len(self._degenerate_verts):
            tol = GeomTolerance(eps=self.eps)
            for dv in self._degenerate_verts:
                span = np.abs(dv - dv[0]).max()
                if span <= 1e-12:
                    # Point-like simplex: sup-norm distance test, no LP needed.
                    inside = np.abs(X - dv[0]).max(axis=1) <= self.eps
                    counts += inside.astype(np.int64)
                else:
                    for i in range(X.shape[0]):
                        if convex_hull_contains(dv, X[i], tol):
                            counts[i] += 1
        return counts
