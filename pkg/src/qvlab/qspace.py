"""Unordered Q-tuples of points with the optimal-matching metric.

A configuration is a multiset of Q points in R^n.  The distance between two
configurations is the minimum over pairings of the root-sum-square of the
pairwise distances, solved exactly.  On top of the metric this module
provides support/multiplicity queries, a scale-separated cluster selection,
and a Lipschitz semi-retraction onto configurations with prescribed
multiplicities around well-separated centers.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "QPoint",
    "ClusterSelection",
    "RetractionParams",
    "DimensionMismatchError",
    "metric_g",
    "support_with_multiplicity",
    "sigma",
    "c_of_q",
    "c2_of_q",
    "select_clusters",
    "semi_retraction",
]

# Exhaustive matching is exact and fast enough up to Q = 8 (8! = 40320);
# beyond that the O(Q^3) assignment solver takes over.
BRUTE_FORCE_MAX_Q = 8


class DimensionMismatchError(ValueError):
    """Two configurations do not share the same Q or ambient dimension."""


@dataclass(frozen=True)
class QPoint:
    """An unordered tuple of Q points in R^n.

    The stored row order is not semantic; every operation in this package is
    invariant under permutations of the rows.  The array is frozen after
    construction so values can be shared freely.
    """

    points: np.ndarray  # shape (Q, n)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"expected a (Q, n) array of points, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("all coordinates must be finite")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def q_count(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def of(cls, *values) -> "QPoint":
        """Build from scalars (n = 1) or coordinate sequences."""
        return cls(np.array([np.atleast_1d(v) for v in values], dtype=float))

    @classmethod
    def repeated(cls, value, count: int) -> "QPoint":
        """The configuration carrying one point with multiplicity `count`."""
        v = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(np.tile(v, (count, 1)))

    def sorted_values(self) -> np.ndarray:
        """Sorted coordinate values; only meaningful for n = 1."""
        if self.ambient_dim != 1:
            raise ValueError("sorted_values requires ambient dimension 1")
        return np.sort(self.points[:, 0])

    def translate(self, offset) -> "QPoint":
        return QPoint(self.points + np.atleast_1d(np.asarray(offset, dtype=float)))


def _check_compatible(a: QPoint, b: QPoint) -> None:
    if a.q_count != b.q_count or a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(
            f"incompatible configurations: ({a.q_count}, {a.ambient_dim}) vs "
            f"({b.q_count}, {b.ambient_dim})"
        )


@functools.lru_cache(maxsize=None)
def _permutation_indices(q: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(q))), dtype=np.intp)


def _pairwise_sq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def metric_g(a: QPoint, b: QPoint) -> float:
    """Optimal-matching distance between two configurations.

    Returns min over pairings sigma of (sum_i |a_i - b_sigma(i)|^2)^(1/2).
    For n = 1 the sorted pairing is optimal (squared distance is a convex
    cost), for small Q the minimum is taken over all permutations, and for
    larger Q an exact assignment solver is used.
    """
    _check_compatible(a, b)
    q = a.q_count
    if a.ambient_dim == 1:
        da = np.sort(a.points[:, 0])
        db = np.sort(b.points[:, 0])
        return float(np.sqrt(np.sum((da - db) ** 2)))
    cost = _pairwise_sq(a.points, b.points)
    if q <= BRUTE_FORCE_MAX_Q:
        perms = _permutation_indices(q)
        totals = cost[np.arange(q)[None, :], perms].sum(axis=1)
        return float(np.sqrt(totals.min()))
    rows, cols = linear_sum_assignment(cost)
    return float(np.sqrt(cost[rows, cols].sum()))


def support_with_multiplicity(a: QPoint, tol: float = 0.0) -> list[tuple[np.ndarray, int]]:
    """Cluster the points by single linkage at scale `tol`.

    Points whose chained pairwise distances stay within `tol` merge into one
    support point (tol = 0 keeps exactly coincident points together).  Each
    cluster is reported as (representative, multiplicity) where the
    representative is the lexicographically smallest member, and clusters are
    listed in lexicographic order of their representatives.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    pts = a.points
    q = a.q_count
    parent = list(range(q))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.sqrt(_pairwise_sq(pts, pts))
    for i in range(q):
        for j in range(i + 1, q):
            if dist[i, j] <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(q):
        groups.setdefault(find(i), []).append(i)
    clusters = []
    for members in groups.values():
        rep = min(members, key=lambda i: tuple(pts[i]))
        clusters.append((pts[rep].copy(), len(members)))
    clusters.sort(key=lambda item: tuple(item[0]))
    return clusters


def sigma(a: QPoint, tol: float = 0.0) -> int:
    """Number of distinct support points at clustering scale `tol`."""
    return len(support_with_multiplicity(a, tol))


def _separation_sum(q: int, k: float, terms: int) -> float:
    base = (2.0 * k) * (q - 1) ** 2
    return float(sum(base**t for t in range(terms)))


def c_of_q(q: int, k: float) -> float:
    """Geometric separation constant 1 + g + g^2 + ... + g^(Q-1), g = 2K(Q-1)^2."""
    if q < 2:
        raise ValueError("c_of_q requires Q >= 2")
    if k <= 1:
        raise ValueError("c_of_q requires K > 1")
    return _separation_sum(q, k, q)


def c2_of_q(q: int, k: float) -> float:
    """c_of_q scaled by (Q-1)^(-1/2); undefined for Q = 1."""
    if q < 2:
        raise ValueError("c2_of_q is undefined for Q < 2 (division by (Q-1)^(1/2))")
    return c_of_q(q, k) / np.sqrt(q - 1.0)


@dataclass(frozen=True)
class ClusterSelection:
    """A scale-separated grouping of a configuration.

    The configuration's Q points are grouped into `cluster_count` clusters
    with the given multiplicities around distinct centers chosen from the
    input points, together with a radius `radius` in [s0, C(Q) s0] at which
    the centers are more than 2 K radius apart.
    """

    cluster_count: int
    multiplicities: tuple[int, ...]
    centers: np.ndarray  # (J, n)
    radius: float
    s0: float
    separation_k: float

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        if centers.ndim == 1:
            centers = centers.reshape(-1, 1)
        centers = centers.copy()
        centers.flags.writeable = False
        object.__setattr__(self, "centers", centers)
        j = self.cluster_count
        if j != len(self.multiplicities) or j != centers.shape[0]:
            raise ValueError("cluster_count does not match multiplicities/centers")
        if any(k < 1 for k in self.multiplicities):
            raise ValueError("multiplicities must be positive")
        if not (0 < self.s0 <= self.radius):
            raise ValueError("radius must satisfy s0 <= radius")
        if self.separation_k <= 1:
            raise ValueError("separation_k must exceed 1")
        q = self.q_count
        if q >= 2 and self.radius > c_of_q(q, self.separation_k) * self.s0 * (1 + 1e-12):
            raise ValueError("radius exceeds C(Q) * s0")
        for i in range(j):
            for m in range(i + 1, j):
                gap = float(np.linalg.norm(centers[i] - centers[m]))
                if gap <= 2.0 * self.separation_k * self.radius:
                    raise ValueError("centers are not 2 K radius separated")

    @property
    def q_count(self) -> int:
        return int(sum(self.multiplicities))

    def collapsed(self) -> QPoint:
        """The configuration sum_j k_j [[p_j]] described by this selection."""
        rows = np.repeat(self.centers, self.multiplicities, axis=0)
        return QPoint(rows)

    def min_center_gap(self) -> float:
        if self.cluster_count < 2:
            return float("inf")
        d = np.sqrt(_pairwise_sq(self.centers, self.centers))
        iu = np.triu_indices(self.cluster_count, k=1)
        return float(d[iu].min())


def _merge_distances(pts: np.ndarray) -> np.ndarray:
    """Single-linkage merge scales: the minimum-spanning-tree edge lengths."""
    q = pts.shape[0]
    if q == 1:
        return np.empty(0)
    dist = np.sqrt(_pairwise_sq(pts, pts))
    in_tree = np.zeros(q, dtype=bool)
    best = np.full(q, np.inf)
    in_tree[0] = True
    best = dist[0].copy()
    best[0] = np.inf
    edges = []
    for _ in range(q - 1):
        nxt = int(np.argmin(np.where(in_tree, np.inf, best)))
        edges.append(best[nxt])
        in_tree[nxt] = True
        best = np.minimum(best, dist[nxt])
    return np.array(edges)


def _clusters_at_threshold(pts: np.ndarray, threshold: float) -> list[list[int]]:
    q = pts.shape[0]
    dist = np.sqrt(_pairwise_sq(pts, pts))
    parent = list(range(q))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(q):
        for j in range(i + 1, q):
            if dist[i, j] <= threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(q):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: tuple(pts[min(g, key=lambda i: tuple(pts[i]))]))


def select_clusters(a: QPoint, s0: float, separation_k: float) -> ClusterSelection:
    """Group a configuration at a radius where clusters separate cleanly.

    Walks a geometric ladder of radii r_0 = s0, r_t = s0 + 2K (Q-1)^(3/2)
    r_(t-1) and stops at the first rung whose linkage band (2K r_(t-1),
    2K r_t] contains no single-linkage merge scale.  The Q - 1 merge scales
    cannot occupy all Q disjoint bands, so the walk terminates, and at the
    stopping rung the clusters formed at threshold 2K r_(t-1) satisfy:

    - centers more than 2K r apart,
    - the collapsed configuration within r - s0 of the input (hence any z
      within s0 of the input is within r of the collapsed configuration),
    - in the single-cluster case, support diameter at most C(Q) s0 / (Q-1).
    """
    if s0 <= 0:
        raise ValueError("s0 must be positive")
    if separation_k <= 1:
        raise ValueError("separation_k must exceed 1")
    pts = a.points
    q = a.q_count
    merges = _merge_distances(pts)
    mu = 2.0 * separation_k * (q - 1) ** 1.5

    radius = s0
    threshold = 0.0
    for _ in range(q):
        ceiling = 2.0 * separation_k * radius
        if not np.any((merges > threshold) & (merges <= ceiling)):
            groups = _clusters_at_threshold(pts, threshold)
            multiplicities = tuple(len(g) for g in groups)
            centers = np.array([pts[min(g, key=lambda i: tuple(pts[i]))] for g in groups])
            return ClusterSelection(
                cluster_count=len(groups),
                multiplicities=multiplicities,
                centers=centers,
                radius=radius,
                s0=s0,
                separation_k=separation_k,
            )
        threshold = ceiling
        radius = s0 + mu * radius
    raise AssertionError("cluster search failed to terminate; this cannot happen")


@dataclass(frozen=True)
class RetractionParams:
    """Parameters of the semi-retraction around a cluster selection.

    `inner` (s1) is the radius below which configurations are left alone and
    `outer` (s2) the radius beyond which they collapse onto the centers;
    `outer` is half the minimum center gap, so the balls B(p_j, outer) are
    disjoint.
    """

    s1: float
    s2: float
    selection: ClusterSelection = field(repr=False)

    def __post_init__(self):
        if not (0 < self.s1 < self.s2):
            raise ValueError("parameters must satisfy 0 < s1 < s2")
        if not np.isfinite(self.s2):
            raise ValueError("s2 must be finite (selection needs at least two centers)")

    @classmethod
    def from_selection(cls, selection: ClusterSelection, s1: float) -> "RetractionParams":
        gap = selection.min_center_gap()
        if not np.isfinite(gap):
            raise ValueError("semi-retraction needs at least two cluster centers")
        return cls(s1=s1, s2=0.5 * gap, selection=selection)


def semi_retraction(q: QPoint, params: RetractionParams) -> QPoint:
    """Retract a configuration toward the collapsed cluster configuration.

    With rho the distance from `q` to the collapsed configuration q0, the map
    is the identity for rho <= s1, collapses everything onto the centers for
    rho >= s2, and in between moves each point toward its nearest center so
    that its new center distance is

        min(d_i, beta * min(d_i, s1)),   beta = (s2 - rho) / (s2 - s1).

    The cap by s1 puts every output point inside the s1-ball of its center
    regardless of how far stray input points sit, so the output always has
    exactly k_j points in B(p_j, s1); it also bounds the per-point movement
    rate by s1 / (s2 - s1), which keeps the sampled Lipschitz constant below
    1 + sqrt(Q) s1 / (s2 - s1).
    """
    sel = params.selection
    q0 = sel.collapsed()
    _check_compatible(q, q0)
    rho = metric_g(q, q0)
    if rho <= params.s1:
        return q
    if rho >= params.s2:
        return q0
    beta = (params.s2 - rho) / (params.s2 - params.s1)
    centers = sel.centers
    out = np.empty_like(q.points)
    for i, point in enumerate(q.points):
        gaps = np.linalg.norm(centers - point, axis=1)
        # Lexicographic tie-break keeps the map deterministic.
        candidates = np.flatnonzero(gaps == gaps.min())
        j = min(candidates, key=lambda c: tuple(centers[c]))
        d = gaps[j]
        if d == 0.0:
            out[i] = centers[j]
            continue
        new_d = min(d, beta * min(d, params.s1))
        out[i] = centers[j] + (point - centers[j]) * (new_d / d)
    return QPoint(out)


def lipschitz_bound(params: RetractionParams) -> float:
    """Stated Lipschitz bound 1 + sqrt(Q) s1 / (s2 - s1) for the retraction."""
    qn = params.selection.q_count
    return 1.0 + np.sqrt(qn) * params.s1 / (params.s2 - params.s1)
