"""Multi-branch piecewise-affine functions on an interval.

A codimension-one Q-branch function is stored as Q sorted real branches over
a shared breakpoint grid.  Because branches are piecewise affine, Dirichlet
energies are closed-form sums, segment by segment, and the interval
minimizer for given boundary tuples is the sorted linear interpolation whose
energy equals the squared matching distance of the boundary tuples divided
by the interval length.  On top of the exact energies this module provides
the three minimality audits (multiplicative factor, radius-dependent excess,
additive power-law allowance) and an empirical energy-decay exponent.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

import numpy as np

from .qspace import QPoint

__all__ = [
    "PiecewiseAffineQ",
    "StepWeight",
    "AuditRecord",
    "MinimalityReport",
    "DomainError",
    "EmptyIntervalError",
    "UnsupportedCodimensionError",
    "UndefinedExponentError",
    "evaluate",
    "branch_values",
    "dirichlet_energy",
    "exact_minimizer",
    "minimizer_energy",
    "matching_distance_sq",
    "quasi_k_ratio",
    "omega_profile",
    "omega_report",
    "almost_deficiency",
    "energy_decay_exponent",
    "audit_intervals",
    "rescale_domain",
]


class DomainError(ValueError):
    """A query point or ball leaves the function's domain."""


class EmptyIntervalError(ValueError):
    """An energy was requested over an empty or reversed interval."""


class UnsupportedCodimensionError(ValueError):
    """Only real-valued branches (ambient dimension 1) are supported."""


class UndefinedExponentError(ValueError):
    """Decay exponent requested where the base energy vanishes."""


@dataclass(frozen=True)
class PiecewiseAffineQ:
    """Q sorted piecewise-affine real branches over shared breakpoints.

    Invariants: breakpoints strictly increase, branch values are finite and
    sorted ascending at every breakpoint.  Affine interpolation of sorted
    columns stays sorted, so the induced multi-branch map is continuous.
    """

    breakpoints: np.ndarray  # (m,)
    branches: np.ndarray  # (Q, m)

    def __post_init__(self):
        bps = np.asarray(self.breakpoints, dtype=float)
        br = np.asarray(self.branches, dtype=float)
        if br.ndim == 1:
            br = br.reshape(1, -1)
        if bps.ndim != 1 or bps.size < 2:
            raise ValueError("need at least two breakpoints")
        if br.shape != (br.shape[0], bps.size):
            raise ValueError("branches must have one column per breakpoint")
        if not np.all(np.isfinite(bps)) or not np.all(np.isfinite(br)):
            raise ValueError("breakpoints and branch values must be finite")
        if not np.all(np.diff(bps) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if br.shape[0] > 1 and not np.all(np.diff(br, axis=0) >= 0):
            raise ValueError("branch values must be sorted at every breakpoint")
        bps = bps.copy()
        br = br.copy()
        bps.flags.writeable = False
        br.flags.writeable = False
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "branches", br)

    @property
    def q_count(self) -> int:
        return self.branches.shape[0]

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def slopes(self) -> np.ndarray:
        """Per-branch slopes on each segment, shape (Q, m - 1)."""
        return np.diff(self.branches, axis=1) / np.diff(self.breakpoints)

    def energy_prefix(self) -> np.ndarray:
        """Cumulative energy integral at the breakpoints.

        Energies over subintervals are differences of shared prefix values,
        so additivity over adjacent intervals holds to rounding.
        """
        seg = np.diff(self.breakpoints)
        density = (self.slopes() ** 2).sum(axis=0)
        return np.concatenate(([0.0], np.cumsum(density * seg)))


@dataclass(frozen=True)
class StepWeight:
    """Piecewise-constant positive weight: values[i] on (knots[i], knots[i+1])."""

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if knots.ndim != 1 or values.ndim != 1 or knots.size != values.size + 1:
            raise ValueError("need k+1 knots for k weight values")
        if not np.all(np.diff(knots) > 0):
            raise ValueError("weight knots must be strictly increasing")
        if not np.all(values > 0):
            raise ValueError("weight values must be positive")
        knots = knots.copy()
        values = values.copy()
        knots.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def value_at(self, x: np.ndarray) -> np.ndarray:
        idx = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, self.values.size - 1)
        return self.values[idx]


def _check_in_domain(u: PiecewiseAffineQ, x) -> None:
    lo, hi = u.domain
    x = np.asarray(x, dtype=float)
    if np.any(x < lo) or np.any(x > hi):
        raise DomainError(f"point outside domain [{lo}, {hi}]")


def branch_values(u: PiecewiseAffineQ, x) -> np.ndarray:
    """Sorted branch values at x (scalar or array); shape (Q,) + x.shape."""
    _check_in_domain(u, x)
    return np.stack([np.interp(x, u.breakpoints, row) for row in u.branches])


def evaluate(u: PiecewiseAffineQ, x: float) -> QPoint:
    """Value of the multi-branch function at x as an unordered tuple."""
    vals = branch_values(u, float(x))
    return QPoint(vals.reshape(u.q_count, 1))


def energy_between(u: PiecewiseAffineQ, a, b, prefix: Optional[np.ndarray] = None) -> np.ndarray:
    """Vectorized Dirichlet energy over intervals (a_i, b_i)."""
    if prefix is None:
        prefix = u.energy_prefix()
    pa = np.interp(a, u.breakpoints, prefix)
    pb = np.interp(b, u.breakpoints, prefix)
    return pb - pa


def dirichlet_energy(
    u: PiecewiseAffineQ,
    a: float,
    b: float,
    weight: Optional[StepWeight] = None,
) -> float:
    """Exact Dirichlet energy of u over [a, b], optionally weighted.

    Computed in closed form segment by segment, never by quadrature; the
    unweighted value is a difference of shared prefix sums, so it is
    additive over adjacent intervals to rounding.
    """
    if a >= b:
        raise EmptyIntervalError(f"empty interval [{a}, {b}]")
    _check_in_domain(u, [a, b])
    if weight is None:
        return float(energy_between(u, a, b))
    cuts = np.concatenate((u.breakpoints, weight.knots, [a, b]))
    cuts = np.unique(cuts)
    cuts = cuts[(cuts >= a) & (cuts <= b)]
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    seg_idx = np.clip(np.searchsorted(u.breakpoints, mids, side="right") - 1, 0, len(u.breakpoints) - 2)
    density = (u.slopes() ** 2).sum(axis=0)[seg_idx]
    return float(np.sum(weight.value_at(mids) * density * np.diff(cuts)))


def matching_distance_sq(u: PiecewiseAffineQ, a, b) -> np.ndarray:
    """Squared matching distance between u(a) and u(b), vectorized.

    Branches are stored sorted, so the sorted pairing of the endpoint
    values, which is optimal in one dimension, is a direct column
    difference.
    """
    va = branch_values(u, a)
    vb = branch_values(u, b)
    return ((vb - va) ** 2).sum(axis=0)


def exact_minimizer(boundary_a: QPoint, boundary_b: QPoint, a: float, b: float) -> PiecewiseAffineQ:
    """The least-energy multi-branch function with the given boundary tuples.

    Sorts both boundary tuples and joins i-th value to i-th value by straight
    lines.  Its energy is the squared matching distance of the boundary
    tuples divided by (b - a) and is minimal among all competitors sharing
    the boundary values.
    """
    if boundary_a.ambient_dim != 1 or boundary_b.ambient_dim != 1:
        raise UnsupportedCodimensionError("interval minimizers exist in closed form only for n = 1")
    if boundary_a.q_count != boundary_b.q_count:
        raise ValueError("boundary tuples must share Q")
    if not a < b:
        raise EmptyIntervalError(f"empty interval [{a}, {b}]")
    va = boundary_a.sorted_values()
    vb = boundary_b.sorted_values()
    return PiecewiseAffineQ(np.array([a, b]), np.column_stack((va, vb)))


def minimizer_energy(boundary_a: QPoint, boundary_b: QPoint, a: float, b: float) -> float:
    """Closed-form minimal energy: squared matching distance over (b - a)."""
    if not a < b:
        raise EmptyIntervalError(f"empty interval [{a}, {b}]")
    va = boundary_a.sorted_values()
    vb = boundary_b.sorted_values()
    return float(np.sum((vb - va) ** 2) / (b - a))


class AuditRecord(NamedTuple):
    center: float
    radius: float
    dir_u: float
    dir_min: float
    figure_of_merit: float


@dataclass
class MinimalityReport:
    """Per-ball audit records plus the supremum and its witness.

    mode is one of {"quasi_k", "omega", "almost"}; `figure` holds the
    ratio (quasi_k, omega) or deficiency (almost) per record.  Records are
    stored columnar because audit families run to millions of intervals.
    """

    mode: str
    centers: np.ndarray
    radii: np.ndarray
    dir_u: np.ndarray
    dir_min: np.ndarray
    figure: np.ndarray
    supremum: float
    witness: Optional[AuditRecord]
    alpha: Optional[float] = None

    def rows(self) -> Iterator[AuditRecord]:
        for c, r, du, dm, f in zip(self.centers, self.radii, self.dir_u, self.dir_min, self.figure):
            yield AuditRecord(float(c), float(r), float(du), float(dm), float(f))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["center", "radius", "dir_u", "dir_min", "figure_of_merit"])
            for rec in self.rows():
                writer.writerow([repr(v) for v in rec])

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "alpha": self.alpha,
            "supremum": _json_float(self.supremum),
            "witness": None if self.witness is None else {
                "center": self.witness.center,
                "radius": self.witness.radius,
                "dir_u": self.witness.dir_u,
                "dir_min": self.witness.dir_min,
                "figure_of_merit": _json_float(self.witness.figure_of_merit),
            },
            "records": [
                {
                    "center": rec.center,
                    "radius": rec.radius,
                    "dir_u": rec.dir_u,
                    "dir_min": rec.dir_min,
                    "figure_of_merit": _json_float(rec.figure_of_merit),
                }
                for rec in self.rows()
            ],
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _json_float(x: float):
    # Strict JSON has no Infinity literal; keep the schema parseable.
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _witness_index(centers, radii, figure, supremum) -> int:
    """Index of the extremal record; ties go to the smallest (a, b)."""
    hits = np.flatnonzero(figure == supremum)
    a = centers[hits] - radii[hits]
    b = centers[hits] + radii[hits]
    return int(hits[np.lexsort((b, a))[0]])


def _build_report(mode, centers, radii, dir_u, dir_min, figure, alpha=None) -> MinimalityReport:
    if figure.size == 0:
        return MinimalityReport(mode, centers, radii, dir_u, dir_min, figure, 0.0, None, alpha)
    supremum = float(np.max(figure))
    idx = _witness_index(centers, radii, figure, supremum)
    witness = AuditRecord(
        float(centers[idx]), float(radii[idx]), float(dir_u[idx]), float(dir_min[idx]), float(figure[idx])
    )
    return MinimalityReport(mode, centers, radii, dir_u, dir_min, figure, supremum, witness, alpha)


def _interval_arrays(intervals) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(list(intervals), dtype=float) if not isinstance(intervals, np.ndarray) else intervals
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("intervals must be an iterable of (a, b) pairs")
    if np.any(arr[:, 0] >= arr[:, 1]):
        raise EmptyIntervalError("intervals must satisfy a < b")
    return arr[:, 0], arr[:, 1]


def quasi_k_ratio(u: PiecewiseAffineQ, intervals: Iterable[tuple[float, float]]) -> MinimalityReport:
    """Multiplicative minimality audit over a family of intervals.

    Per interval the figure of merit is (b - a) Dir(u) / G^2(u(b), u(a)),
    i.e. the energy of u relative to the interval minimizer with the same
    boundary tuples.  A positive energy over an interval with identical
    boundary tuples yields +inf (the function cannot be a bounded-factor
    minimizer); zero energy over such an interval carries no information and
    the interval is skipped.
    """
    a, b = _interval_arrays(intervals)
    _check_in_domain(u, np.concatenate((a, b)))
    prefix = u.energy_prefix()
    dir_u = energy_between(u, a, b, prefix)
    gsq = matching_distance_sq(u, a, b)
    keep = ~((gsq == 0.0) & (dir_u == 0.0))
    a, b, dir_u, gsq = a[keep], b[keep], dir_u[keep], gsq[keep]
    with np.errstate(divide="ignore"):
        ratio = np.where(gsq > 0.0, (b - a) * dir_u / np.where(gsq > 0.0, gsq, 1.0), np.inf)
    dir_min = np.where(gsq > 0.0, gsq / (b - a), 0.0)
    return _build_report("quasi_k", 0.5 * (a + b), 0.5 * (b - a), dir_u, dir_min, ratio)


def omega_report(u: PiecewiseAffineQ, radii, centers) -> MinimalityReport:
    """Excess-over-minimizer audit: figure = Dir(u)/Dir_min - 1 per ball."""
    rs = np.asarray(list(radii), dtype=float)
    xs = np.asarray(list(centers), dtype=float)
    pairs = np.array([(x, r) for r in rs for x in xs])
    x, r = pairs[:, 0], pairs[:, 1]
    a, b = x - r, x + r
    _check_in_domain(u, np.concatenate((a, b)))
    prefix = u.energy_prefix()
    dir_u = energy_between(u, a, b, prefix)
    gsq = matching_distance_sq(u, a, b)
    dir_min = gsq / (2.0 * r)
    keep = ~((dir_min == 0.0) & (dir_u == 0.0))
    x, r, dir_u, dir_min = x[keep], r[keep], dir_u[keep], dir_min[keep]
    with np.errstate(divide="ignore"):
        omega = np.where(dir_min > 0.0, dir_u / np.where(dir_min > 0.0, dir_min, 1.0) - 1.0, np.inf)
    return _build_report("omega", x, r, dir_u, dir_min, omega)


def omega_profile(u: PiecewiseAffineQ, radii, centers) -> dict[float, float]:
    """Empirical excess profile: r -> sup over centers of Dir/Dir_min - 1."""
    out: dict[float, float] = {}
    for r in radii:
        report = omega_report(u, [r], centers)
        if report.figure.size == 0:
            continue
        out[float(r)] = report.supremum
    return out


def almost_deficiency(u: PiecewiseAffineQ, alpha: float, balls) -> MinimalityReport:
    """Additive-allowance audit with allowance c r^(alpha - 1) in 1D.

    Per ball the deficiency is max(0, Dir(u) - Dir_min) r^(1 - alpha); the
    supremum over the family is the smallest constant c certified by the
    family.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    arr = np.asarray(list(balls), dtype=float)
    x, r = arr[:, 0], arr[:, 1]
    a, b = x - r, x + r
    _check_in_domain(u, np.concatenate((a, b)))
    prefix = u.energy_prefix()
    dir_u = energy_between(u, a, b, prefix)
    dir_min = matching_distance_sq(u, a, b) / (2.0 * r)
    deficiency = np.maximum(0.0, dir_u - dir_min) * r ** (1.0 - alpha)
    return _build_report("almost", x, r, dir_u, dir_min, deficiency, alpha=alpha)


def energy_decay_exponent(u: PiecewiseAffineQ, z: float, r0: float, scales) -> float:
    """Least-squares slope of log Dir(u; (z - s r0, z + s r0)) against log s.

    For a function minimizing up to factor K the slope cannot drop below
    1 / (K Q) over shrinking balls.
    """
    scales = np.asarray(list(scales), dtype=float)
    if np.any(scales <= 0) or np.any(scales > 1):
        raise ValueError("scales must lie in (0, 1]")
    _check_in_domain(u, [z - r0, z + r0])
    base = dirichlet_energy(u, z - r0, z + r0)
    if base <= 0.0:
        raise UndefinedExponentError("zero energy at the base radius")
    prefix = u.energy_prefix()
    energies = energy_between(u, z - scales * r0, z + scales * r0, prefix)
    keep = energies > 0.0
    if np.count_nonzero(keep) < 2:
        raise UndefinedExponentError("not enough scales with positive energy for a fit")
    slope = np.polyfit(np.log(scales[keep]), np.log(energies[keep]), 1)[0]
    return float(slope)


def audit_intervals(
    u: PiecewiseAffineQ,
    depth: int = 12,
    include_breakpoint_pairs: bool = True,
    dyadic: bool = True,
    triadic: bool = True,
) -> np.ndarray:
    """Standard interval family for the audits, as an (m, 2) array.

    All breakpoint pairs, plus the cells of dyadic and triadic refinements
    of the domain down to `depth`.  Extrema of the audited figures for the
    shipped constructions occur at construction-aligned intervals, and the
    triadic cells align with the ternary refinements.
    """
    lo, hi = u.domain
    blocks = []
    if include_breakpoint_pairs:
        bps = u.breakpoints
        i, j = np.triu_indices(bps.size, k=1)
        blocks.append(np.column_stack((bps[i], bps[j])))
    for base, enabled in ((2, dyadic), (3, triadic)):
        if not enabled:
            continue
        for d in range(depth + 1):
            edges = lo + (hi - lo) * np.arange(base**d + 1) / base**d
            blocks.append(np.column_stack((edges[:-1], edges[1:])))
    return np.concatenate(blocks, axis=0)


def rescale_domain(u: PiecewiseAffineQ, scale: float) -> PiecewiseAffineQ:
    """Stretch the domain by `scale` > 0, keeping branch values."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    return PiecewiseAffineQ(u.breakpoints * scale, u.branches)
