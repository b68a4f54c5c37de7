"""Trace-convex sets: hulls, separation, extreme points, Ky Fan segments.

A subset C of the space is trace convex when its embedded image is the
intersection of the embedded space with a convex set, equivalently when the
trace hull adds no further points.  Membership of a point in the hull of a
set is one small feasibility LP (convex combination of the set's columns).

An optional ``ambient`` point set restricts where hull membership is
reported: points outside it stand for ideal points of a compactification
and are never listed, although they still shape the hull geometry.  The
default ambient is the whole space.
"""

from dataclasses import dataclass

import numpy as np

from . import lp
from ._util import pmap
from .errors import ConsistencyError, ValidationError
from .space import PhiFunction, evaluate

WITNESS_BOX = 1e3
_ANTIPARALLEL_TOL = 1e-12

# relative margin floor for witness searches; must stay a safe factor above
# feas_tol * box, or an infeasible margin row drowns in the phase-1
# tolerance after the box shift moves its rhs to ~box * |coefficients|
MIN_MARGIN = 1e-5


def as_point_set(indices, n):
    """Normalize ``indices`` to a sorted tuple of distinct valid point indices."""
    pts = sorted({int(i) for i in indices})
    for i in pts:
        if not 0 <= i < n:
            raise ValidationError(f"point index {i} out of range [0, {n})")
    return tuple(pts)


@dataclass(frozen=True)
class SeparationResult:
    separable: bool
    witness: PhiFunction | None
    margin: float

    def to_dict(self):
        return {
            "separable": self.separable,
            "witness": None if self.witness is None else [float(v) for v in self.witness.coeffs],
            "margin": self.margin,
        }


@dataclass(frozen=True)
class KreinMilmanReport:
    hull: tuple
    extreme: tuple
    extreme_hull: tuple

    @property
    def ok(self):
        return self.hull == self.extreme_hull

    def to_dict(self, system):
        lab = system.space.labels
        return {
            "hull": [lab[j] for j in self.hull],
            "extreme": [lab[j] for j in self.extreme],
            "extreme_hull": [lab[j] for j in self.extreme_hull],
            "ok": self.ok,
        }


def in_hull(system, x, S):
    """Is column x a convex combination of the columns indexed by S?"""
    system.require_valid()
    S = as_point_set(S, system.n)
    if not S:
        raise ValidationError("membership test against an empty set")
    if x in S:
        return True
    B = system.basis
    cols = list(S)
    A = np.vstack([B[:, cols], np.ones((1, len(cols)))])
    rhs = np.concatenate([B[:, x], [1.0]])
    prog = lp.LinearProgram.build(np.zeros(len(cols)), A, [lp.EQ] * A.shape[0], rhs)
    return lp.feasible(prog) is not None


def trace_hull(system, S, ambient=None, threads=1):
    """All (ambient) points whose column lies in the hull of the columns of S."""
    system.require_valid()
    S = as_point_set(S, system.n)
    if not S:
        raise ValidationError("trace hull of the empty set")
    scope = range(system.n) if ambient is None else as_point_set(ambient, system.n)
    flags = pmap(lambda x: in_hull(system, x, S), scope, threads=threads)
    return tuple(x for x, m in zip(scope, flags) if m)


def is_trace_convex(system, C, ambient=None):
    """True iff the trace hull of C (within the ambient set) adds nothing."""
    C = as_point_set(C, system.n)
    if not C:
        raise ValidationError("empty set cannot be tested for trace convexity")
    return trace_hull(system, C, ambient=ambient) == C


def coefficient_scales(system):
    """Magnitude of each basis row; witness searches run in coordinates
    where every row has unit scale, making box and margin scale-free."""
    s = np.abs(system.basis).max(axis=1)
    s[s == 0.0] = 1.0
    return s


def separate(system, C, xbar, box=WITNESS_BOX):
    """Search a basis element with values <= 0 on C and >= margin at ``xbar``.

    Homogeneity makes the margin a free normalization: any strict separator
    can be shifted and scaled into this form.  A unit margin is tried
    first; if the separator would need coefficients beyond the box, the
    margin drops to its floor, which reaches the same hull distances as a
    far wider box while keeping every quantity well scaled.  The search
    runs in row-equilibrated coefficient coordinates and the verdict is
    cross-checked against hull membership; disagreement raises
    ConsistencyError.
    """
    system.require_valid()
    C = as_point_set(C, system.n)
    if not C:
        raise ValidationError("cannot separate from an empty set")
    if not 0 <= xbar < system.n:
        raise ValidationError(f"point index {xbar} out of range")
    if xbar in C:
        raise ValidationError("the separated point must lie outside the set")
    scales = coefficient_scales(system)
    Beq = system.basis / scales[:, None]
    rows = [Beq[:, j] for j in C] + [Beq[:, xbar]]
    A = np.vstack(rows)
    point = None
    for margin in (1.0, MIN_MARGIN):
        prog = lp.LinearProgram.build(
            np.zeros(system.d),
            A,
            [lp.LE] * len(C) + [lp.GE],
            np.concatenate([np.zeros(len(C)), [margin]]),
            bounds=(-box, box),
        )
        point = lp.feasible(prog)
        if point is not None:
            point = point / scales
            break

    member = in_hull(system, xbar, C)
    if member == (point is not None):
        raise ConsistencyError(
            "separation and hull membership disagree; the point sits within "
            "solver tolerance of the hull boundary"
        )
    if point is None:
        return SeparationResult(separable=False, witness=None, margin=0.0)
    witness = PhiFunction(point)
    vals = evaluate(system, witness)
    margin = float(vals[xbar] - max(vals[j] for j in C))
    return SeparationResult(separable=True, witness=witness, margin=margin)


def phi_extreme_points(system, S, threads=1):
    """Points of S whose column is a vertex of the hull of S's columns."""
    system.require_valid()
    S = as_point_set(S, system.n)
    if not S:
        raise ValidationError("extreme points of the empty set")

    def extreme(x):
        rest = [j for j in S if j != x]
        return not rest or not in_hull(system, x, rest)

    flags = pmap(extreme, S, threads=threads)
    return tuple(x for x, e in zip(S, flags) if e)


def krein_milman_verify(system, S, threads=1):
    """Compare the hull of S with the hull of its extreme points."""
    hull = trace_hull(system, S, threads=threads)
    ext = phi_extreme_points(system, S, threads=threads)
    ext_hull = trace_hull(system, ext, threads=threads) if ext else ()
    return KreinMilmanReport(hull=hull, extreme=ext, extreme_hull=ext_hull)


def kyfan_strictly_between(system, x, y, z):
    """Strict segment membership: every phi with phi(x) <= min(phi(y), phi(z))
    takes equal values at x, y and z.

    x fails the test iff some basis element phi has phi(x) <= phi(y),
    phi(x) <= phi(z) and phi(y) + phi(z) - 2 phi(x) >= 1 (the unit
    normalizes "not all equal" by homogeneity), an LP feasibility question.
    """
    system.require_valid()
    B = system.basis
    u = B[:, y] - B[:, x]
    v = B[:, z] - B[:, x]
    A = np.vstack([-u, -v, u + v])
    prog = lp.LinearProgram.build(
        np.zeros(system.d),
        A,
        [lp.LE, lp.LE, lp.GE],
        np.array([0.0, 0.0, 1.0]),
        bounds=(-np.inf, np.inf),
    )
    return lp.feasible(prog) is None


def kyfan_segment(system, y, z, threads=1):
    """The Ky Fan segment between y and z: the endpoints together with any
    point lying strictly between them in the sense of
    ``kyfan_strictly_between``."""
    system.require_valid()
    for p in (y, z):
        if not 0 <= p < system.n:
            raise ValidationError(f"point index {p} out of range")

    def member(x):
        return x in (y, z) or kyfan_strictly_between(system, x, y, z)

    flags = pmap(member, range(system.n), threads=threads)
    return tuple(x for x, m in zip(range(system.n), flags) if m)


def kyfan_extreme_points(system, S):
    """Points of S lying strictly between no pair of points of S.

    A point x sits strictly inside a segment [y, z] exactly when its column
    lies between the columns of y and z on a line, i.e. the difference
    vectors to y and to z are antiparallel.  The pairwise direction test
    reproduces the per-segment LP verdicts (cross-checked in the tests) at
    a cost quadratic, not cubic, in the size of S.
    """
    system.require_valid()
    S = as_point_set(S, system.n)
    if not S:
        raise ValidationError("extreme points of the empty set")
    # betweenness is invariant under row scaling; equilibrated coordinates
    # keep small-magnitude basis rows visible in the direction dot products
    B = system.basis / coefficient_scales(system)[:, None]
    out = []
    for x in S:
        rest = [j for j in S if j != x]
        if not rest:
            out.append(x)
            continue
        U = B[:, rest] - B[:, [x]]
        norms = np.linalg.norm(U, axis=0)
        W = U / norms  # separation guarantees nonzero columns
        G = W.T @ W
        np.fill_diagonal(G, 1.0)
        if G.min() > -1.0 + _ANTIPARALLEL_TOL:
            out.append(x)
    return tuple(out)
