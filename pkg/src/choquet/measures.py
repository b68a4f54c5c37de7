"""Representing measures, their value intervals and the Choquet boundary.

A probability measure mu represents point x when integrating any basis
function against mu reproduces its value at x, i.e. B mu = B e_x with
mu >= 0 and total mass 1.  The Dirac mass at x always qualifies, so the
feasible polytope is never empty.

A point belongs to the Choquet boundary when the Dirac mass is its only
representing measure; equivalently, when its basis column is a vertex of
the convex hull of all columns.  Both characterizations are computed (one
LP each per point) and their agreement is asserted.
"""

from dataclasses import dataclass

import numpy as np

from . import lp
from ._util import pmap
from .errors import ConsistencyError, ValidationError
from .space import Measure, as_field

BOUNDARY_TOL = 1e-7


@dataclass(frozen=True)
class KeyInterval:
    """Range of integrals of a field over all representing measures of a point."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi + 1e-9):
            raise ConsistencyError(f"inverted interval [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class BoundaryReport:
    """Per-point boundary classification with both witnesses."""

    min_self_mass: np.ndarray
    vertex: np.ndarray
    is_boundary: np.ndarray
    tol: float

    @property
    def boundary(self):
        return tuple(int(j) for j in np.flatnonzero(self.is_boundary))

    def to_dict(self, system):
        pts = [
            {
                "label": system.space.labels[j],
                "is_boundary": bool(self.is_boundary[j]),
                "min_self_mass": float(self.min_self_mass[j]),
                "vertex": bool(self.vertex[j]),
            }
            for j in range(len(self.min_self_mass))
        ]
        return {
            "boundary": [system.space.labels[j] for j in self.boundary],
            "points": pts,
            "tolerance": self.tol,
        }


def _check_point(system, x):
    if not 0 <= x < system.n:
        raise ValidationError(f"point index {x} out of range [0, {system.n})")


def _mx_program(system, x, objective=None):
    """LP over the representing-measure polytope of point x."""
    B = system.basis
    n = system.n
    A = np.vstack([B, np.ones((1, n))])
    rhs = np.concatenate([B[:, x], [1.0]])
    obj = np.zeros(n) if objective is None else as_field(system, objective)
    return lp.LinearProgram.build(obj, A, [lp.EQ] * A.shape[0], rhs)


def representing_measure(system, x, objective=None):
    """A representing measure for x, minimizing ``objective`` when given."""
    system.require_valid()
    _check_point(system, x)
    out = lp.solve(_mx_program(system, x, objective))
    if out.status != lp.OPTIMAL:
        raise ConsistencyError(
            f"representing-measure LP reported {out.status}; the Dirac mass is "
            "always feasible, so this signals an engine bug"
        )
    return Measure.probability(out.point)


def key_interval(system, f, x):
    """Min and max of the pairing of ``f`` over representing measures of x."""
    system.require_valid()
    _check_point(system, x)
    f = as_field(system, f)
    lo = lp.solve(_mx_program(system, x, f))
    hi = lp.solve(_mx_program(system, x, -f))
    if lo.status != lp.OPTIMAL or hi.status != lp.OPTIMAL:
        raise ConsistencyError("key-interval LP infeasible; engine bug")
    return KeyInterval(lo=float(lo.value), hi=float(-hi.value))


def min_self_mass(system, x):
    """Least weight a representing measure of x can leave on x itself."""
    system.require_valid()
    _check_point(system, x)
    obj = np.zeros(system.n)
    obj[x] = 1.0
    out = lp.solve(_mx_program(system, x, obj))
    if out.status != lp.OPTIMAL:
        raise ConsistencyError("self-mass LP infeasible; engine bug")
    return float(out.value)


def is_boundary(system, x, tol=BOUNDARY_TOL):
    """Whether M_x is the Dirac singleton; returns (flag, min_self_mass).

    Mass 1 pinned at x forces the Dirac measure, so the singleton test
    reduces to one LP: minimize the weight at x itself.
    """
    m = min_self_mass(system, x)
    return m >= 1.0 - tol, m


def is_vertex(system, x):
    """Whether column x is outside the convex hull of the other columns."""
    system.require_valid()
    _check_point(system, x)
    others = [j for j in range(system.n) if j != x]
    if not others:
        return True
    B = system.basis
    A = np.vstack([B[:, others], np.ones((1, len(others)))])
    rhs = np.concatenate([B[:, x], [1.0]])
    prog = lp.LinearProgram.build(np.zeros(len(others)), A, [lp.EQ] * A.shape[0], rhs)
    return lp.feasible(prog) is None


def choquet_boundary(system, tol=BOUNDARY_TOL, threads=1):
    """Classify every point, running both tests and asserting they agree."""
    system.require_valid()

    def classify(x):
        return min_self_mass(system, x), is_vertex(system, x)

    rows = pmap(classify, range(system.n), threads=threads)
    mass = np.array([r[0] for r in rows])
    vertex = np.array([r[1] for r in rows], dtype=bool)
    flag = mass >= 1.0 - tol
    if not np.array_equal(flag, vertex):
        bad = np.flatnonzero(flag != vertex)
        raise ConsistencyError(
            "boundary tests disagree at point(s) "
            f"{[system.space.labels[j] for j in bad]}; "
            f"self-mass values {mass[bad]!r} (tolerance breach in the LP layer)"
        )
    return BoundaryReport(min_self_mass=mass, vertex=vertex, is_boundary=flag, tol=tol)
