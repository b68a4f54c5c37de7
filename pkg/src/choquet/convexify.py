"""Conjugation and convexification of scalar fields.

The conjugate of a field f at a basis element phi is max_j (phi_j - f_j);
the biconjugate f** is the pointwise largest basis combination below f:

    f**(x) = max { phi(x) : phi in span(B), phi <= f }      (one LP per point)

f** is the canonical convexification: f is Choquet convex exactly when
f == f**, and by LP duality f**(x) equals the lower end of the key
interval of f at x (the measure-side route; see ``measures.key_interval``).

Two variants of the inf-over-equivalence-class convexification are shipped.
``hat_positive`` restricts the class of the Dirac mass at x to probability
measures, which is exactly the representing-measure polytope, so it agrees
with the biconjugate; it is computed through the measure-side LP and serves
as the default.  ``hat_signed`` takes the class over signed measures,
constrained to the closed strip  min f - alpha <= <nu, f> <= max f + alpha.
On a finite space this collapses to the constant min f - alpha whenever f
lies outside the row span of B (the pairing is unbounded below on the
affine set), and to f itself otherwise; it is kept as a diagnostic and its
gap against ``hat_positive`` is surfaced in reports.
"""

from dataclasses import dataclass

import numpy as np

from . import lp
from ._util import pmap
from .errors import ConsistencyError, ValidationError
from .space import as_field, evaluate

CONVEX_TOL = 1e-7


@dataclass(frozen=True)
class ConvexTraceSpec:
    """Max of finitely many affine functionals in coefficient coordinates.

    Each piece (a, beta) contributes a . Q + beta; composing the max with
    the point embedding realizes a convex-trace field on the space.
    """

    pieces: tuple

    def __post_init__(self):
        if len(self.pieces) < 1:
            raise ValidationError("a convex-trace spec needs at least one piece")
        norm = []
        width = None
        for a, beta in self.pieces:
            a = np.asarray(a, dtype=float)
            if a.ndim != 1 or not np.all(np.isfinite(a)) or not np.isfinite(beta):
                raise ValidationError("pieces must be finite (vector, scalar) pairs")
            if width is None:
                width = a.shape[0]
            elif a.shape[0] != width:
                raise ValidationError("all pieces must have the same dimension")
            a.setflags(write=False)
            norm.append((a, float(beta)))
        object.__setattr__(self, "pieces", tuple(norm))

    @property
    def dim(self):
        return self.pieces[0][0].shape[0]

    def to_dict(self):
        return {"pieces": [{"a": [float(v) for v in a], "beta": b} for a, b in self.pieces]}

    @classmethod
    def from_dict(cls, data):
        try:
            pieces = [(np.asarray(p["a"], dtype=float), float(p["beta"])) for p in data["pieces"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed convex-trace spec: {exc}") from exc
        return cls(tuple(pieces))


def realize_convex_trace(system, spec):
    """Field of the max-of-affine composition with the point embedding."""
    system.require_valid()
    if spec.dim != system.d:
        raise ValidationError(f"spec dimension {spec.dim} != basis count {system.d}")
    vals = np.stack([system.basis.T @ a + beta for a, beta in spec.pieces])
    return vals.max(axis=0)


def phi_conjugate(system, f, phi):
    """Conjugate value sup_x (phi(x) - f(x)); exact finite max."""
    f = as_field(system, f)
    vals = evaluate(system, phi)
    return float(np.max(vals - f))


def _biconjugate_at(system, f, x, offset):
    # maximize phi(x) over coefficients with phi <= f pointwise; row x of the
    # constraint already caps the value at f(x), so the LP is bounded.  The
    # field is pre-shifted by its minimum (constants lie in the span, so the
    # optimum just shifts back), which keeps the rhs nonnegative and lets the
    # solver start from the slack basis.
    B = system.basis
    prog = lp.LinearProgram.build(
        -B[:, x],
        B.T,
        [lp.LE] * system.n,
        f - offset,
        bounds=(-np.inf, np.inf),
    )
    out = lp.solve(prog)
    if out.status != lp.OPTIMAL:
        raise ConsistencyError(f"biconjugate LP reported {out.status}; engine bug")
    return offset - float(out.value)


def biconjugate(system, f, threads=1):
    """Pointwise largest minorant of f within the span of the basis."""
    system.require_valid()
    f = as_field(system, f)
    m = float(f.min())
    return np.array(
        pmap(lambda x: _biconjugate_at(system, f, x, m), range(system.n), threads)
    )


def convexity_gap(system, f):
    """sup-norm distance between f and its biconjugate (0 iff Choquet convex)."""
    f = as_field(system, f)
    return float(np.max(f - biconjugate(system, f)))


def is_choquet_convex(system, f, tol=CONVEX_TOL):
    """f is Choquet convex iff it equals its biconjugate within ``tol``."""
    return convexity_gap(system, f) <= tol


def hat_positive(system, f, threads=1):
    """Probability-measure convexification; equals the biconjugate.

    Computed through the measure-side LP (minimize the pairing over the
    representing polytope) so it stays an independent route from
    ``biconjugate``; the two agree within LP duality noise.
    """
    from .measures import _mx_program  # local import to avoid a cycle

    system.require_valid()
    f = as_field(system, f)

    def at(x):
        out = lp.solve(_mx_program(system, x, f))
        if out.status != lp.OPTIMAL:
            raise ConsistencyError("convexification LP infeasible; engine bug")
        return float(out.value)

    return np.array(pmap(at, range(system.n), threads))


def hat_signed(system, f, alpha=1.0, threads=1):
    """Signed-measure convexification over the closed pairing strip."""
    system.require_valid()
    f = as_field(system, f)
    if alpha <= 0:
        raise ValidationError("strip width alpha must be positive")
    B = system.basis
    strip_lo = float(f.min()) - alpha
    strip_hi = float(f.max()) + alpha
    A = np.vstack([B, f[None, :], f[None, :]])
    rels = [lp.EQ] * system.d + [lp.GE, lp.LE]

    def at(x):
        rhs = np.concatenate([B[:, x], [strip_lo, strip_hi]])
        prog = lp.LinearProgram.build(f, A, rels, rhs, bounds=(-np.inf, np.inf))
        out = lp.solve(prog)
        if out.status != lp.OPTIMAL:
            raise ConsistencyError(f"signed convexification LP reported {out.status}")
        return float(out.value)

    return np.array(pmap(at, range(system.n), threads))


def sup_family(system, fields, tol=CONVEX_TOL):
    """Pointwise max of Choquet-convex fields; stays Choquet convex."""
    fields = [as_field(system, f) for f in fields]
    if not fields:
        raise ValidationError("sup_family needs at least one field")
    for i, f in enumerate(fields):
        if not is_choquet_convex(system, f, tol):
            raise ValidationError(f"input field {i} is not Choquet convex")
    return np.max(np.stack(fields), axis=0)
