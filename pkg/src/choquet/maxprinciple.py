"""Maximum principles: argmax sets, Bauer verification, exposing functionals,
boundary characterization and the generic-uniqueness experiment.

Every convex-trace field attains its maximum on the Choquet boundary; the
verifiers below realize fields from their max-of-affine specs, compute the
argmax set and check the boundary actually carries the maximum.  The
genericity experiment perturbs a field by random basis elements and counts
how often the perturbed maximizer is unique.
"""

from dataclasses import dataclass

import numpy as np

from . import lp
from .convexify import ConvexTraceSpec, realize_convex_trace
from .errors import ConsistencyError, ValidationError
from .measures import choquet_boundary, is_boundary
from .sets import coefficient_scales
from .space import PhiFunction, as_field, evaluate

ARGMAX_TOL = 1e-9
TIE_TOL = 1e-9
EXPOSE_BOX = 1e3


@dataclass(frozen=True)
class MaxReport:
    argmax: tuple
    max_value: float
    boundary_argmax: tuple
    bauer_ok: bool

    def to_dict(self, system):
        lab = system.space.labels
        return {
            "argmax": [lab[j] for j in self.argmax],
            "max_value": self.max_value,
            "boundary_argmax": [lab[j] for j in self.boundary_argmax],
            "bauer_ok": self.bauer_ok,
        }


@dataclass(frozen=True)
class MultiMaxReport:
    common_argmax: tuple
    common_boundary_argmax: tuple
    hypothesis_void: bool
    ok: bool

    def to_dict(self, system):
        lab = system.space.labels
        return {
            "common_argmax": [lab[j] for j in self.common_argmax],
            "common_boundary_argmax": [lab[j] for j in self.common_boundary_argmax],
            "hypothesis_void": self.hypothesis_void,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class GenericityReport:
    trials: int
    unique_fraction: float
    perturbation_norm: float
    seed: int
    tie_tol: float
    singleton_flags: tuple

    def to_dict(self):
        return {
            "trials": self.trials,
            "unique_fraction": self.unique_fraction,
            "perturbation_norm": self.perturbation_norm,
            "seed": self.seed,
            "tie_tol": self.tie_tol,
        }


def argmax_set(system, f, tol=ARGMAX_TOL):
    """Indices within ``tol`` of the maximum of the field."""
    f = as_field(system, f)
    if tol < 0:
        raise ValidationError("tolerance must be nonnegative")
    return tuple(int(j) for j in np.flatnonzero(f >= f.max() - tol))


def bauer_verify(system, spec, tol=ARGMAX_TOL, boundary=None):
    """Realize the spec and check its maximum is attained on the boundary.

    A precomputed BoundaryReport may be passed to amortize the boundary
    LPs over many specs.
    """
    f = realize_convex_trace(system, spec)
    if boundary is None:
        boundary = choquet_boundary(system)
    bset = set(boundary.boundary)
    amax = argmax_set(system, f, tol)
    b_amax = tuple(j for j in amax if j in bset)
    max_all = float(f.max())
    max_bnd = float(max(f[j] for j in bset)) if bset else -np.inf
    ok = bool(b_amax) and abs(max_all - max_bnd) <= tol
    return MaxReport(argmax=amax, max_value=max_all, boundary_argmax=b_amax, bauer_ok=ok)


def multi_max_verify(system, specs, tol=ARGMAX_TOL, boundary=None):
    """Common-maximizer check for a family of convex-trace specs.

    When the argmax sets intersect, some common maximizer must lie on the
    boundary; an empty intersection voids the hypothesis, which is reported
    as ok (nothing to verify).
    """
    specs = list(specs)
    if not specs:
        raise ValidationError("multi-max needs a nonempty family")
    if boundary is None:
        boundary = choquet_boundary(system)
    bset = set(boundary.boundary)
    common = None
    for spec in specs:
        amax = set(argmax_set(system, realize_convex_trace(system, spec), tol))
        common = amax if common is None else (common & amax)
    common = tuple(sorted(common))
    if not common:
        return MultiMaxReport((), (), hypothesis_void=True, ok=True)
    b_common = tuple(j for j in common if j in bset)
    return MultiMaxReport(common, b_common, hypothesis_void=False, ok=bool(b_common))


def _expose_solve(system, x, box, margin):
    """Witness search for a strict separator of column x, in row-equilibrated
    coefficient coordinates; returns the unscaled coefficients or None."""
    scales = coefficient_scales(system)
    Beq = system.basis / scales[:, None]
    rows = [Beq[:, x] - Beq[:, j] for j in range(system.n) if j != x]
    if not rows:
        return np.zeros(system.d)
    A = np.vstack(rows)
    prog = lp.LinearProgram.build(
        np.zeros(system.d),
        A,
        [lp.GE] * len(rows),
        np.full(len(rows), margin),
        bounds=(-box, box),
    )
    point = lp.feasible(prog)
    return None if point is None else point / scales


def expose(system, xbar, box=EXPOSE_BOX, tol=ARGMAX_TOL):
    """A basis element whose unique maximizer over the space is ``xbar``.

    Requires ``xbar`` to be a boundary point; on a finite space boundary,
    vertex and exposed coincide, so the separating LP always succeeds.
    """
    system.require_valid()
    flag, mass = is_boundary(system, xbar)
    if not flag:
        raise ValidationError(
            f"point {system.space.labels[xbar]!r} is not a boundary point "
            f"(min self mass {mass:.3g}); only boundary points are exposed"
        )
    point = None
    for margin in (1.0, 1e-5):
        # a vertex very close to the hull of the others admits only steep
        # separators; lowering the required margin reaches them within the
        # same coefficient box
        point = _expose_solve(system, xbar, box, margin)
        if point is not None:
            break
    if point is None:
        raise ConsistencyError(
            "no exposing functional found inside the coefficient box although "
            "the point is a vertex"
        )
    phi = PhiFunction(point)
    amax = argmax_set(system, evaluate(system, phi), tol)
    if amax != (xbar,):
        raise ConsistencyError(f"exposing functional has argmax {amax}, expected {(xbar,)}")
    return phi


def random_spec(system, rng, max_pieces=4, scale=1.0):
    """A random max-of-affine spec (helper for sampling-based checks)."""
    k = int(rng.integers(1, max_pieces + 1))
    pieces = tuple(
        (rng.normal(scale=scale, size=system.d), float(rng.normal(scale=scale)))
        for _ in range(k)
    )
    return ConvexTraceSpec(pieces)


def boundary_characterization(system, xbar, samples=64, seed=0, tol=ARGMAX_TOL):
    """Characterize ``xbar`` through maximizer sets of convex-trace fields.

    Boundary points admit an exposing functional, a convex-trace field
    maximized at the point alone.  For non-boundary points the exposing LP
    is infeasible and every sampled convex-trace field maximized at the
    point is also maximized elsewhere; a singleton argmax at a non-vertex
    would contradict convexity and raises.  The verdict is compared against
    the representing-measure test and disagreement raises.
    """
    system.require_valid()
    if not 0 <= xbar < system.n:
        raise ValidationError(f"point index {xbar} out of range")
    flag, _ = is_boundary(system, xbar)
    exposed = False
    for margin in (1.0, 1e-5):
        if _expose_solve(system, xbar, EXPOSE_BOX, margin) is not None:
            exposed = True
            break
    if exposed != flag:
        raise ConsistencyError("exposing LP disagrees with the self-mass test")
    if exposed:
        return True
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        f = realize_convex_trace(system, random_spec(system, rng))
        amax = argmax_set(system, f, tol)
        if xbar in amax and amax == (xbar,):
            raise ConsistencyError(
                "sampled convex-trace field has a unique maximizer at a "
                "non-vertex; convexity violated"
            )
    return False


def genericity_experiment(system, f, trials, eps, seed, tie_tol=TIE_TOL):
    """Fraction of random basis perturbations with a unique maximizer.

    Each trial draws coefficients uniformly from [-eps, eps]^d with an RNG
    derived from (seed, trial), so results are reproducible and independent
    of any parallel schedule.
    """
    system.require_valid()
    f = as_field(system, f)
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if eps <= 0:
        raise ValidationError("perturbation radius must be positive")
    flags = []
    for t in range(trials):
        rng = np.random.default_rng([int(seed), t])
        coeffs = rng.uniform(-eps, eps, size=system.d)
        g = f + system.basis.T @ coeffs
        flags.append(len(argmax_set(system, g, tie_tol)) == 1)
    return GenericityReport(
        trials=trials,
        unique_fraction=float(np.mean(flags)),
        perturbation_norm=float(eps),
        seed=int(seed),
        tie_tol=float(tie_tol),
        singleton_flags=tuple(flags),
    )
