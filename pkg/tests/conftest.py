import numpy as np
import pytest

from choquet.generators import gen_disk, gen_interval_affine, gen_naturals


@pytest.fixture(scope="session")
def naturals4():
    return gen_naturals(4)


@pytest.fixture(scope="session")
def interval5():
    return gen_interval_affine(5)


@pytest.fixture(scope="session")
def disk_small():
    # small disk instance for the slower per-point suites
    return gen_disk(n_circle=20, n_interior_rings=1, degree=3)


def lower_convex_envelope_1d(q, f):
    """Brute-force lower convex envelope on a 1-D grid.

    Independent oracle for the biconjugate when the basis spans the affine
    functions of a single coordinate: env(t) is the smallest value at t of
    any chord between grid points bracketing t (including degenerate
    chords, i.e. the value itself).
    """
    q = np.asarray(q, dtype=float)
    f = np.asarray(f, dtype=float)
    n = len(q)
    env = f.copy()
    for i in range(n):
        for a in range(n):
            for b in range(n):
                if not (q[a] <= q[i] <= q[b]) or q[a] == q[b]:
                    continue
                t = (q[i] - q[a]) / (q[b] - q[a])
                env[i] = min(env[i], (1 - t) * f[a] + t * f[b])
    return env
