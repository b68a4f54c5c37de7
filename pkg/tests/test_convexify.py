import numpy as np
import pytest

from choquet import convexify, measures
from choquet.convexify import ConvexTraceSpec
from choquet.errors import ValidationError
from choquet.generators import gen_interval_affine, gen_random
from conftest import lower_convex_envelope_1d


def test_phi_conjugate_examples(naturals4):
    system = naturals4.system
    f = np.array([0.0, 1.0, 1.0, 0.0])
    assert convexify.phi_conjugate(system, f, [0.0, 0.0]) == pytest.approx(0.0)  # -min f
    assert convexify.phi_conjugate(system, f, [0.0, 1.0]) == pytest.approx(1.0)
    phi = np.array([0.2, -0.5])
    vals = system.basis.T @ phi
    assert convexify.phi_conjugate(system, vals, phi) == pytest.approx(0.0, abs=1e-12)


def test_biconjugate_naturals_zero_envelope(naturals4):
    f = np.array([0.0, 1.0, 1.0, 0.0])
    assert convexify.biconjugate(naturals4.system, f) == pytest.approx([0.0] * 4, abs=1e-9)


def test_biconjugate_interval_chord():
    inst = gen_interval_affine(21)
    t = np.linspace(0, 1, 21)
    f = -(t**2)
    # the convex envelope of a concave function is the chord
    assert convexify.biconjugate(inst.system, f) == pytest.approx(-t, abs=1e-9)


def test_biconjugate_fixes_basis_elements(naturals4):
    phi = naturals4.system.basis.T @ np.array([1.0, -2.0])
    assert convexify.biconjugate(naturals4.system, phi) == pytest.approx(phi, abs=1e-9)


def test_biconjugate_matches_envelope_oracle(naturals4):
    # independent oracle: classical lower convex envelope in the embedded
    # coordinate (the basis spans 1 and that coordinate)
    rng = np.random.default_rng(8)
    q = naturals4.system.basis[1]
    for _ in range(12):
        f = rng.normal(size=4)
        expect = lower_convex_envelope_1d(q, f)
        got = convexify.biconjugate(naturals4.system, f)
        assert got == pytest.approx(expect, abs=1e-8)


def test_is_choquet_convex_examples():
    inst = gen_interval_affine(21)
    t = np.linspace(0, 1, 21)
    assert convexify.is_choquet_convex(inst.system, t**2)
    assert not convexify.is_choquet_convex(inst.system, -(t**2))
    phi = inst.system.basis.T @ np.array([2.0, -3.0])
    assert convexify.is_choquet_convex(inst.system, phi)
    # the envelope gap of -t^2 is 1/4 at t = 1/2
    gap = convexify.convexity_gap(inst.system, -(t**2))
    assert gap == pytest.approx(0.25, abs=1e-6)


def test_hat_positive_equals_biconjugate(naturals4):
    rng = np.random.default_rng(2)
    for _ in range(6):
        f = rng.normal(size=4)
        a = convexify.hat_positive(naturals4.system, f)
        b = convexify.biconjugate(naturals4.system, f)
        assert a == pytest.approx(b, abs=1e-7)


def test_hat_signed_examples(naturals4):
    system = naturals4.system
    f = np.array([0.0, 1.0, 1.0, 0.0])
    assert convexify.hat_signed(system, f, 1.0) == pytest.approx([-1.0] * 4, abs=1e-9)
    assert convexify.hat_signed(system, f, 0.5) == pytest.approx([-0.5] * 4, abs=1e-9)
    phi = system.basis.T @ np.array([0.5, 0.25])
    assert convexify.hat_signed(system, phi, 1.0) == pytest.approx(phi, abs=1e-9)
    with pytest.raises(ValidationError):
        convexify.hat_signed(system, f, 0.0)


def test_hat_ordering_chain(naturals4):
    system = naturals4.system
    rng = np.random.default_rng(5)
    for _ in range(8):
        f = rng.normal(size=4)
        hs = convexify.hat_signed(system, f, 1.0)
        hp = convexify.hat_positive(system, f)
        fxx = convexify.biconjugate(system, f)
        assert np.all(hs <= hp + 1e-7)
        assert np.all(np.abs(hp - fxx) <= 1e-7)
        assert np.all(fxx <= f + 1e-9)


def test_sup_family(naturals4):
    system = naturals4.system
    b = system.basis[1]
    one = np.ones(4)
    out = convexify.sup_family(system, [b, one - b])
    assert out == pytest.approx(np.maximum(b, 1 - b))
    assert convexify.is_choquet_convex(system, out)
    single = convexify.sup_family(system, [b])
    assert single == pytest.approx(b)
    with pytest.raises(ValidationError):
        convexify.sup_family(system, [])


def test_sup_family_rejects_nonconvex_input():
    inst = gen_interval_affine(11)
    t = np.linspace(0, 1, 11)
    with pytest.raises(ValidationError):
        convexify.sup_family(inst.system, [-(t**2)])


def test_sup_family_affine_pieces_interval():
    inst = gen_interval_affine(11)
    t = np.linspace(0, 1, 11)
    out = convexify.sup_family(inst.system, [t, 1 - t])
    assert out == pytest.approx(np.maximum(t, 1 - t))
    assert convexify.is_choquet_convex(inst.system, out)


def test_realize_convex_trace(naturals4):
    system = naturals4.system
    one_piece = ConvexTraceSpec(((np.array([0.5, -1.0]), 0.25),))
    f = convexify.realize_convex_trace(system, one_piece)
    assert f == pytest.approx(system.basis.T @ np.array([0.5, -1.0]) + 0.25)
    # tangent pieces of (q - 0.4)^2 at every embedded coordinate reproduce
    # the exact parabola values via the max
    qs = [1.0, 0.5, 1 / 3, 0.25]
    spec = ConvexTraceSpec(tuple(
        (np.array([0.0, 2 * (s - 0.4)]), 0.16 - s * s) for s in qs
    ))
    f = convexify.realize_convex_trace(system, spec)
    assert f == pytest.approx([(q - 0.4) ** 2 for q in qs], abs=1e-12)
    assert f[0] == pytest.approx(0.36)
    # max of +-linear is a nonnegative field
    a = np.array([0.0, 1.0])
    absval = ConvexTraceSpec(((a, 0.0), (-a, 0.0)))
    assert np.all(convexify.realize_convex_trace(system, absval) >= 0.0)


def test_realized_fields_are_choquet_convex():
    rng = np.random.default_rng(14)
    for seed in range(6):
        inst = gen_random(7, 3, seed=seed)
        for _ in range(4):
            k = int(rng.integers(1, 4))
            spec = ConvexTraceSpec(tuple(
                (rng.normal(size=3), float(rng.normal())) for _ in range(k)
            ))
            f = convexify.realize_convex_trace(inst.system, spec)
            assert convexify.is_choquet_convex(inst.system, f, tol=1e-7)


def test_biconjugate_idempotent(naturals4):
    rng = np.random.default_rng(4)
    for _ in range(6):
        f = rng.normal(size=4)
        fxx = convexify.biconjugate(naturals4.system, f)
        again = convexify.biconjugate(naturals4.system, fxx)
        assert again == pytest.approx(fxx, abs=1e-9)


def test_biconjugate_basis_equivariance(naturals4):
    system = naturals4.system
    rng = np.random.default_rng(6)
    f = rng.normal(size=4)
    phi = system.basis.T @ np.array([-0.3, 0.9])
    lhs = convexify.biconjugate(system, f + phi)
    rhs = convexify.biconjugate(system, f) + phi
    assert lhs == pytest.approx(rhs, abs=1e-8)


def test_biconjugate_positive_homogeneity(naturals4):
    rng = np.random.default_rng(7)
    f = rng.normal(size=4)
    fxx = convexify.biconjugate(naturals4.system, f)
    for alpha in (0.0, 0.5, 3.0):
        assert convexify.biconjugate(naturals4.system, alpha * f) == pytest.approx(
            alpha * fxx, abs=1e-8
        )


def test_biconjugate_duality_with_key_interval(naturals4):
    rng = np.random.default_rng(9)
    f = rng.normal(size=4)
    fxx = convexify.biconjugate(naturals4.system, f)
    for x in range(4):
        lo = measures.key_interval(naturals4.system, f, x).lo
        assert fxx[x] == pytest.approx(lo, abs=1e-7)


def test_spec_serialization_round_trip():
    spec = ConvexTraceSpec(((np.array([1.0, 2.0]), -0.5), (np.array([0.0, 1.0]), 3.0)))
    again = ConvexTraceSpec.from_dict(spec.to_dict())
    assert again.to_dict() == spec.to_dict()
    with pytest.raises(ValidationError):
        ConvexTraceSpec(())
    with pytest.raises(ValidationError):
        ConvexTraceSpec(((np.array([1.0]), np.nan),))
    with pytest.raises(ValidationError):
        ConvexTraceSpec.from_dict({"pieces": [{"a": "bad"}]})
