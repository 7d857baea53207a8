"""Nets of spectral triples: fiberwise validation, the equivariant
correspondence with exact round trips, and the heat trace."""

import numpy as np
import pytest

from conftest import rng_for
from holonet.errors import FiberMismatch, NotInvariant, NotSelfAdjoint
from holonet.fredholm import flat_rep
from holonet.linalg import random_unitary
from holonet.spectral import (
    EquivariantTriple,
    NetSpectralTriple,
    from_equivariant,
    superderivation,
    theta_trace,
    to_equivariant,
    validate_triple,
)

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def rotation_triple():
    """Cyclic permutation holonomy with an exactly commuting circulant D."""
    v = np.roll(np.eye(3, dtype=complex), 1, axis=0)
    h = v + v.T + np.eye(3)
    return EquivariantTriple(
        grading=np.kron(SZ, np.eye(3)),
        u_images={1: np.kron(np.eye(2), v)},
        samples={"one": np.eye(6, dtype=complex),
                 "shifted": np.kron(np.eye(2), v)},
        D=np.kron(SX, h),
        group=None,  # filled per test with the hexagon presentation
    )


def checks(report, name):
    return [e for e in report.entries if e.check == name]


def test_zero_operator_family_is_valid(hexagon_pfp):
    poset, pres, frame = hexagon_pfp
    e = EquivariantTriple(SZ.copy(), {1: np.eye(2, dtype=complex)},
                          {"one": np.eye(2, dtype=complex)},
                          np.zeros((2, 2), dtype=complex), pres)
    t = from_equivariant(e, poset, pres, frame)
    report = validate_triple(t)
    assert report.ok
    assert report.max_defect == 0.0
    assert superderivation(t.D["U1"], SZ, np.eye(2)).any() == False


def test_rotation_holonomy_round_trip_is_exact(hexagon_pfp):
    poset, pres, frame = hexagon_pfp
    e = rotation_triple()
    e = EquivariantTriple(e.grading, e.u_images, e.samples, e.D, pres)
    t = from_equivariant(e, poset, pres, frame)
    report = validate_triple(t)
    assert report.ok
    # integer-valued matrices keep every check exactly zero
    assert report.max_defect == 0.0
    back = to_equivariant(t)
    assert back.D is e.D
    assert back.grading is e.grading
    assert np.array_equal(back.u_images[1], e.u_images[1])
    assert sorted(back.samples) == sorted(e.samples)
    for label in e.samples:
        assert np.array_equal(back.samples[label], e.samples[label])
    again = from_equivariant(back, poset, pres, frame)
    for o in poset.elements:
        assert again.D[o] is t.D[o]
        for o1 in poset.elements:
            if poset.lt(o, o1):
                assert np.array_equal(again.rep.u(o, o1), t.rep.u(o, o1))


def test_triple_reports_theta_and_domain_entries(hexagon_pfp):
    poset, pres, frame = hexagon_pfp
    e = rotation_triple()
    e = EquivariantTriple(e.grading, e.u_images, e.samples, e.D, pres)
    report = validate_triple(from_equivariant(e, poset, pres, frame))
    assert len(checks(report, "theta-summable")) == len(poset.elements)
    assert len(checks(report, "superderivation-domain")) == len(poset.elements)
    assert all(c.defect == 0.0 for c in checks(report, "theta-summable"))
    assert len(checks(report, "superderivation-covariance")) == len(poset.strict_pairs())


def test_broken_transport_is_reported(hexagon_pfp):
    poset, pres, frame = hexagon_pfp
    e = rotation_triple()
    e = EquivariantTriple(e.grading, e.u_images, e.samples, e.D, pres)
    t = from_equivariant(e, poset, pres, frame)
    family = dict(t.D)
    family["U2"] = family["U2"] + 0.1 * np.kron(SX, np.eye(3))
    report = validate_triple(NetSpectralTriple(t.rep, family))
    assert not report.ok
    assert any(c.check == "D-transport" for c in report.violations)


def test_even_operator_fails_oddness(hexagon_pfp):
    poset, pres, frame = hexagon_pfp
    rep = flat_rep(poset, pres, frame, {1: np.eye(2, dtype=complex)},
                   np.eye(2, dtype=complex), {"one": np.eye(2, dtype=complex)},
                   grading_at=SZ)
    even = np.diag([1.0, 2.0]).astype(complex)
    report = validate_triple(NetSpectralTriple(rep, {o: even for o in poset.elements}))
    assert any(c.check == "D-odd" for c in report.violations)


def test_missing_grading_and_missing_operator_are_reported(hexagon_pfp):
    poset, pres, frame = hexagon_pfp
    rep = flat_rep(poset, pres, frame, {1: np.eye(2, dtype=complex)},
                   np.eye(2, dtype=complex), {"one": np.eye(2, dtype=complex)})
    zero = np.zeros((2, 2), dtype=complex)
    family = {o: zero for o in poset.elements}
    del family["U3"]
    report = validate_triple(NetSpectralTriple(rep, family))
    names = {c.check for c in report.violations}
    assert "grading-coverage" in names
    assert "D-coverage" in names
    with pytest.raises(FiberMismatch):
        to_equivariant(NetSpectralTriple(rep, family))


def test_non_commuting_operator_is_rejected_both_ways(hexagon_pfp):
    poset, pres, frame = hexagon_pfp
    v = np.diag([1.0, np.exp(0.7j)])
    e = EquivariantTriple(np.kron(SZ, np.eye(2)),
                          {1: np.kron(np.eye(2), v)},
                          {"one": np.eye(4, dtype=complex)},
                          np.kron(SX, SX), None)
    _, pres, _ = hexagon_pfp
    e = EquivariantTriple(e.grading, e.u_images, e.samples, e.D, pres)
    with pytest.raises(NotInvariant):
        from_equivariant(e, poset, pres, frame)
    # assembling the same data as a constant family fails on readoff too
    rep = flat_rep(poset, pres, frame, e.u_images,
                   np.eye(4, dtype=complex), e.samples, grading_at=e.grading)
    with pytest.raises(NotInvariant):
        to_equivariant(NetSpectralTriple(rep, {o: e.D for o in poset.elements}))


def test_odd_sample_is_rejected(hexagon_pfp):
    poset, pres, frame = hexagon_pfp
    e = EquivariantTriple(SZ.copy(), {1: np.eye(2, dtype=complex)},
                          {"flip": SX.copy()},
                          np.zeros((2, 2), dtype=complex), pres)
    with pytest.raises(NotInvariant):
        from_equivariant(e, poset, pres, frame)


def test_superderivation_is_a_graded_derivation():
    rng = rng_for(3)
    g = np.kron(SZ, np.eye(2))
    d = np.kron(SX, rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    d = d + d.conj().T
    s = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    t = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    lhs = superderivation(d, g, s @ t)
    rhs = superderivation(d, g, s) @ t + g @ s @ g @ superderivation(d, g, t)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_theta_trace_closed_forms():
    assert theta_trace(np.zeros((5, 5)), 2.0) == 5.0
    assert abs(theta_trace(np.diag([1.0, -1.0]), 1.0) - 2 * np.exp(-1.0)) < 1e-12
    assert abs(theta_trace(np.diag([3.0]), 0.5) - np.exp(-4.5)) < 1e-14


def test_theta_trace_conjugation_invariant():
    for seed in range(10):
        rng = rng_for(40 + seed)
        n = int(rng.integers(2, 7))
        d = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        d = d + d.conj().T
        w = random_unitary(rng, n)
        beta = float(rng.uniform(0.1, 3.0))
        assert abs(theta_trace(d, beta)
                   - theta_trace(w @ d @ w.conj().T, beta)) < 1e-9


def test_theta_trace_monotone_in_beta():
    rng = rng_for(9)
    d = rng.standard_normal((6, 6))
    d = d + d.T
    betas = [0.1, 0.5, 1.0, 2.0, 5.0]
    values = [theta_trace(d, b) for b in betas]
    for lo, hi in zip(values[1:], values):
        assert lo <= hi + 1e-12


def test_theta_trace_input_guards():
    with pytest.raises(NotSelfAdjoint):
        theta_trace(np.ones((2, 3)), 1.0)
    with pytest.raises(NotSelfAdjoint):
        theta_trace(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)
    with pytest.raises(ValueError):
        theta_trace(np.zeros((2, 2)), 0.0)
