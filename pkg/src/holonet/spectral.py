"""Finite-dimensional nets of spectral triples and their equivariant
counterparts.

A net triple carries one odd self-adjoint operator per fiber,
transported by the edge unitaries of a graded representation; an
equivariant triple is the single-fiber picture, with the loop group
acting by unitaries that commute with the operator.  The two are
interchangeable, and the conversions here are exact on matrices.

Everything is finite dimensional, so theta-summability and the
superderivation domains are automatic; the validator records them as
zero-defect entries instead of testing convergence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FiberMismatch, NotInvariant, NotSelfAdjoint
from .fredholm import CHECK_TOL, SampledRep, flat_rep, holonomy_images
from .homotopy import GroupPresentation, PathFrame
from .operators import adj, zero_defect
from .poset import Poset
from .reports import ValidationReport


@dataclass(frozen=True)
class NetSpectralTriple:
    """Graded rep plus a fiberwise odd self-adjoint operator family."""

    rep: SampledRep
    D: dict[str, np.ndarray]


@dataclass(frozen=True)
class EquivariantTriple:
    """One graded fiber, loop-group unitaries, observables, one operator.

    The unitaries commute with the grading and with D; the observables
    are even.  D is odd and self-adjoint.
    """

    grading: np.ndarray
    u_images: dict[int, np.ndarray]
    samples: dict[str, np.ndarray]
    D: np.ndarray
    group: GroupPresentation


def superderivation(d: np.ndarray, grading: np.ndarray, t) -> np.ndarray:
    """delta(t) = D t - (Gamma t Gamma) D, the graded commutator with D."""
    return d @ t - grading @ t @ grading @ d


def _fiber_units(dim: int):
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = 1.0
            yield e


def validate_triple(t: NetSpectralTriple, tol: float = CHECK_TOL) -> ValidationReport:
    """Defect report for a net of spectral triples.

    Per fiber: D present, self-adjoint, odd against the grading; finite
    dimension makes theta-summability and the superderivation domain
    automatic, recorded as zero-defect entries.  Per edge: one-sided
    transport covariance of D and covariance of the superderivation on
    the matrix-unit basis of the source fiber.
    """
    rep = t.rep
    report = ValidationReport()
    for o in sorted(rep.poset.elements):
        d = t.D.get(o)
        if d is None:
            report.add("D-coverage", o, float("inf"), tol)
            continue
        report.add("D-selfadjoint", o, zero_defect(d - adj(d)), tol)
        g = (rep.grading or {}).get(o)
        if g is None:
            report.add("grading-coverage", o, float("inf"), tol)
        else:
            report.add("D-odd", o, zero_defect(g @ d + d @ g), tol)
        report.add("theta-summable", o, 0.0, tol)
        report.add("superderivation-domain", o, 0.0, tol)
    for e in sorted(rep.poset.strict_pairs()):
        o, o1 = e
        d, d1 = t.D.get(o), t.D.get(o1)
        if d is None or d1 is None:
            continue
        u = rep.u(o, o1)
        report.add("D-transport", f"{o}<{o1}",
                   zero_defect(u @ d - d1 @ u), tol)
        g = (rep.grading or {}).get(o)
        g1 = (rep.grading or {}).get(o1)
        if g is None or g1 is None:
            continue
        worst = 0.0
        for unit in _fiber_units(d.shape[0]):
            moved = u @ unit @ adj(u)
            lhs = superderivation(d1, g1, moved)
            rhs = u @ superderivation(d, g, unit) @ adj(u)
            worst = max(worst, zero_defect(lhs - rhs))
        report.add("superderivation-covariance", f"{o}<{o1}", worst, tol)
    return report


def _equivariant_defects(e: EquivariantTriple) -> list[tuple[str, float]]:
    out = [("D-selfadjoint", zero_defect(e.D - adj(e.D))),
           ("D-odd", zero_defect(e.grading @ e.D + e.D @ e.grading))]
    for g, u in sorted(e.u_images.items()):
        out.append((f"u{g}-commutes-D", zero_defect(u @ e.D - e.D @ u)))
        out.append((f"u{g}-commutes-grading",
                    zero_defect(u @ e.grading - e.grading @ u)))
    for label, a in sorted(e.samples.items()):
        out.append((f"{label}-even", zero_defect(e.grading @ a - a @ e.grading)))
    return out


def _require_equivariant(e: EquivariantTriple, tol: float) -> None:
    bad = [(name, d) for name, d in _equivariant_defects(e) if d > tol]
    if bad:
        name, d = max(bad, key=lambda nd: nd[1])
        raise NotInvariant(f"{name} fails: defect {d:.3e} > {tol:.1e}")


def to_equivariant(t: NetSpectralTriple, tol: float = CHECK_TOL) -> EquivariantTriple:
    """Read the triple off at the frame base; holonomy gives the action.

    The loop-group images must commute with D there (they do whenever
    the net family is transport-covariant), else NotInvariant.
    """
    rep = t.rep
    base = rep.frame.base
    if rep.grading is None or base not in rep.grading:
        raise FiberMismatch("need a grading at the base fiber")
    if base not in t.D:
        raise FiberMismatch("no operator at the base fiber")
    e = EquivariantTriple(rep.grading[base], holonomy_images(rep),
                          dict(rep.samples.get(base, {})), t.D[base],
                          rep.pres)
    _require_equivariant(e, tol)
    return e


def from_equivariant(e: EquivariantTriple, poset: Poset,
                     pres: GroupPresentation, frame: PathFrame,
                     tol: float = CHECK_TOL) -> NetSpectralTriple:
    """Spread an equivariant triple out as a constant family over the net.

    With a holonomy-flat representation the frame sections are exact
    identities, so the constant family IS the section-transported one,
    and converting back returns the very same matrices.
    """
    _require_equivariant(e, tol)
    dim = e.D.shape[0]
    rep = flat_rep(poset, pres, frame, dict(e.u_images),
                   np.eye(dim, dtype=complex), dict(e.samples),
                   grading_at=e.grading)
    return NetSpectralTriple(rep, {o: e.D for o in poset.elements})


def theta_trace(d, beta: float, tol: float = CHECK_TOL) -> float:
    """Tr exp(-beta D^2) through the eigenvalues of D."""
    d = np.asarray(d, dtype=complex)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise NotSelfAdjoint(f"need a square matrix, got shape {d.shape}")
    if zero_defect(d - adj(d)) > tol:
        raise NotSelfAdjoint("operator is not self-adjoint")
    if beta <= 0:
        raise ValueError("beta must be positive")
    lam = np.linalg.eigvalsh(d)
    return float(np.sum(np.exp(-beta * lam * lam)))
