"""Finite-dimensional C*-fibers: block algebras, their *-isomorphisms
and unital *-homomorphisms (multiplicity embedding followed by a unitary
conjugation)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FiberMismatch
from .linalg import dagger, opnorm

BlockElement = tuple[np.ndarray, ...]


def identity_element(sizes: tuple[int, ...]) -> BlockElement:
    return tuple(np.eye(n, dtype=complex) for n in sizes)


def basis_elements(sizes: tuple[int, ...]) -> list[BlockElement]:
    """Matrix units of the block algebra, block by block."""
    out = []
    for k, n in enumerate(sizes):
        for i in range(n):
            for j in range(n):
                blocks = [np.zeros((m, m), dtype=complex) for m in sizes]
                blocks[k][i, j] = 1.0
                out.append(tuple(blocks))
    return out


def element_norm(x: BlockElement) -> float:
    return max((opnorm(b) for b in x), default=0.0)


def block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    at = 0
    for b in blocks:
        k = b.shape[0]
        out[at:at + k, at:at + k] = b
        at += k
    return out


def element_sub(x: BlockElement, y: BlockElement) -> BlockElement:
    return tuple(a - b for a, b in zip(x, y))


def vectorize(x: BlockElement) -> np.ndarray:
    return np.concatenate([b.ravel() for b in x])


def unvectorize(v: np.ndarray, sizes: tuple[int, ...]) -> BlockElement:
    blocks = []
    at = 0
    for n in sizes:
        blocks.append(v[at:at + n * n].reshape(n, n))
        at += n * n
    return tuple(blocks)


@dataclass(frozen=True)
class StarIso:
    """*-isomorphism of a block algebra: target slot k receives source
    block src[k] conjugated by units[k]."""

    sizes: tuple[int, ...]
    src: tuple[int, ...]
    units: tuple[np.ndarray, ...]

    def __post_init__(self):
        if sorted(self.src) != list(range(len(self.sizes))):
            raise FiberMismatch("src is not a permutation of the block slots")
        for k, s in enumerate(self.src):
            if self.sizes[s] != self.sizes[k]:
                raise FiberMismatch(
                    f"slot {k} (size {self.sizes[k]}) cannot receive block {s} "
                    f"(size {self.sizes[s]})"
                )
            if self.units[k].shape != (self.sizes[k], self.sizes[k]):
                raise FiberMismatch(f"unit {k} has wrong shape")


def identity_iso(sizes: tuple[int, ...]) -> StarIso:
    return StarIso(sizes, tuple(range(len(sizes))),
                   tuple(np.eye(n, dtype=complex) for n in sizes))


def apply_iso(iso: StarIso, x: BlockElement) -> BlockElement:
    return tuple(u @ x[s] @ dagger(u) for s, u in zip(iso.src, iso.units))


def compose_iso(outer: StarIso, inner: StarIso) -> StarIso:
    """outer after inner."""
    src = tuple(inner.src[s] for s in outer.src)
    units = tuple(outer.units[k] @ inner.units[outer.src[k]]
                  for k in range(len(outer.sizes)))
    return StarIso(outer.sizes, src, units)


def inverse_iso(iso: StarIso) -> StarIso:
    n = len(iso.sizes)
    src = [0] * n
    units: list[np.ndarray] = [None] * n  # type: ignore[list-item]
    for k, s in enumerate(iso.src):
        src[s] = k
        units[s] = dagger(iso.units[k])
    return StarIso(iso.sizes, tuple(src), tuple(units))


def iso_map_defect(a: StarIso, b: StarIso, sizes: tuple[int, ...]) -> float:
    """Distance between the maps, measured on the matrix-unit basis."""
    worst = 0.0
    for t in basis_elements(sizes):
        worst = max(worst, element_norm(element_sub(apply_iso(a, t), apply_iso(b, t))))
    return worst


def iso_matrix(iso: StarIso, sizes: tuple[int, ...]) -> np.ndarray:
    """Matrix of the iso acting on the vectorized block space."""
    basis = basis_elements(sizes)
    cols = [vectorize(apply_iso(iso, t)) for t in basis]
    return np.column_stack(cols)
