"""Root-system data for the classical families A, B, C, D.

Vectors live in the orthonormal e-basis over exact rationals: dimension
rank+1 for type A (inside the sum-zero hyperplane), rank otherwise.
The marked weight is omega_rank for A and omega_1 for B/C/D; degrees,
multiplicities and the dual metric follow from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .polyring import PolyError, frac_matrix_inverse

Vector = tuple[Fraction, ...]


def _dot(u: Vector, v: Vector) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _basis_vector(dim: int, i: int, c: Fraction = Fraction(1)) -> Vector:
    return tuple(c if j == i else Fraction(0) for j in range(dim))


def _vec(*entries) -> Vector:
    return tuple(Fraction(e) for e in entries)


@dataclass(frozen=True)
class RootSystemData:
    kind: str                     # "A" | "B" | "C" | "D"
    rank: int
    simple_roots: tuple[Vector, ...]
    coroots: tuple[Vector, ...]
    fundamental_weights: tuple[Vector, ...]
    omega: Vector                 # the marked weight
    dual_metric: tuple[tuple[Fraction, ...], ...]   # ((coroot Gram))^{-1}
    theta: tuple[Fraction, ...]   # (omega_j, omega)
    kappa: int
    multiplicities: tuple[int, ...]   # m_r = (omega, coroot_r)

    def coroot_gram(self) -> list[list[Fraction]]:
        return [[_dot(a, b) for b in self.coroots] for a in self.coroots]


def build_root_system(kind: str, rank: int) -> RootSystemData:
    kind = kind.upper()
    if kind == "A":
        if rank < 1:
            raise PolyError("type A needs rank >= 1")
        return _build_a(rank)
    if kind in ("B", "C"):
        if rank < 2:
            raise PolyError(f"type {kind} needs rank >= 2")
        return _build_bc(kind, rank)
    if kind == "D":
        if rank < 3:
            raise PolyError("type D needs rank >= 3")
        return _build_d(rank)
    raise PolyError(f"unsupported root system kind {kind!r}")


def _finish(kind: str, rank: int, roots, coroots, weights, omega) -> RootSystemData:
    gram = [[_dot(a, b) for b in coroots] for a in coroots]
    dual = tuple(tuple(row) for row in frac_matrix_inverse(gram))
    theta = tuple(_dot(w, omega) for w in weights)
    pairings = [_dot(omega, r) for r in roots]
    kappa = 0
    for p in pairings:
        if p.denominator != 1:
            raise PolyError("non-integral weight/root pairing")
        kappa = math.gcd(kappa, abs(p.numerator))
    mults = tuple(int(_dot(omega, cr)) for cr in coroots)
    return RootSystemData(kind, rank, tuple(roots), tuple(coroots), tuple(weights),
                          omega, dual, theta, kappa, mults)


def _build_a(rank: int) -> RootSystemData:
    n = rank + 1
    roots = [tuple(Fraction((i == j) - (i + 1 == j)) for j in range(n)) for i in range(rank)]
    coroots = list(roots)
    weights = []
    for i in range(1, rank + 1):
        w = [Fraction(1) - Fraction(i, n) if j < i else -Fraction(i, n) for j in range(n)]
        weights.append(tuple(w))
    return _finish("A", rank, roots, coroots, weights, weights[-1])


def _build_bc(kind: str, rank: int) -> RootSystemData:
    n = rank
    roots = [tuple(Fraction((i == j) - (i + 1 == j)) for j in range(n)) for i in range(rank - 1)]
    if kind == "B":
        roots.append(_basis_vector(n, rank - 1))
        coroots = [r for r in roots[:-1]] + [_basis_vector(n, rank - 1, Fraction(2))]
    else:  # C
        roots.append(_basis_vector(n, rank - 1, Fraction(2)))
        coroots = [r for r in roots[:-1]] + [_basis_vector(n, rank - 1)]
    weights = []
    for i in range(1, rank + 1):
        w = [Fraction(1) if j < i else Fraction(0) for j in range(n)]
        weights.append(tuple(w))
    if kind == "B":
        weights[-1] = tuple(Fraction(1, 2) for _ in range(n))
    return _finish(kind, rank, roots, coroots, weights, weights[0])


def _build_d(rank: int) -> RootSystemData:
    n = rank
    roots = [tuple(Fraction((i == j) - (i + 1 == j)) for j in range(n)) for i in range(rank - 1)]
    last = [Fraction(0)] * n
    last[rank - 2] = Fraction(1)
    last[rank - 1] = Fraction(1)
    roots.append(tuple(last))
    coroots = list(roots)
    weights = []
    for i in range(1, rank - 1):
        weights.append(tuple(Fraction(1) if j < i else Fraction(0) for j in range(n)))
    half = Fraction(1, 2)
    weights.append(tuple([half] * (rank - 1) + [-half]))   # omega_{rank-1}
    weights.append(tuple([half] * rank))                   # omega_rank
    return _finish("D", rank, roots, coroots, weights, weights[0])


def degree_vector(rs: RootSystemData, m: int | None = None) -> list[Fraction]:
    """Degrees d_alpha of the flat coordinates of the derived structure."""
    ell = rs.rank
    if rs.kind == "A":
        return [Fraction(a, ell + 1) for a in range(1, ell + 1)]
    if rs.kind == "C":
        if m is None or not 0 <= m <= ell:
            raise PolyError(f"type C needs a pencil parameter m in 0..{ell}")
        out = [Fraction(2 * (ell - m - a) + 1, 2 * (ell - m)) for a in range(1, ell - m + 1)]
        out += [Fraction(2 * (ell - b) + 1, 2 * m) for b in range(ell - m + 1, ell + 1)]
        return out
    raise PolyError(f"degree vector not defined for type {rs.kind}")
