"""C-type pencil generators: constant shift, lambda-splitting, tau chart.

The shift z^j = y^j + c_j*lambda with coefficients generated by
P0(u) = u^l - (u+2)^m (u-2)^{l-m} makes both the metric and its
Christoffel data linear in lambda; the subsequent linear change to tau
brings eta to a block anti-triangular (Hankel) form whose determinant
is an explicit monomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .invariants import InternalCheckError, MetricPencil, chart_table, metric_pencil_c
from .polyring import (
    CoordinateMap,
    GradedLaurentPoly,
    PolyError,
    PolyMatrix,
    VariableTable,
    frac_matrix_inverse,
)


def _binomial_poly(a: int, sign: int, power: int) -> list[Fraction]:
    """Coefficients of (u + sign*a)^power, ascending in u."""
    out = [Fraction(0)] * (power + 1)
    from math import comb
    for k in range(power + 1):
        out[k] = Fraction(comb(power, k) * (sign * a) ** (power - k))
    return out


def _poly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def pencil_shift_constants(ell: int, m: int) -> list[Fraction]:
    """c_1..c_l from P0(u) = u^l - (u+2)^m (u-2)^{l-m}; c_j is the u^{l-j} coefficient."""
    if not 0 <= m <= ell:
        raise PolyError(f"pencil parameter m={m} outside 0..{ell}")
    p1 = _poly_mul(_binomial_poly(2, +1, m), _binomial_poly(2, -1, ell - m))
    p0 = [-c for c in p1]
    p0[ell] += 1
    if p0[ell] != 0:
        raise InternalCheckError("P0 has a u^l term; shift is not degree-preserving")
    return [p0[ell - j] for j in range(1, ell + 1)]


@dataclass
class PencilSpec:
    """Shift data for one choice of the pencil parameter m."""

    ell: int
    m: int
    c: tuple[Fraction, ...]          # z^j = y^j + c_j * lambda
    p1: tuple[Fraction, ...]         # (u+2)^m (u-2)^{l-m}, ascending
    p2: tuple[Fraction, ...]         # (u-2)^m (u+2)^{l-m}, ascending

    @classmethod
    def build(cls, ell: int, m: int) -> "PencilSpec":
        c = pencil_shift_constants(ell, m)
        p1 = _poly_mul(_binomial_poly(2, +1, m), _binomial_poly(2, -1, ell - m))
        p2 = _poly_mul(_binomial_poly(2, -1, m), _binomial_poly(2, +1, ell - m))
        return cls(ell, m, tuple(c), tuple(p1), tuple(p2))

    def to_json_dict(self) -> dict:
        return {"rank": self.ell, "m": self.m, "shift": [str(v) for v in self.c]}


def shift_to_pencil_c(ell: int, m: int,
                      base: MetricPencil | None = None) -> tuple[PencilSpec, MetricPencil]:
    """Substitute y^j = z^j - c_j*lambda and enforce lambda-linearity."""
    spec = PencilSpec.build(ell, m)
    base = base or metric_pencil_c(ell)
    z_table = chart_table("z", ell, [Fraction(1)] * ell)
    lam = GradedLaurentPoly.variable(z_table, "lambda")
    mapping = {"lambda": lam}
    for j in range(1, ell + 1):
        mapping[f"y{j}"] = GradedLaurentPoly.variable(z_table, f"z{j}") - spec.c[j - 1] * lam

    def shift(p: GradedLaurentPoly) -> GradedLaurentPoly:
        return p.substitute(mapping, z_table)

    glam_z = base.glam.map(shift, z_table)
    for i in range(ell):
        for j in range(ell):
            if glam_z[i, j].var_range("lambda")[1] > 1:
                raise InternalCheckError(
                    f"residual lambda^2 term in shifted metric entry ({i+1},{j+1})")
    christoffel_z = None
    if base.christoffel is not None:
        christoffel_z = [G.map(shift, z_table) for G in base.christoffel]
        for k, G in enumerate(christoffel_z, start=1):
            for i in range(ell):
                for j in range(ell):
                    if G[i, j].var_range("lambda")[1] > 1:
                        raise InternalCheckError(
                            f"residual lambda^2 term in shifted Christoffel ({i+1},{j+1},{k})")
    return spec, MetricPencil(z_table, glam_z, christoffel=christoffel_z, chart="z")


def split_pencil(pencil: MetricPencil) -> tuple[PolyMatrix, PolyMatrix]:
    """Split g_lambda = g + lambda*eta; entries must be at most linear in lambda."""
    table = pencil.table
    names = [n for n in table.names if n != "lambda"]
    bare = VariableTable(
        tuple(names),
        tuple(table.degrees[table.index(n)] for n in names),
        tuple(table.invertible[table.index(n)] for n in names))
    mapping = {n: GradedLaurentPoly.variable(bare, n) for n in names}

    def at_zero(p: GradedLaurentPoly) -> GradedLaurentPoly:
        if p.var_range("lambda")[1] > 1:
            raise PolyError("entry has lambda-degree > 1; not a linear pencil")
        return p.coefficient({"lambda": 0}).substitute(
            {**mapping, "lambda": GradedLaurentPoly.zero(bare)}, bare)

    def lam_part(p: GradedLaurentPoly) -> GradedLaurentPoly:
        return p.coefficient({"lambda": 1}).substitute(
            {**mapping, "lambda": GradedLaurentPoly.zero(bare)}, bare)

    g = pencil.glam.map(at_zero, bare)
    eta = pencil.glam.map(lam_part, bare)
    if not (g.is_symmetric() and eta.is_symmetric()):
        raise InternalCheckError("split pencil lost symmetry")
    return g, eta


# ----------------------------------------------------------------------
# tau chart
# ----------------------------------------------------------------------

def tau_matrix(ell: int, m: int) -> list[list[Fraction]]:
    """Matrix T with z = T tau, read off the generating identity."""
    cols: list[list[Fraction]] = []
    for j in range(1, ell + 1):
        if j <= ell - m:
            p = _poly_mul(_binomial_poly(2, +1, m), _binomial_poly(2, -1, ell - m - j))
        else:
            p = [-c for c in _poly_mul(_binomial_poly(2, +1, ell - j),
                                       _binomial_poly(2, -1, j - 1))]
        # z^i is the u^{l-i} coefficient
        col = [p[ell - i] if ell - i < len(p) else Fraction(0) for i in range(1, ell + 1)]
        cols.append(col)
    return [[cols[j][i] for j in range(ell)] for i in range(ell)]


def blocks_of(ell: int, m: int) -> list[tuple[int, int]]:
    """Half-open (lo, hi) index ranges of the two eta blocks (0-based)."""
    out = []
    if ell - m > 0:
        out.append((0, ell - m))
    if m > 0:
        out.append((ell - m, ell))
    return out


def expected_eta_tau(ell: int, m: int, table: VariableTable) -> PolyMatrix:
    """Block Hankel form with R_s = 4s tau^s + (s+1) tau^{s+1} (first block)
    and S_r = 4r tau^{l-m+r} - 4r tau^{l-m+r+1} (second block)."""
    zero = GradedLaurentPoly.zero(table)
    rows = [[zero for _ in range(ell)] for _ in range(ell)]
    for (lo, hi) in blocks_of(ell, m):
        size = hi - lo
        first = lo == 0 and ell - m > 0
        for li in range(size):
            for lj in range(size):
                s = li + lj + 1
                if s > size:
                    continue
                var = f"tau{lo + s}"
                if first:
                    entry = GradedLaurentPoly.monomial(table, 4 * s, {var: 1})
                    if s < size:
                        entry = entry + GradedLaurentPoly.monomial(
                            table, s + 1, {f"tau{lo + s + 1}": 1})
                else:
                    entry = GradedLaurentPoly.monomial(table, 4 * s, {var: 1})
                    if s < size:
                        entry = entry - GradedLaurentPoly.monomial(
                            table, 4 * s, {f"tau{lo + s + 1}": 1})
                rows[lo + li][lo + lj] = entry
    return PolyMatrix(table, rows)


def det_eta_tau_printed(ell: int, m: int, table: VariableTable) -> tuple[GradedLaurentPoly, int]:
    """(|det| as a monomial, printed sign) of eta in the tau chart."""
    if m in (0, ell):
        mag = GradedLaurentPoly.monomial(table, Fraction(4 ** ell * ell ** ell),
                                         {f"tau{ell}": ell})
        sign = (-1) ** ((ell * (ell - 1) // 2) % 2)
    else:
        coeff = Fraction(4 ** ell * m ** m * (ell - m) ** (ell - m))
        mag = GradedLaurentPoly.monomial(table, coeff,
                                         {f"tau{ell - m}": ell - m, f"tau{ell}": m})
        expo = (ell * ell - (2 * m + 1) * ell + 2 * m * m) // 2
        sign = (-1) ** (expo % 2)
    return mag, sign


def tau_change_c(ell: int, m: int,
                 eta_z: PolyMatrix | None = None) -> tuple[CoordinateMap, PolyMatrix]:
    """Linear chart z -> tau; returns the map and eta in tau coordinates."""
    if eta_z is None:
        _, pz = shift_to_pencil_c(ell, m)
        _, eta_z = split_pencil(pz)
    z_table = eta_z.table
    tau_table = chart_table("tau", ell, [Fraction(1)] * ell, lam=False,
                            invertible=(ell - m, ell) if m not in (0, ell) else (ell,))
    T = tau_matrix(ell, m)
    Tinv = frac_matrix_inverse(T)
    forward = []   # tau^i in z
    for i in range(ell):
        p = GradedLaurentPoly.zero(z_table)
        for j in range(ell):
            if Tinv[i][j]:
                p = p + Tinv[i][j] * GradedLaurentPoly.variable(z_table, f"z{j + 1}")
        forward.append(p)
    inverse = []   # z^i in tau
    for i in range(ell):
        p = GradedLaurentPoly.zero(tau_table)
        for j in range(ell):
            if T[i][j]:
                p = p + T[i][j] * GradedLaurentPoly.variable(tau_table, f"tau{j + 1}")
        inverse.append(p)
    cmap = CoordinateMap(z_table, tau_table, forward, inverse)
    cmap.verify_roundtrip()

    # eta(d tau^i, d tau^j) = Tinv eta Tinv^T, re-expressed in tau
    z_to_tau = {f"z{j + 1}": inverse[j] for j in range(ell)}
    zero = GradedLaurentPoly.zero(tau_table)
    entries = [[zero for _ in range(ell)] for _ in range(ell)]
    eta_in_tau = eta_z.map(lambda p: p.substitute(z_to_tau, tau_table), tau_table)
    for i in range(ell):
        for j in range(ell):
            acc = zero
            for a in range(ell):
                if Tinv[i][a] == 0:
                    continue
                for b in range(ell):
                    if Tinv[j][b] == 0 or eta_in_tau[a, b].is_zero():
                        continue
                    acc = acc + (Tinv[i][a] * Tinv[j][b]) * eta_in_tau[a, b]
            entries[i][j] = acc
    eta_tau = PolyMatrix(tau_table, entries)
    if eta_tau != expected_eta_tau(ell, m, tau_table):
        raise InternalCheckError("eta in tau coordinates deviates from the Hankel block form")
    det = eta_tau.det()
    mag, printed_sign = det_eta_tau_printed(ell, m, tau_table)
    if det != printed_sign * mag and det != -(printed_sign * mag):
        raise InternalCheckError("det eta(tau) magnitude mismatch")
    return cmap, eta_tau
