"""Flat coordinates of the metric eta and pushforwards into them.

Type A: the flatness system eta^{ik} d2t/dy^k dy^j + Gamma^{ik}_j dt/dy^k = 0
is solved as a graded linear recursion for the gradient components,
normalized by psi^i_j(0) = delta^i_j.

Type C: a chain of charts z -> tau -> w -> v -> t.  tau is linear with a
block-Hankel eta; w absorbs the off-Hankel terms (constants solved level
by level); v is a monomial reparameterization with two designated
root variables; t adds quasi-homogeneous corrections h_alpha solved from
linear systems so that eta becomes a constant block matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .invariants import (
    InternalCheckError,
    MetricPencil,
    chart_table,
    eta_closed_form_a,
    gamma_eta_closed_form_a,
    metric_pencil_a,
)
from .pencil import blocks_of, shift_to_pencil_c, split_pencil, tau_change_c, tau_matrix
from .polyring import (
    CoordinateMap,
    GradedLaurentPoly,
    PolyError,
    PolyMatrix,
    VariableTable,
    frac_matrix_inverse,
    frac_solve,
    invert_triangular_map,
    matrix_adjugate_inverse,
)


@dataclass
class FlatChart:
    """Flat coordinates of eta plus everything needed to change charts."""

    kind: str
    ell: int
    m: int | None
    t_table: VariableTable
    degrees: tuple[Fraction, ...]
    eta_t: tuple[tuple[Fraction, ...], ...]
    z_table: VariableTable                     # pencil-generator chart, lambda-free
    z_in_t: list[GradedLaurentPoly]            # pencil generators expressed in t
    # type A data
    cmap: CoordinateMap | None = None          # y -> t (triangular polynomial map)
    # type C data
    tau_map: CoordinateMap | None = None       # z -> tau (linear)
    w_from_tau: list[list[Fraction]] | None = None   # w = L tau
    v_table: VariableTable | None = None
    w_in_v: list[GradedLaurentPoly] | None = None    # monomial map w = W(v)
    t_in_v: list[GradedLaurentPoly] | None = None
    v_in_t: list[GradedLaurentPoly] | None = None
    z_in_v: list[GradedLaurentPoly] | None = None
    dt_dz_in_v: PolyMatrix | None = None       # rows: grad of t^alpha w.r.t. z, in v coords

    # -- chart changes --------------------------------------------------
    def to_flat(self, metric_z: PolyMatrix) -> PolyMatrix:
        """Push a contravariant matrix from the pencil chart into t."""
        if self.kind == "A":
            return pushforward_metric(self.cmap, metric_z)
        X = self.dt_dz_in_v
        gz_v = metric_z.map(
            lambda p: p.substitute(
                {n: zi for n, zi in zip(self.z_table.names, self.z_in_v)}, self.v_table),
            self.v_table)
        g_v = X * gz_v * X.transpose()
        sub = {n: vt for n, vt in zip(self.v_table.names, self.v_in_t)}
        return g_v.map(lambda p: p.substitute(sub, self.t_table), self.t_table)

    def t_values(self, zvals) -> np.ndarray:
        """Numeric flat-coordinate values at a pencil-chart point."""
        zvals = np.asarray(zvals, dtype=complex)
        if self.kind == "A":
            vals = {n: zvals[i] for i, n in enumerate(self.z_table.names)}
            return np.array([f.evaluate(vals) for f in self.cmap.forward])
        tau = np.array([f.evaluate({n: zvals[i] for i, n in enumerate(self.z_table.names)})
                        for i2, f in enumerate(self.tau_map.forward)])
        L = np.array([[float(x) for x in row] for row in self.w_from_tau])
        w = L @ tau
        v = np.zeros(self.ell, dtype=complex)
        for (lo, hi) in blocks_of(self.ell, self.m):
            B = hi - lo
            pivot = w[hi - 1] ** (1.0 / (2 * B))
            v[hi - 1] = pivot
            if B >= 2:
                v[lo] = w[lo] / pivot
                for s in range(2, B):
                    v[lo + s - 1] = w[lo + s - 1] / pivot ** (2 * s)
        vvals = {n: v[i] for i, n in enumerate(self.v_table.names)}
        return np.array([f.evaluate(vvals) for f in self.t_in_v])


def pushforward_metric(chart, metric: PolyMatrix) -> PolyMatrix:
    """g^{ab}(t) = (dt^a/dy^i) g^{ij}(y) (dt^b/dy^j), re-expressed in t."""
    if isinstance(chart, FlatChart):
        return chart.to_flat(metric)
    cmap: CoordinateMap = chart
    n = len(cmap.target)
    jac = [[cmap.forward[a].partial(name) for name in cmap.source.names] for a in range(n)]
    zero = GradedLaurentPoly.zero(cmap.source)
    out = [[zero for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            acc = zero
            for i in range(n):
                if jac[a][i].is_zero():
                    continue
                for j in range(n):
                    if jac[b][j].is_zero() or metric[i, j].is_zero():
                        continue
                    acc = acc + jac[a][i] * metric[i, j] * jac[b][j]
            out[a][b] = acc
            out[b][a] = acc
    pushed = PolyMatrix(cmap.source, out)
    return pushed.map(cmap.to_target, cmap.target)


# ----------------------------------------------------------------------
# type A
# ----------------------------------------------------------------------

def flat_coords_a(ell: int, pencil: MetricPencil | None = None) -> FlatChart:
    pencil = pencil or metric_pencil_a(ell)
    g_y, eta_y = split_pencil(pencil)
    closed = eta_closed_form_a(ell)
    if eta_y != closed.map(lambda p: p.rename(eta_y.table), eta_y.table):
        raise InternalCheckError("computed A-type eta deviates from its closed form")
    y_table = eta_y.table
    eta_cov = matrix_adjugate_inverse(eta_y)
    gamma_up = gamma_eta_closed_form_a(ell, y_table)   # [k][i][j] = Gamma^{ij}_{eta,k}
    _check_connection_identities(eta_y, gamma_up)

    # gamma^k_{ij} = -eta_{ir} Gamma^{rk}_{eta,j}
    zero = GradedLaurentPoly.zero(y_table)
    gamma_low = [[[zero for _ in range(ell)] for _ in range(ell)] for _ in range(ell)]
    for i in range(ell):
        for j in range(ell):
            for k in range(ell):
                acc = zero
                for r in range(ell):
                    if eta_cov[i, r].is_zero() or gamma_up[j][r, k].is_zero():
                        continue
                    acc = acc - eta_cov[i, r] * gamma_up[j][r, k]
                gamma_low[i][j][k] = acc   # coefficient of psi_k in d psi_i / d y^j

    n1 = ell + 1
    psi: list[list[GradedLaurentPoly]] = []
    for alpha in range(1, ell + 1):
        row = [zero] * ell
        row[alpha - 1] = GradedLaurentPoly.const(y_table, 1)
        for i in range(alpha - 1, 0, -1):
            rhs = [zero] * ell   # rhs[j] = d psi_i / d y^j
            for j in range(ell):
                acc = zero
                for k in range(ell):
                    if gamma_low[i - 1][j][k].is_zero() or row[k].is_zero():
                        continue
                    acc = acc + gamma_low[i - 1][j][k] * row[k]
                rhs[j] = acc
            deg = Fraction(alpha - i, n1)
            cand = zero
            for j in range(ell):
                if not rhs[j].is_zero():
                    cand = cand + Fraction(j + 1, n1) * (
                        GradedLaurentPoly.variable(y_table, f"y{j + 1}") * rhs[j])
            cand = (Fraction(1) / deg) * cand
            for j in range(ell):
                if cand.partial(f"y{j + 1}") != rhs[j]:
                    raise InternalCheckError(
                        f"psi recursion inconsistent at alpha={alpha}, i={i}, j={j + 1}")
            row[i - 1] = cand
        psi.append(row)

    forward = []
    for alpha in range(1, ell + 1):
        t = zero
        for j in range(ell):
            if not psi[alpha - 1][j].is_zero():
                t = t + Fraction(j + 1, alpha) * (
                    GradedLaurentPoly.variable(y_table, f"y{j + 1}") * psi[alpha - 1][j])
        forward.append(t)

    degrees = tuple(Fraction(a, n1) for a in range(1, ell + 1))
    t_table = chart_table("t", ell, degrees, lam=False)
    cmap = invert_triangular_map(y_table, t_table, forward)

    # eta in flat coordinates: psi eta psi^T must be the constant anti-identity
    eta_flat = [[Fraction(0)] * ell for _ in range(ell)]
    for a in range(ell):
        for b in range(ell):
            acc = zero
            for i in range(ell):
                if psi[a][i].is_zero():
                    continue
                for j in range(ell):
                    if psi[b][j].is_zero() or eta_y[i, j].is_zero():
                        continue
                    acc = acc + psi[a][i] * eta_y[i, j] * psi[b][j]
            want = Fraction(n1) if a + b == ell - 1 else Fraction(0)
            if acc != GradedLaurentPoly.const(y_table, want):
                raise InternalCheckError(f"eta(t) not constant at ({a + 1},{b + 1})")
            eta_flat[a][b] = want

    return FlatChart(kind="A", ell=ell, m=None, t_table=t_table, degrees=degrees,
                     eta_t=tuple(tuple(r) for r in eta_flat), z_table=y_table,
                     z_in_t=list(cmap.inverse), cmap=cmap)


def _check_connection_identities(eta: PolyMatrix, gamma_up: list[PolyMatrix]) -> None:
    """Gamma + Gamma^T = d eta, and eta^{is} Gamma^{jk}_s = eta^{js} Gamma^{ik}_s."""
    ell = eta.rows
    table = eta.table
    for k in range(ell):
        for i in range(ell):
            for j in range(ell):
                lhs = gamma_up[k][i, j] + gamma_up[k][j, i]
                if lhs != eta[i, j].partial(f"y{k + 1}"):
                    raise InternalCheckError("Gamma + Gamma^T != d eta")
    zero = GradedLaurentPoly.zero(table)
    for i in range(ell):
        for j in range(ell):
            for k in range(ell):
                lhs = zero
                rhs = zero
                for s in range(ell):
                    if not (eta[i, s].is_zero() or gamma_up[s][j, k].is_zero()):
                        lhs = lhs + eta[i, s] * gamma_up[s][j, k]
                    if not (eta[j, s].is_zero() or gamma_up[s][i, k].is_zero()):
                        rhs = rhs + eta[j, s] * gamma_up[s][i, k]
                if lhs != rhs:
                    raise InternalCheckError("Levi-Civita compatibility identity fails")


# ----------------------------------------------------------------------
# type C: tau -> w level solve
# ----------------------------------------------------------------------

def _eta_coeff_matrices(eta_tau: PolyMatrix, ell: int) -> list[list[list[Fraction]]]:
    """H[k][i][j] = coefficient of tau^{k+1} in eta^{ij}; entries must be linear."""
    H = [[[Fraction(0)] * ell for _ in range(ell)] for _ in range(ell)]
    for i in range(ell):
        for j in range(ell):
            p = eta_tau[i, j]
            for exp, c in p.terms.items():
                if sum(abs(e) for e in exp) != 1:
                    raise InternalCheckError("eta(tau) entry is not linear")
                k = next(idx for idx, e in enumerate(exp) if e)
                H[k][i][j] = c
    return H


def _transform_linear_eta(H: list[list[list[Fraction]]], L: list[list[Fraction]],
                          ell: int) -> list[list[list[Fraction]]]:
    """Coefficient matrices of eta after the linear change w' = L w."""
    Linv = frac_matrix_inverse(L)
    mid = []
    for r in range(ell):
        M = [[Fraction(0)] * ell for _ in range(ell)]
        for i in range(ell):
            for a in range(ell):
                if L[i][a] == 0:
                    continue
                for b in range(ell):
                    hab = H[r][a][b]
                    if hab == 0:
                        continue
                    for j in range(ell):
                        if L[j][b]:
                            M[i][j] += L[i][a] * hab * L[j][b]
        mid.append(M)
    out = [[[Fraction(0)] * ell for _ in range(ell)] for _ in range(ell)]
    for r in range(ell):
        for k in range(ell):
            c = Linv[r][k]
            if c == 0:
                continue
            for i in range(ell):
                for j in range(ell):
                    if mid[r][i][j]:
                        out[k][i][j] += c * mid[r][i][j]
    return out


def _level_target(ell: int, m: int):
    """Clean Hankel target: coefficient 4s of w^{lo+s} on the s-th anti-diagonal."""
    T = [[[Fraction(0)] * ell for _ in range(ell)] for _ in range(ell)]
    for (lo, hi) in blocks_of(ell, m):
        for i in range(lo, hi):
            for j in range(lo, hi):
                v = i + j - lo
                if v < hi:
                    T[v][i][j] = Fraction(4 * (i + j - 2 * lo + 1))
    return T


def solve_w_chart(ell: int, m: int, eta_tau: PolyMatrix) -> list[list[Fraction]]:
    """Constants of the unipotent change w = L tau cleaning eta to 4s w^s form."""
    H = _eta_coeff_matrices(eta_tau, ell)
    blocks = blocks_of(ell, m)
    for (lo, hi) in blocks:      # block-diagonality and no sub-diagonal terms
        for i in range(lo, hi):
            for j in range(ell):
                if not (lo <= j < hi):
                    for k in range(ell):
                        if H[k][i][j] != 0:
                            raise InternalCheckError("eta(tau) is not block diagonal")
    L_total = [[Fraction(1 if i == j else 0) for j in range(ell)] for i in range(ell)]
    maxlev = max((hi - lo) for (lo, hi) in blocks) - 1
    target = _level_target(ell, m)

    def level_entries(Hc, D):
        """Level-D coefficients, listed per in-block entry (i <= j)."""
        vals = []
        for (lo, hi) in blocks:
            for i in range(lo, hi):
                for j in range(i, hi):
                    v = i + j - lo + D
                    if v < hi:
                        vals.append(Hc[v][i][j])
        return vals

    for D in range(1, maxlev + 1):
        movable = [j for (lo, hi) in blocks for j in range(lo, hi)
                   if j + D < hi and j != hi - 1]
        base = level_entries(H, D)
        if movable:
            cols = []
            for u in movable:
                L = [[Fraction(1 if i == j else 0) for j in range(ell)] for i in range(ell)]
                L[u][u + D] = Fraction(1)
                probe = level_entries(_transform_linear_eta(H, L, ell), D)
                cols.append([p - b for p, b in zip(probe, base)])
            A = [[cols[c][r] for c in range(len(movable))] for r in range(len(base))]
            rhs = [-b for b in base]
            gamma = frac_solve(A, rhs)
            L = [[Fraction(1 if i == j else 0) for j in range(ell)] for i in range(ell)]
            for u, g in zip(movable, gamma):
                L[u][u + D] = g
            H = _transform_linear_eta(H, L, ell)
            L_total = [[sum(L[i][k] * L_total[k][j] for k in range(ell))
                        for j in range(ell)] for i in range(ell)]
        for e in range(0, D + 1):
            for (lo, hi) in blocks:
                for i in range(lo, hi):
                    for j in range(i, hi):
                        v = i + j - lo + e
                        if v < hi and H[v][i][j] != target[v][i][j]:
                            raise InternalCheckError(
                                f"w-chart level {e} not clean after solving level {D}")
    if H != target:
        raise InternalCheckError("eta(w) does not reach the clean Hankel form")
    return L_total


# ----------------------------------------------------------------------
# type C: w -> v -> t
# ----------------------------------------------------------------------

def _v_table(ell: int, m: int) -> VariableTable:
    degs = [Fraction(0)] * ell
    inv = []
    for (lo, hi) in blocks_of(ell, m):
        B = hi - lo
        degs[hi - 1] = Fraction(1, 2 * B)
        inv.append(hi)
        if B >= 2:
            degs[lo] = 1 - Fraction(1, 2 * B)
            for s in range(2, B):
                degs[lo + s - 1] = 1 - Fraction(s, B)
    return VariableTable.make([(f"v{i + 1}", degs[i], (i + 1) in inv) for i in range(ell)])


def _w_in_v(table: VariableTable, ell: int, m: int) -> list[GradedLaurentPoly]:
    out = [None] * ell
    for (lo, hi) in blocks_of(ell, m):
        B = hi - lo
        piv = f"v{hi}"
        out[hi - 1] = GradedLaurentPoly.monomial(table, 1, {piv: 2 * B})
        if B >= 2:
            out[lo] = GradedLaurentPoly.monomial(table, 1, {f"v{lo + 1}": 1, piv: 1})
            for s in range(2, B):
                out[lo + s - 1] = GradedLaurentPoly.monomial(
                    table, 1, {f"v{lo + s}": 1, piv: 2 * s})
    return out


def expected_eta_v(table: VariableTable, ell: int, m: int) -> PolyMatrix:
    zero = GradedLaurentPoly.zero(table)
    rows = [[zero for _ in range(ell)] for _ in range(ell)]
    for (lo, hi) in blocks_of(ell, m):
        B = hi - lo
        if B == 1:
            rows[lo][lo] = GradedLaurentPoly.const(table, 1)
            continue
        piv = f"v{hi}"
        rows[lo][hi - 1] = GradedLaurentPoly.const(table, 2)
        rows[hi - 1][lo] = GradedLaurentPoly.const(table, 2)
        for li in range(1, B):
            for lj in range(1, B):
                s = li + lj + 1
                if s > B:
                    continue
                exp = {piv: -2} if s == B else {piv: -2, f"v{lo + s}": 1}
                rows[lo + li][lo + lj] = GradedLaurentPoly.monomial(table, 4 * s, exp)
    return PolyMatrix(table, rows)


def _block_flat_target(ell: int, m: int) -> list[list[Fraction]]:
    T = [[Fraction(0)] * ell for _ in range(ell)]
    for (lo, hi) in blocks_of(ell, m):
        B = hi - lo
        if B == 1:
            T[lo][lo] = Fraction(1)
            continue
        for r in range(1, B + 1):
            c = B + 1 - r
            T[lo + r - 1][lo + c - 1] = Fraction(2) if min(r, c) == 1 else Fraction(4 * B)
    return T


def _h_monomials(table: VariableTable, lo: int, B: int, alpha: int) -> list[dict[str, int]]:
    """Exponent dicts over v^{lo+alpha+1}..v^{lo+B-1} with sum e_s (B-s) = B - alpha."""
    names = [(f"v{lo + s}", B - s) for s in range(alpha + 1, B)]
    out: list[dict[str, int]] = []

    def rec(idx: int, remaining: int, acc: dict[str, int]):
        if idx == len(names):
            if remaining == 0:
                out.append(dict(acc))
            return
        name, wgt = names[idx]
        for e in range(remaining // wgt + 1):
            if e:
                acc[name] = e
            rec(idx + 1, remaining - e * wgt, acc)
            acc.pop(name, None)

    rec(0, B - alpha, {})
    return out


def flat_coords_c(ell: int, m: int,
                  tau_data: tuple[CoordinateMap, PolyMatrix] | None = None) -> FlatChart:
    spec, pencil_z = shift_to_pencil_c(ell, m)
    g_z, eta_z = split_pencil(pencil_z)
    cmap_tau, eta_tau = tau_data or tau_change_c(ell, m, eta_z)
    L = solve_w_chart(ell, m, eta_tau)

    vt = _v_table(ell, m)
    w_v = _w_in_v(vt, ell, m)
    jac_wv = PolyMatrix(vt, [[w_v[a].partial(f"v{k + 1}") for k in range(ell)]
                             for a in range(ell)])
    jac_vw = matrix_adjugate_inverse(jac_wv)

    # eta in w coordinates, then in v
    Linv = frac_matrix_inverse(L)
    tau_in_v = []    # tau = L^{-1} w, w = W(v)
    for r in range(ell):
        p = GradedLaurentPoly.zero(vt)
        for k in range(ell):
            if Linv[r][k]:
                p = p + Linv[r][k] * w_v[k]
        tau_in_v.append(p)
    eta_w_entries = [[GradedLaurentPoly.zero(vt) for _ in range(ell)] for _ in range(ell)]
    H = _eta_coeff_matrices(eta_tau, ell)
    # eta(dw^i, dw^j) = sum L[i][a] H[a][b-coeff...] ... compute via transform
    Hw = _transform_linear_eta(H, L, ell)
    for i in range(ell):
        for j in range(ell):
            acc = GradedLaurentPoly.zero(vt)
            for k in range(ell):
                if Hw[k][i][j]:
                    acc = acc + Hw[k][i][j] * w_v[k]
            eta_w_entries[i][j] = acc
    eta_w_v = PolyMatrix(vt, eta_w_entries)
    eta_v = jac_vw * eta_w_v * jac_vw.transpose()
    if eta_v != expected_eta_v(vt, ell, m):
        raise InternalCheckError("eta(v) deviates from the expected block form")

    # flat coordinates per block, solved from the flatness system
    # d_i d_j t = Gamma^k_{ij} d_k t (linear in the h_alpha coefficients)
    gamma_v = _christoffel_lower(eta_v)
    target = _block_flat_target(ell, m)

    def flat_residuals(p: GradedLaurentPoly) -> list[GradedLaurentPoly]:
        out = []
        grad = [p.partial(f"v{k + 1}") for k in range(ell)]
        for i in range(ell):
            for j in range(i, ell):
                r = grad[i].partial(f"v{j + 1}")
                for k in range(ell):
                    if not (gamma_v[k][i, j].is_zero() or grad[k].is_zero()):
                        r = r - gamma_v[k][i, j] * grad[k]
                out.append(r)
        return out

    t_exprs: list[GradedLaurentPoly | None] = [None] * ell
    for (lo, hi) in blocks_of(ell, m):
        B = hi - lo
        piv = f"v{hi}"
        for alpha in range(B, 0, -1):
            gidx = lo + alpha - 1
            if alpha == B:
                base = GradedLaurentPoly.variable(vt, piv)
            elif alpha == 1:
                base = GradedLaurentPoly.variable(vt, f"v{lo + 1}")
            else:
                base = GradedLaurentPoly.monomial(vt, 1, {f"v{lo + alpha}": 1, piv: 1})
            monos = _h_monomials(vt, lo, B, alpha) if alpha < B else []
            cands = [GradedLaurentPoly.monomial(vt, 1, {**mono, piv: 1}) for mono in monos]
            r0 = flat_residuals(base)
            rcs = [flat_residuals(c) for c in cands]
            if cands:
                rows_A: list[list[Fraction]] = []
                rhs: list[Fraction] = []
                for pos in range(len(r0)):
                    exps = set(r0[pos].terms) | {e for rc in rcs for e in rc[pos].terms}
                    for e in exps:
                        rows_A.append([rc[pos].terms.get(e, Fraction(0)) for rc in rcs])
                        rhs.append(-r0[pos].terms.get(e, Fraction(0)))
                coeffs = frac_solve(rows_A, rhs)
                for c, cand in zip(coeffs, cands):
                    if c:
                        base = base + c * cand
            for r in flat_residuals(base):
                if not r.is_zero():
                    raise InternalCheckError(
                        f"flatness system unsolved for t^{gidx + 1}")
            t_exprs[gidx] = base

    t_list = [p for p in t_exprs]
    for (lo, hi) in blocks_of(ell, m):
        for i in range(lo, hi):
            for j in range(lo, hi):
                got = _eta_pair(eta_v, vt, t_list[i], t_list[j])
                if got != GradedLaurentPoly.const(vt, target[i][j]):
                    raise InternalCheckError(
                        f"eta(t) entry ({i + 1},{j + 1}) is not the required constant")
    # cross-block entries vanish because eta(v) is block diagonal and the
    # blocks use disjoint variables; assert anyway
    for (lo, hi) in blocks_of(ell, m):
        for (lo2, hi2) in blocks_of(ell, m):
            if lo2 <= lo:
                continue
            for i in range(lo, hi):
                for j in range(lo2, hi2):
                    if not _eta_pair(eta_v, vt, t_list[i], t_list[j]).is_zero():
                        raise InternalCheckError("cross-block eta(t) entry is nonzero")

    degrees = tuple(_degrees_c(ell, m))
    inv_idx = tuple(hi for (lo, hi) in blocks_of(ell, m))
    t_table = VariableTable.make(
        [(f"t{i + 1}", degrees[i], (i + 1) in inv_idx) for i in range(ell)])
    for i in range(ell):
        if t_list[i].homogeneous_degree() != degrees[i]:
            raise InternalCheckError("flat coordinate degree mismatch")

    # invert t(v) blockwise: pivots first, then descending within blocks
    v_in_t: list[GradedLaurentPoly | None] = [None] * ell
    for (lo, hi) in blocks_of(ell, m):
        B = hi - lo
        v_in_t[hi - 1] = GradedLaurentPoly.variable(t_table, f"t{hi}")
        piv_inv = GradedLaurentPoly.monomial(t_table, 1, {f"t{hi}": -1})
        for alpha in range(B - 1, 0, -1):
            gidx = lo + alpha - 1
            corr = t_exprs[gidx] - (
                GradedLaurentPoly.variable(vt, f"v{lo + 1}") if alpha == 1
                else GradedLaurentPoly.monomial(vt, 1, {f"v{lo + alpha}": 1, f"v{hi}": 1}))
            sub = {}
            for k in range(ell):
                sub[f"v{k + 1}"] = (v_in_t[k] if v_in_t[k] is not None
                                    else GradedLaurentPoly.zero(t_table))
            corr_t = corr.substitute(sub, t_table)
            tvar = GradedLaurentPoly.variable(t_table, f"t{gidx + 1}")
            if alpha == 1:
                v_in_t[gidx] = tvar - corr_t
            else:
                v_in_t[gidx] = (tvar - corr_t) * piv_inv
    v_in_t_list = [p for p in v_in_t]
    for i in range(ell):   # round trip
        sub = {f"v{k + 1}": v_in_t_list[k] for k in range(ell)}
        if t_list[i].substitute(sub, t_table) != GradedLaurentPoly.variable(
                t_table, f"t{i + 1}"):
            raise InternalCheckError("t(v) inversion round trip failed")

    # z in v: z = T tau, tau = L^{-1} w, w = W(v)
    T = tau_matrix(ell, m)
    z_in_v = []
    for i in range(ell):
        p = GradedLaurentPoly.zero(vt)
        for j in range(ell):
            if T[i][j] and not tau_in_v[j].is_zero():
                p = p + T[i][j] * tau_in_v[j]
        z_in_v.append(p)
    z_in_t = [p.substitute({f"v{k + 1}": v_in_t_list[k] for k in range(ell)}, t_table)
              for p in z_in_v]

    # dt/dz in v coordinates: (dt/dv) (dz/dv)^{-1}
    jac_tv = PolyMatrix(vt, [[t_list[a].partial(f"v{k + 1}") for k in range(ell)]
                             for a in range(ell)])
    jac_zv = PolyMatrix(vt, [[z_in_v[a].partial(f"v{k + 1}") for k in range(ell)]
                             for a in range(ell)])
    X = jac_tv * matrix_adjugate_inverse(jac_zv)

    return FlatChart(kind="C", ell=ell, m=m, t_table=t_table, degrees=degrees,
                     eta_t=tuple(tuple(row) for row in target),
                     z_table=eta_z.table, z_in_t=z_in_t,
                     tau_map=cmap_tau, w_from_tau=L, v_table=vt, w_in_v=w_v,
                     t_in_v=t_list, v_in_t=v_in_t_list, z_in_v=z_in_v, dt_dz_in_v=X)


def _degrees_c(ell: int, m: int) -> list[Fraction]:
    out = []
    for a in range(1, ell - m + 1):
        out.append(Fraction(2 * (ell - m - a) + 1, 2 * (ell - m)))
    for b in range(ell - m + 1, ell + 1):
        out.append(Fraction(2 * (ell - b) + 1, 2 * m))
    return out


def _christoffel_lower(eta_contra: PolyMatrix) -> list[PolyMatrix]:
    """Levi-Civita Gamma^k_{ij} of the metric with contravariant entries
    eta_contra, as a list over k of (i,j) matrices (exact Laurent)."""
    table = eta_contra.table
    n = eta_contra.rows
    names = table.names
    eta_cov = matrix_adjugate_inverse(eta_contra)
    d_cov = [[[eta_cov[l, j].partial(names[i]) for j in range(n)] for l in range(n)]
             for i in range(n)]   # d_cov[i][l][j] = d eta_{lj} / d x^i
    zero = GradedLaurentPoly.zero(table)
    out = []
    for k in range(n):
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for l in range(n):
                    if eta_contra[k, l].is_zero():
                        continue
                    s = d_cov[i][l][j] + d_cov[j][l][i] - d_cov[l][i][j]
                    if not s.is_zero():
                        acc = acc + Fraction(1, 2) * (eta_contra[k, l] * s)
                row.append(acc)
            rows.append(row)
        out.append(PolyMatrix(table, rows))
    return out


def _eta_pair(eta_v: PolyMatrix, vt: VariableTable,
              p: GradedLaurentPoly, q: GradedLaurentPoly) -> GradedLaurentPoly:
    """eta(dp, dq) for scalar functions p, q on the v chart."""
    ell = eta_v.rows
    dp = [p.partial(f"v{k + 1}") for k in range(ell)]
    dq = [q.partial(f"v{k + 1}") for k in range(ell)]
    acc = GradedLaurentPoly.zero(vt)
    for i in range(ell):
        if dp[i].is_zero():
            continue
        for j in range(ell):
            if dq[j].is_zero() or eta_v[i, j].is_zero():
                continue
            acc = acc + dp[i] * eta_v[i, j] * dq[j]
    return acc
