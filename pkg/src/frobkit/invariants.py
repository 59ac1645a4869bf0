"""Metric pencils on the orbit-space charts of basic generators.

Type A is computed in auxiliary root variables u_1..u_{l+1} and reduced
to the elementary symmetric basis (y^1..y^l, lambda); type C comes from
closed generating functions in two formal variables u, v.  The B/D
cases are exercised purely numerically through their reduction to the
C-type metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polyring import (
    GradedLaurentPoly,
    PolyError,
    PolyMatrix,
    VariableTable,
    divide_by_linear,
    elementary_symmetric,
    reduce_symmetric,
)

TWO_PI = 2.0 * math.pi


class InternalCheckError(RuntimeError):
    """A structural identity the construction guarantees has failed."""


@dataclass
class MetricPencil:
    """Contravariant metric g_lambda in a named generator chart.

    ``glam`` entries are polynomials in the chart variables and lambda;
    ``christoffel[k][i][j]`` (when present) is the contravariant
    Christoffel generating coefficient paired with d(chart var k).
    """

    table: VariableTable
    glam: PolyMatrix
    christoffel: list[PolyMatrix] | None = None
    chart: str = "y"


def chart_table(prefix: str, ell: int, degrees, *, lam: bool = True,
                invertible: tuple[int, ...] = ()) -> VariableTable:
    spec = [(f"{prefix}{j}", degrees[j - 1], j in invertible) for j in range(1, ell + 1)]
    if lam:
        spec.append(("lambda", Fraction(1), False))
    return VariableTable.make(spec)


# ----------------------------------------------------------------------
# type A
# ----------------------------------------------------------------------

def metric_pencil_a(ell: int, rank_cap: int = 6) -> MetricPencil:
    """A-type pencil g_lambda^{ij} in the chart (y^1..y^l, lambda)."""
    if not 1 <= ell <= rank_cap:
        raise PolyError(f"rank {ell} outside 1..{rank_cap}")
    n = ell + 1
    u_table = VariableTable.make([(f"u{i}", Fraction(1, n)) for i in range(1, n + 1)])
    y_table = chart_table("y", ell, [Fraction(j, n) for j in range(1, n + 1)])
    target_names = [f"y{j}" for j in range(1, ell + 1)] + ["lambda"]

    # sigma_{a-1} with one variable omitted, as polynomials in u
    sig_hat: dict[tuple[int, int], GradedLaurentPoly] = {}
    for r in range(n):
        others = [f"u{i + 1}" for i in range(n) if i != r]
        for a in range(ell + 1):
            sig_hat[(a, r)] = elementary_symmetric(u_table, a, others)
    uvars = [GradedLaurentPoly.variable(u_table, f"u{i + 1}") for i in range(n)]

    zero = GradedLaurentPoly.zero(u_table)
    entries = [[zero for _ in range(ell)] for _ in range(ell)]
    vec_cache: dict[int, list[GradedLaurentPoly]] = {}

    def u_sigma(a: int) -> list[GradedLaurentPoly]:
        if a not in vec_cache:
            vec_cache[a] = [uvars[r] * sig_hat[(a, r)] for r in range(n)]
        return vec_cache[a]

    for a in range(1, ell + 1):
        va = u_sigma(a - 1)
        sum_a = zero
        for p in va:
            sum_a = sum_a + p
        for b in range(a, ell + 1):
            vb = u_sigma(b - 1) if b != a else va
            sum_b = sum_a if b == a else zero
            if b != a:
                for p in vb:
                    sum_b = sum_b + p
            diag = zero
            for r in range(n):
                diag = diag + va[r] * vb[r]
            g_u = Fraction(1, n) * (sum_a * sum_b) - diag
            g = reduce_symmetric(g_u, y_table, target_names, max_vars=rank_cap + 1)
            entries[a - 1][b - 1] = g
            entries[b - 1][a - 1] = g

    glam = PolyMatrix(y_table, entries)
    _assert_a_structure(glam, ell)
    return MetricPencil(y_table, glam, chart="y")


def _assert_a_structure(glam: PolyMatrix, ell: int) -> None:
    for i in range(1, ell + 1):
        for j in range(1, ell + 1):
            lo, hi = glam[i - 1, j - 1].var_range("lambda")
            if hi > 1 or lo < 0:
                raise InternalCheckError(f"A-type entry ({i},{j}) has lambda-degree {hi}")
            if i + j <= ell and hi != 0:
                raise InternalCheckError(f"A-type entry ({i},{j}) should be lambda-free")
            want = Fraction(i + j, ell + 1)
            if not glam[i - 1, j - 1].is_zero() and glam[i - 1, j - 1].homogeneous_degree() != want:
                raise InternalCheckError(f"A-type entry ({i},{j}) has wrong degree")


def eta_closed_form_a(ell: int) -> PolyMatrix:
    """Closed-form eta^{ij}: (2l+2-i-j) y^{i+j-1-l} above the anti-diagonal."""
    table = chart_table("y", ell, [Fraction(j, ell + 1) for j in range(1, ell + 1)],
                        lam=False)
    zero = GradedLaurentPoly.zero(table)
    rows = []
    for i in range(1, ell + 1):
        row = []
        for j in range(1, ell + 1):
            if i + j <= ell:
                row.append(zero)
            elif i + j == ell + 1:
                row.append(GradedLaurentPoly.const(table, ell + 1))
            else:
                row.append(GradedLaurentPoly.monomial(
                    table, 2 * ell + 2 - i - j, {f"y{i + j - 1 - ell}": 1}))
        rows.append(row)
    return PolyMatrix(table, rows)


def gamma_eta_closed_form_a(ell: int, table: VariableTable) -> list[PolyMatrix]:
    """Contravariant Christoffel of the A-type eta: (l+1-j) delta_{i+j-k, l+1}.

    Returned as a list over k (1-based chart variables) of l x l matrices.
    """
    out = []
    for k in range(1, ell + 1):
        rows = []
        for i in range(1, ell + 1):
            row = []
            for j in range(1, ell + 1):
                val = ell + 1 - j if i + j - k == ell + 1 else 0
                row.append(GradedLaurentPoly.const(table, val))
            rows.append(row)
        out.append(PolyMatrix(table, rows))
    return out


# ----------------------------------------------------------------------
# type C
# ----------------------------------------------------------------------

def _c_working_table(ell: int) -> VariableTable:
    spec = [("u", 0), ("v", 0)]
    spec += [(f"y{j}", 1) for j in range(1, ell + 1)]
    spec += [("lambda", 1)]
    return VariableTable.make(spec)


def _c_generating_poly(table: VariableTable, ell: int, var: str) -> GradedLaurentPoly:
    """P(u) = sum_{j=0}^{l} y^j u^{l-j} with y^0 = lambda."""
    out = GradedLaurentPoly.monomial(table, 1, {"lambda": 1, var: ell})
    for j in range(1, ell + 1):
        out = out + GradedLaurentPoly.monomial(table, 1, {f"y{j}": 1, var: ell - j})
    return out


def metric_pencil_c(ell: int) -> MetricPencil:
    """C-type pencil from the closed generating function of g_lambda."""
    if ell < 1:
        raise PolyError("rank must be >= 1")
    work = _c_working_table(ell)
    y_table = chart_table("y", ell, [Fraction(1)] * ell)
    P_u = _c_generating_poly(work, ell, "u")
    P_v = _c_generating_poly(work, ell, "v")
    Pp_u = P_u.partial("u")
    Pp_v = P_v.partial("v")
    u = GradedLaurentPoly.variable(work, "u")
    v = GradedLaurentPoly.variable(work, "v")
    numer = (u * u - 4) * (Pp_u * P_v) - (v * v - 4) * (P_u * Pp_v)
    quot, rem = divide_by_linear(numer, "u", v)
    if not rem.is_zero():
        raise InternalCheckError("C-type metric numerator not divisible by (u - v)")
    total = quot - ell * (P_u * P_v)
    entries = _extract_uv_coefficients(total, work, y_table, ell)
    glam = PolyMatrix(y_table, entries)
    if not glam.is_symmetric():
        raise InternalCheckError("C-type pencil is not symmetric")
    return MetricPencil(y_table, glam, christoffel=christoffel_c(ell), chart="y")


def _extract_uv_coefficients(total: GradedLaurentPoly, work: VariableTable,
                             y_table: VariableTable, ell: int) -> list[list[GradedLaurentPoly]]:
    rename = {f"y{j}": GradedLaurentPoly.variable(y_table, f"y{j}") for j in range(1, ell + 1)}
    rename["lambda"] = GradedLaurentPoly.variable(y_table, "lambda")
    rename["u"] = GradedLaurentPoly.zero(y_table)
    rename["v"] = GradedLaurentPoly.zero(y_table)
    found: dict[tuple[int, int], GradedLaurentPoly] = {}
    by_u = total.as_poly_in("u")
    for pu, coeff_u in by_u.items():
        for pv, coeff_uv in coeff_u.as_poly_in("v").items():
            i, j = ell - pu, ell - pv
            if not (1 <= i <= ell and 1 <= j <= ell):
                if not coeff_uv.is_zero():
                    raise InternalCheckError(
                        f"stray generating-function coefficient at u^{pu} v^{pv}")
                continue
            found[(i, j)] = coeff_uv.substitute(rename, y_table)
    zero = GradedLaurentPoly.zero(y_table)
    return [[found.get((i, j), zero) for j in range(1, ell + 1)] for i in range(1, ell + 1)]


def christoffel_c(ell: int) -> list[PolyMatrix]:
    """Contravariant Christoffel data of g_lambda for type C.

    Returns Gamma[k-1][i-1][j-1] = Gamma^{ij}_{lambda,k} over the
    (y, lambda) chart; checked against Gamma + Gamma^T = dg/dy^k.
    """
    work = _c_working_table(ell)
    y_table = chart_table("y", ell, [Fraction(1)] * ell)
    P_u = _c_generating_poly(work, ell, "u")
    P_v = _c_generating_poly(work, ell, "v")
    Pp_u = P_u.partial("u")
    Pp_v = P_v.partial("v")
    u = GradedLaurentPoly.variable(work, "u")
    v = GradedLaurentPoly.variable(work, "v")
    u2 = u * u - 4
    v2 = v * v - 4
    uv = u * v - 4
    gammas: list[PolyMatrix] = []
    for k in range(1, ell + 1):
        # dP(u) -> u^{l-k}, dP'(u) -> (l-k) u^{l-k-1}; same pattern in v
        dP_u = GradedLaurentPoly.monomial(work, 1, {"u": ell - k})
        dP_v = GradedLaurentPoly.monomial(work, 1, {"v": ell - k})
        dPp_v = (GradedLaurentPoly.monomial(work, ell - k, {"v": ell - k - 1})
                 if k < ell else GradedLaurentPoly.zero(work))
        diff = u2 * (Pp_u * dP_v) - v2 * (P_u * dPp_v)
        anti = uv * (P_v * dP_u - P_u * dP_v)
        total = -ell * (P_u * dP_v) * ((u - v) ** 2) + (u - v) * diff + anti
        q1, r1 = divide_by_linear(total, "u", v)
        if not r1.is_zero():
            raise InternalCheckError("Christoffel numerator not divisible by (u - v)")
        q2, r2 = divide_by_linear(q1, "u", v)
        if not r2.is_zero():
            raise InternalCheckError("Christoffel numerator not divisible by (u - v)^2")
        gammas.append(PolyMatrix(y_table, _extract_uv_coefficients(q2, work, y_table, ell)))
    # symmetry identity: Gamma^{ij}_k + Gamma^{ji}_k = d g^{ij} / d y^k
    glam_entries = None
    try:
        glam_entries = _raw_c_metric_entries(ell, work, y_table)
    except InternalCheckError:
        raise
    for k in range(1, ell + 1):
        for i in range(ell):
            for j in range(ell):
                lhs = gammas[k - 1][i, j] + gammas[k - 1][j, i]
                rhs = glam_entries[i][j].partial(f"y{k}")
                if lhs != rhs:
                    raise InternalCheckError(
                        f"Christoffel symmetry identity fails at (i,j,k)=({i+1},{j+1},{k})")
    return gammas


def _raw_c_metric_entries(ell, work, y_table):
    P_u = _c_generating_poly(work, ell, "u")
    P_v = _c_generating_poly(work, ell, "v")
    u = GradedLaurentPoly.variable(work, "u")
    v = GradedLaurentPoly.variable(work, "v")
    numer = (u * u - 4) * (P_u.partial("u") * P_v) - (v * v - 4) * (P_u * P_v.partial("v"))
    quot, rem = divide_by_linear(numer, "u", v)
    if not rem.is_zero():
        raise InternalCheckError("C-type metric numerator not divisible by (u - v)")
    total = quot - ell * (P_u * P_v)
    return _extract_uv_coefficients(total, work, y_table, ell)


# ----------------------------------------------------------------------
# numeric evaluation of basic generators
# ----------------------------------------------------------------------

@dataclass
class AffineSample:
    """One numeric point: torus angles xi^j plus the grading parameter c."""

    xi: list[complex]
    c: complex = 0.0

    @property
    def lam(self) -> complex:
        return np.exp(-2j * math.pi * self.c)


def _esp_values(values: list[complex]) -> list[complex]:
    """All elementary symmetric polynomials e_0..e_n of the given values."""
    n = len(values)
    e = [0j] * (n + 1)
    e[0] = 1.0 + 0j
    for v in values:
        for k in range(n, 0, -1):
            e[k] = e[k] + v * e[k - 1]
    return e


def eval_generators_numeric(kind: str, ell: int, sample: AffineSample) -> np.ndarray:
    """Floating values of the basic generators y^1..y^l at a sample point."""
    kind = kind.upper()
    lam = sample.lam
    xi = np.asarray(sample.xi, dtype=complex)
    if kind == "A":
        if len(xi) != ell + 1:
            raise PolyError("A-type sample needs l+1 xi values")
        vals = list(np.exp(2j * math.pi * xi))
        e = _esp_values(vals)
        mu = lam ** (1.0 / (ell + 1))
        return np.array([mu ** j * e[j] for j in range(1, ell + 1)])
    if len(xi) != ell:
        raise PolyError(f"{kind}-type sample needs l xi values")
    zeta = 2.0 * np.cos(2.0 * math.pi * xi)
    if kind == "C":
        e = _esp_values(list(zeta))
        return np.array([lam * e[j] for j in range(1, ell + 1)])
    if kind == "B":
        e = _esp_values(list(zeta))
        tilde = 2.0 * np.cos(math.pi * xi)
        y = [lam * e[j] for j in range(1, ell)]
        y.append(lam ** 0.5 * np.prod(tilde))
        return np.array(y)
    if kind == "D":
        e = _esp_values(list(zeta))
        plus = np.exp(1j * math.pi * xi) + np.exp(-1j * math.pi * xi)
        minus = np.exp(1j * math.pi * xi) - np.exp(-1j * math.pi * xi)
        y = [lam * e[j] for j in range(1, ell - 1)]
        y.append(0.5 * lam ** 0.5 * (np.prod(plus) + np.prod(minus)))
        y.append(0.5 * lam ** 0.5 * (np.prod(plus) - np.prod(minus)))
        return np.array(y)
    raise PolyError(f"unsupported kind {kind!r}")


# ----------------------------------------------------------------------
# B/D -> C reduction check (numeric identity)
# ----------------------------------------------------------------------

def _bd_generators_and_derivs(kind: str, ell: int, sample: AffineSample):
    """(y values, dy/dxi matrix) for B/D via the closed-form generators."""
    lam = sample.lam
    xi = np.asarray(sample.xi, dtype=complex)
    ep = np.exp(2j * math.pi * xi)
    zeta = ep + 1.0 / ep
    dzeta = 2j * math.pi * (ep - 1.0 / ep)
    n = ell
    y = eval_generators_numeric(kind, ell, sample)
    grad = np.zeros((ell, n), dtype=complex)

    def esp_minus(values, k, a):
        vals = [values[i] for i in range(len(values)) if i != k]
        return _esp_values(vals)[a] if 0 <= a <= len(vals) else 0j

    top = ell - 1 if kind == "B" else ell - 2
    for i in range(1, top + 1):
        for k in range(n):
            grad[i - 1, k] = lam * esp_minus(list(zeta), k, i - 1) * dzeta[k]
    hp = np.exp(1j * math.pi * xi)
    hm = np.exp(-1j * math.pi * xi)
    if kind == "B":
        tilde = hp + hm
        dtilde = 1j * math.pi * (hp - hm)
        prod_all = np.prod(tilde)
        for k in range(n):
            grad[ell - 1, k] = lam ** 0.5 * (prod_all / tilde[k]) * dtilde[k]
    else:
        plus = hp + hm
        minus = hp - hm
        dplus = 1j * math.pi * (hp - hm)
        dminus = 1j * math.pi * (hp + hm)
        pp = np.prod(plus)
        pm = np.prod(minus)
        for k in range(n):
            dp = (pp / plus[k]) * dplus[k]
            dm = (pm / minus[k]) * dminus[k]
            grad[ell - 2, k] = 0.5 * lam ** 0.5 * (dp + dm)
            grad[ell - 1, k] = 0.5 * lam ** 0.5 * (dp - dm)
    return y, grad


def _bd_hat_map(kind: str, ell: int, y: np.ndarray, lam: complex,
                grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Push (y, dy) through the reduction onto C-type generators."""
    yh = y.astype(complex).copy()
    gh = grad.astype(complex).copy()
    if kind == "B":
        yh[ell - 1] = y[ell - 1] ** 2 - sum(2 ** (ell - k) * y[k - 1] for k in range(1, ell)) \
            - 2 ** ell * lam
        gh[ell - 1] = 2 * y[ell - 1] * grad[ell - 1] \
            - sum(2 ** (ell - k) * grad[k - 1] for k in range(1, ell))
        return yh, gh
    c1 = [Fraction(2 ** (ell - k) - (-2) ** (ell - k), 4) for k in range(1, ell - 1)]
    c2 = [Fraction(2 ** (ell - k) + (-2) ** (ell - k), 2) for k in range(1, ell - 1)]
    yh[ell - 2] = (y[ell - 2] * y[ell - 1]
                   - sum(float(c) * y[k - 1] for k, c in zip(range(1, ell - 1), c1))
                   - float(Fraction(2 ** ell - (-2) ** ell, 4)) * lam)
    yh[ell - 1] = (y[ell - 1] ** 2 + y[ell - 2] ** 2
                   - sum(float(c) * y[k - 1] for k, c in zip(range(1, ell - 1), c2))
                   - float(Fraction(2 ** ell + (-2) ** ell, 2)) * lam)
    gh[ell - 2] = (y[ell - 2] * grad[ell - 1] + y[ell - 1] * grad[ell - 2]
                   - sum(float(c) * grad[k - 1] for k, c in zip(range(1, ell - 1), c1)))
    gh[ell - 1] = (2 * y[ell - 1] * grad[ell - 1] + 2 * y[ell - 2] * grad[ell - 2]
                   - sum(float(c) * grad[k - 1] for k, c in zip(range(1, ell - 1), c2)))
    return yh, gh


def bd_reduction_check(kind: str, ell: int, n_samples: int = 20, seed: int = 0,
                       tol: float = 1e-9) -> dict:
    """Numerically verify that the reduced B/D metric equals the C-type pencil."""
    kind = kind.upper()
    if kind == "B" and ell < 2:
        raise PolyError("B-type check needs rank >= 2")
    if kind == "D" and ell < 3:
        raise PolyError("D-type check needs rank >= 3")
    if kind not in ("B", "D"):
        raise PolyError("reduction check is for kinds B and D")
    pencil = metric_pencil_c(ell)
    rng = np.random.default_rng(seed)
    max_rel = 0.0
    for _ in range(n_samples):
        sample = AffineSample(list(rng.uniform(0.0, 1.0, ell)),
                              float(rng.uniform(0.0, 1.0)))
        lam = sample.lam
        y, grad = _bd_generators_and_derivs(kind, ell, sample)
        yh, gh = _bd_hat_map(kind, ell, y, lam, grad)
        ghat = (gh @ gh.T) / (4.0 * math.pi ** 2)
        values = {f"y{j}": yh[j - 1] for j in range(1, ell + 1)}
        values["lambda"] = lam
        gC = pencil.glam.evaluate(values)
        scale = max(np.max(np.abs(gC)), 1.0)
        max_rel = max(max_rel, float(np.max(np.abs(ghat - gC)) / scale))
    return {"check": "bd_reduction", "kind": kind, "rank": ell,
            "samples": n_samples, "seed": seed,
            "max_rel_err": max_rel, "pass": bool(max_rel < tol)}
