"""Landau-Ginzburg residue constructions as a numeric oracle.

Type A superpotential: Lambda(p) = p^{l+1} + a_1 p^l + ... + a_l p.
Type C: Lambda(p) = (p^2-1) p^{-2m} sum_j a_j p^{2(l-j)}.

Residue pairings are evaluated through the closed canonical-coordinate
formulas at the critical points (companion-matrix roots plus one Newton
polish), then moved to coefficient coordinates by exact Jacobians.
Residues at infinity/zero for the flat coordinates use truncated series,
never contour quadrature.  The m = l case is handled through the p -> 1/p
equivalence with the m = 0 model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .invariants import InternalCheckError
from .pencil import shift_to_pencil_c, split_pencil
from .polyring import GradedLaurentPoly, PolyError, VariableTable

RESIDUAL_TOL = 1e-12


class DegenerateModelError(RuntimeError):
    """Critical-point data too degenerate to trust; resample."""


def _polish(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    dcoeffs = np.polyder(coeffs)
    vals = np.polyval(coeffs, roots)
    dvals = np.polyval(dcoeffs, roots)
    return roots - vals / dvals


def _poly_roots(coeffs) -> np.ndarray:
    """Companion-matrix roots with one Newton polish and a residual contract."""
    coeffs = np.asarray(coeffs, dtype=complex)
    roots = np.roots(coeffs)
    if len(roots):
        roots = _polish(coeffs, roots)
    scale = np.max(np.abs(coeffs))
    res = np.abs(np.polyval(coeffs, roots))
    bound = RESIDUAL_TOL * scale * np.maximum(1.0, np.abs(roots)) ** (len(coeffs) - 1)
    if np.any(res > bound):
        raise DegenerateModelError("root residual exceeds the 1e-12 contract")
    return roots


@dataclass
class LGModel:
    kind: str
    ell: int
    m: int | None
    a: np.ndarray
    q: np.ndarray = field(default=None, repr=False)     # critical points
    u: np.ndarray = field(default=None, repr=False)     # critical values
    lam2: np.ndarray = field(default=None, repr=False)  # Lambda''(q_i)
    P: np.ndarray = field(default=None, repr=False)     # q_i^2 (type C)
    chat_prime: np.ndarray = field(default=None, repr=False)
    delegate: "LGModel | None" = field(default=None, repr=False)

    @classmethod
    def build(cls, kind: str, ell: int, a, m: int | None = None,
              separation_floor: float = 1e-10) -> "LGModel":
        kind = kind.upper()
        a = np.asarray(a, dtype=complex)
        if len(a) != ell:
            raise PolyError("need l coefficients")
        model = cls(kind, ell, m, a)
        if kind == "A":
            model._build_a(separation_floor)
        elif kind == "C":
            if m is None or not 0 <= m <= ell:
                raise PolyError("type C needs m in 0..l")
            if m == ell:
                # p -> 1/p equivalence: same structure as m = 0 on reversed,
                # negated coefficients
                model.delegate = cls.build("C", ell, [-a[ell - j] for j in range(1, ell + 1)],
                                           m=0, separation_floor=separation_floor)
                model.q = model.delegate.q
                model.u = model.delegate.u
            else:
                model._build_c(separation_floor)
        else:
            raise PolyError(f"no superpotential family for kind {kind!r}")
        return model

    # -- type A ---------------------------------------------------------
    def _lambda_coeffs_a(self) -> np.ndarray:
        return np.concatenate(([1.0 + 0j], self.a, [0.0 + 0j]))

    def _build_a(self, floor: float) -> None:
        n = self.ell + 1
        dcoeffs = np.array([(n - j) * (self._lambda_coeffs_a()[j]) for j in range(n)])
        q = _poly_roots(dcoeffs)
        if len(q) != self.ell:
            raise DegenerateModelError("wrong number of critical points")
        for i in range(self.ell):
            for j in range(i + 1, self.ell):
                if abs(q[i] - q[j]) < floor:
                    raise DegenerateModelError("critical points collide")
        self.q = q
        self.u = np.polyval(self._lambda_coeffs_a(), q)
        self.lam2 = np.polyval(np.polyder(dcoeffs), q)

    def lambda_second_product(self) -> np.ndarray:
        """Lambda''(q_i) via (l+1) prod_{j != i} (q_i - q_j) (independent route)."""
        out = []
        for i in range(self.ell):
            prod = self.ell + 1.0 + 0j
            for j in range(self.ell):
                if j != i:
                    prod *= self.q[i] - self.q[j]
            out.append(prod)
        return np.array(out)

    # -- type C ---------------------------------------------------------
    def _nhat_coeffs(self) -> np.ndarray:
        """N(P) = (P - 1) sum_j a_j P^{l-j}, descending coefficients."""
        s = self.a.copy()                       # S(P): a_1 P^{l-1} + ... + a_l
        return np.polysub(np.concatenate((s, [0j])), s)

    def _build_c(self, floor: float) -> None:
        ell, m = self.ell, self.m
        nhat = self._nhat_coeffs()
        dn = np.polyder(nhat)
        chat = np.polysub(2 * np.concatenate((dn, [0j])), 2 * m * nhat)
        if abs(chat[0]) < 1e-12 * np.max(np.abs(chat)):
            raise DegenerateModelError("leading coefficient of the critical polynomial vanishes")
        if m == 0:
            if abs(chat[-1]) > 1e-10 * np.max(np.abs(chat)):
                raise InternalCheckError("m=0 critical polynomial must vanish at P=0")
            P = np.concatenate((_poly_roots(chat[:-1]), [0j]))
        else:
            P = _poly_roots(chat)
        if len(P) != ell:
            raise DegenerateModelError("wrong number of critical values of p^2")
        q = np.sqrt(P.astype(complex))
        for i in range(ell):
            if m > 0 and abs(P[i]) < floor:
                raise DegenerateModelError("critical point at the pole p=0")
            if abs(P[i] - 1.0) < floor:
                raise DegenerateModelError("critical point at p = +-1")
            for j in range(i + 1, ell):
                if abs(P[i] - P[j]) < floor:
                    raise DegenerateModelError("critical points collide")
        chat_prime = np.polyval(np.polyder(chat), P)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.polyval(nhat, P) * np.where(P == 0, 1.0, P) ** (-m)
        lam2 = np.empty(ell, dtype=complex)
        for i in range(ell):
            if abs(P[i]) < 1e-13:          # structural zero root, m = 0
                lam2[i] = chat_prime[i]    # Lambda''(0) = Chat'(0)
            else:
                lam2[i] = 2 * chat_prime[i] / P[i] ** m
        self.q, self.u, self.P, self.chat_prime, self.lam2 = q, u, P, chat_prime, lam2

    def lambda_eval(self, p: complex) -> complex:
        if self.kind == "A":
            return complex(np.polyval(self._lambda_coeffs_a(), p))
        if self.m == self.ell:
            return self.delegate.lambda_eval(1.0 / p)
        return complex(np.polyval(self._nhat_coeffs(), p * p) * p ** (-2 * self.m))


# ----------------------------------------------------------------------
# residue tensors in coefficient coordinates
# ----------------------------------------------------------------------

def _pw(x: complex, k: int) -> complex:
    if x == 0:
        return 1.0 + 0j if k == 0 else 0.0j
    return x ** k


def lg_metrics(model: LGModel) -> dict:
    """Covariant eta, c, g in coefficient coordinates (closed formulas)."""
    ell = model.ell
    if model.kind == "A":
        eta = np.zeros((ell, ell), dtype=complex)
        g = np.zeros((ell, ell), dtype=complex)
        c = np.zeros((ell, ell, ell), dtype=complex)
        for i in range(ell):
            qi, wi, ui = model.q[i], model.lam2[i], model.u[i]
            if abs(ui) < 1e-12:
                raise DegenerateModelError("vanishing critical value; g undefined")
            for al in range(1, ell + 1):
                for be in range(al, ell + 1):
                    v = _pw(qi, 2 * ell - al - be) / wi
                    eta[al - 1, be - 1] += v
                    g[al - 1, be - 1] += v / ui
                    for ga in range(be, ell + 1):
                        c[al - 1, be - 1, ga - 1] += _pw(qi, 3 * ell + 1 - al - be - ga) / wi
        return _symmetrize(eta, g, c, ell)
    if model.m == model.ell:
        sub = lg_metrics(model.delegate)
        rev = slice(None, None, -1)
        return {"eta": sub["eta"][rev, :][:, rev],
                "g": sub["g"][rev, :][:, rev],
                "c": -sub["c"][rev, :, :][:, rev, :][:, :, rev]}
    m = model.m
    eta = np.zeros((ell, ell), dtype=complex)
    g = np.zeros((ell, ell), dtype=complex)
    c = np.zeros((ell, ell, ell), dtype=complex)
    for i in range(ell):
        Pi, cp, ui = model.P[i], model.chat_prime[i], model.u[i]
        if abs(ui) < 1e-12:
            raise DegenerateModelError("vanishing critical value; g undefined")
        for al in range(1, ell + 1):
            for be in range(al, ell + 1):
                v = _pw(Pi, 2 * ell - al - be - m) / cp
                eta[al - 1, be - 1] += v
                g[al - 1, be - 1] += v / ui
                for ga in range(be, ell + 1):
                    c[al - 1, be - 1, ga - 1] += ((Pi - 1.0)
                                                  * _pw(Pi, 3 * ell - al - be - ga - 2 * m) / cp)
    return _symmetrize(eta, g, c, ell)


def _symmetrize(eta, g, c, ell):
    for al in range(ell):
        for be in range(al, ell):
            eta[be, al] = eta[al, be]
            g[be, al] = g[al, be]
    full = np.zeros_like(c)
    import itertools
    for al in range(ell):
        for be in range(al, ell):
            for ga in range(be, ell):
                for p in set(itertools.permutations((al, be, ga))):
                    full[p] = c[al, be, ga]
    return {"eta": eta, "g": g, "c": full}


def canonical_diagonals(model: LGModel) -> tuple[np.ndarray, np.ndarray]:
    """(eta(d_{u_i}, d_{u_i}), g-contravariant diagonal) closed forms."""
    if model.kind == "A":
        d = 1.0 / (model.q ** 2 * model.lam2)
        return d, model.u * model.q ** 2 * model.lam2
    if model.m == model.ell:
        return canonical_diagonals(model.delegate)
    cim = np.array([2.0 - (1.0 if (model.m == 0 and abs(model.P[i]) < 1e-13) else 0.0)
                    for i in range(model.ell)])
    d = cim / ((model.P - 1.0) ** 2 * model.lam2)
    return d, model.u * (model.P - 1.0) ** 2 * model.lam2 / cim


# ----------------------------------------------------------------------
# flat coordinates from residues at infinity / zero
# ----------------------------------------------------------------------

def lg_flat_coord_polys_a(ell: int) -> list[GradedLaurentPoly]:
    """Exact A-type flat coordinates as polynomials in the coefficients.

    t^alpha = ((l+1)/alpha) [p^0] Lambda^{alpha/(l+1)}, expanded by the
    binomial series with exact rational coefficients.
    """
    table = VariableTable.make([(f"a{j}", Fraction(j, ell + 1)) for j in range(1, ell + 1)])
    zero = GradedLaurentPoly.zero(table)
    one = GradedLaurentPoly.const(table, 1)
    out = []
    for alpha in range(1, ell + 1):
        s = Fraction(alpha, ell + 1)
        order = alpha
        # series[k] = coefficient of p^{-k} in (1 + sum a_j p^{-j})^s
        series = [one] + [zero] * order
        x = [zero] * (order + 1)   # x[k] = coeff of p^{-k} in sum a_j p^{-j}
        for j in range(1, min(ell, order) + 1):
            x[j] = GradedLaurentPoly.variable(table, f"a{j}")
        xpow = [one] + [zero] * order
        binom = Fraction(1)
        for k in range(1, order + 1):
            binom *= (s - (k - 1)) / k
            new = [zero] * (order + 1)
            for d1 in range(order + 1):
                if xpow[d1].is_zero():
                    continue
                for d2 in range(1, order + 1 - d1):
                    if not x[d2].is_zero():
                        new[d1 + d2] = new[d1 + d2] + xpow[d1] * x[d2]
            xpow = new
            for d in range(order + 1):
                if not xpow[d].is_zero():
                    series[d] = series[d] + binom * xpow[d]
        out.append(Fraction(ell + 1, alpha) * series[alpha])
    return out


def _series_pow(c: np.ndarray, s: complex, order: int) -> np.ndarray:
    """(1 + c_1 x + ... )^s truncated; c[0] must equal 1."""
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0
    # d/dx: (1+f)^s => out' (1+f) = s f' out  (standard recurrence)
    f = c.copy()
    f[0] = 0.0
    for n in range(1, order + 1):
        acc = 0j
        for k in range(1, n + 1):
            acc += (k * (s + 1) - n) * f[k] * out[n - k]
        out[n] = acc / n
    return out


def lg_flat_coords(model: LGModel) -> np.ndarray:
    """Numeric flat coordinates of the residue metric."""
    ell = model.ell
    if model.kind == "A":
        polys = lg_flat_coord_polys_a(ell)
        vals = {f"a{j}": model.a[j - 1] for j in range(1, ell + 1)}
        return np.array([p.evaluate(vals) for p in polys])
    m = model.m
    if m == ell:
        # p -> 1/p: residues at infinity become residues at zero of the
        # delegate; flat coordinates coincide with the delegate's m = 0 set
        return lg_flat_coords(model.delegate)
    a = model.a
    out = np.zeros(ell, dtype=complex)
    # first block: expansion at p = infinity in x = p^{-2}
    B1 = ell - m
    if B1 > 0:
        order = B1
        base = np.zeros(order + 1, dtype=complex)
        base[0] = 1.0
        for j in range(2, ell + 1):
            if j - 1 <= order:
                base[j - 1] += a[j - 1] / a[0]
        onemx = np.zeros(order + 1, dtype=complex)
        onemx[0] = 1.0
        if order >= 1:
            onemx[1] = -1.0
        for alpha in range(1, B1 + 1):
            s = (2 * (B1 - alpha) + 1) / (2.0 * B1)
            W = np.convolve(_series_pow(base, s, order), _series_pow(onemx, s, order))[:order + 1]
            k = B1 - alpha
            total = np.sum(W[:k + 1])
            out[alpha - 1] = -(a[0] ** s) * total / (2 * (B1 - alpha) + 1)
    # second block: expansion at p = 0 in x = p^2
    if m > 0:
        order = m
        base = np.zeros(order + 1, dtype=complex)
        base[0] = 1.0
        for j in range(1, ell):
            if ell - j <= order:
                base[ell - j] += a[j - 1] / a[ell - 1]
        onemx = np.zeros(order + 1, dtype=complex)
        onemx[0] = 1.0
        if order >= 1:
            onemx[1] = -1.0
        for beta in range(ell - m + 1, ell + 1):
            sp = (2 * (ell - beta) + 1) / (2.0 * m)
            W = np.convolve(_series_pow(base, sp, order), _series_pow(onemx, sp, order))[:order + 1]
            k = ell - beta
            total = np.sum(W[:k + 1])
            out[beta - 1] = -((-a[ell - 1]) ** sp) * total / (2 * (ell - beta) + 1)
    return out


def flat_coord_jacobian(model: LGModel, h: float = 1e-6) -> np.ndarray:
    """d t~ / d a by central differences (holomorphic, real step)."""
    ell = model.ell
    J = np.zeros((ell, ell), dtype=complex)
    for r in range(ell):
        ap = model.a.copy()
        am = model.a.copy()
        ap[r] += h
        am[r] -= h
        tp = lg_flat_coords(LGModel.build(model.kind, ell, ap, model.m))
        tm = lg_flat_coords(LGModel.build(model.kind, ell, am, model.m))
        J[:, r] = (tp - tm) / (2 * h)
    return J


def expected_flat_metric(kind: str, ell: int, m: int | None) -> np.ndarray:
    """Covariant residue metric in its flat coordinates."""
    out = np.zeros((ell, ell))
    if kind.upper() == "A":
        for al in range(ell):
            out[al, ell - 1 - al] = 1.0 / (ell + 1)
        return out
    if m in (0, ell):
        for al in range(ell):
            out[al, ell - 1 - al] = 2.0 * ell
        return out
    for al in range(ell - m):
        out[al, ell - m - 1 - al] = 2.0 * (ell - m)
    for be in range(m):
        out[ell - m + be, ell - 1 - be] = 2.0 * m
    return out


# ----------------------------------------------------------------------
# seeded sampling
# ----------------------------------------------------------------------

def sample_model(kind: str, ell: int, m: int | None, rng: np.random.Generator,
                 need_g: bool = True, max_tries: int = 200) -> LGModel:
    """Coefficients from the annulus 0.5 <= |a| <= 1.5 with rejection near
    degenerate critical data (second-derivative and separation floors)."""
    for _ in range(max_tries):
        r = rng.uniform(0.5, 1.5, ell)
        th = rng.uniform(0.0, 2 * np.pi, ell)
        a = r * np.exp(1j * th)
        try:
            model = LGModel.build(kind, ell, a, m)
        except DegenerateModelError:
            continue
        base = model.delegate or model
        if np.min(np.abs(base.lam2)) < 1e-6:
            continue
        pts = base.q
        sep = min(abs(pts[i] - pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts))) \
            if len(pts) > 1 else 1.0
        if kind.upper() == "C" and len(pts) > 1:
            sep = min(sep, min(abs(pts[i] + pts[j])
                               for i in range(len(pts)) for j in range(i + 1, len(pts))))
        if sep < 1e-4:
            continue
        if need_g and np.min(np.abs(base.u)) < 1e-6:
            continue
        if kind.upper() == "C" and np.min(np.abs(base.P - 1.0)) < 1e-4:
            continue
        return model
    raise DegenerateModelError(f"no admissible sample after {max_tries} tries")


# ----------------------------------------------------------------------
# isomorphism with the exact pipeline
# ----------------------------------------------------------------------

def _c_coefficient_map(ell: int) -> np.ndarray:
    """Matrix of z^j = [s^{l-j}] sum_k a_k (s-2)^{l-k} (s+2)^{k-1}."""
    B = np.zeros((ell, ell))
    for k in range(1, ell + 1):
        poly = np.array([1.0])
        for _ in range(ell - k):
            poly = np.convolve(poly, [1.0, -2.0])
        for _ in range(k - 1):
            poly = np.convolve(poly, [1.0, 2.0])
        # poly has degree l-1, descending; z^j takes the s^{l-j} coefficient
        for j in range(1, ell + 1):
            B[j - 1, k - 1] = poly[j - 1]
    return B


def lg_isomorphism_check(kind: str, ell: int, m: int | None = None,
                         n_samples: int = 20, seed: int = 42,
                         tol: float = 1e-8) -> dict:
    """Exact pencil vs residue tensors through the coefficient map."""
    kind = kind.upper()
    rng = np.random.default_rng(seed)
    errs = {"eta": 0.0, "g": 0.0, "unit": 0.0, "euler": 0.0}
    if kind == "A":
        from .invariants import metric_pencil_a
        glam = metric_pencil_a(ell).glam
        # identification a_alpha = y^alpha|_{lambda=0}: for odd l it has the
        # same effect as the alternating-sign map; for even l it is the one
        # under which the pullback identities hold (cross-checked against the
        # flat-coordinate form of the residue metric)
        for _ in range(n_samples):
            model = sample_model("A", ell, None, rng)
            mats = lg_metrics(model)
            yv = {f"y{j}": model.a[j - 1] for j in range(1, ell + 1)}
            yv["lambda"] = 0.0
            G = glam.evaluate(yv)
            lamdir = glam.map(lambda p: p.partial("lambda"))
            ETA = lamdir.evaluate(yv)
            pull_eta = np.linalg.inv(ETA)
            pull_g = np.linalg.inv(G)
            errs["eta"] = max(errs["eta"], _rel(mats["eta"], pull_eta))
            errs["g"] = max(errs["g"], _rel(mats["g"], pull_g))
            # unit and Euler pushforwards
            e_exact = -ETA[:, ell - 1] / yv[f"y{ell}"]
            e_tilde = -np.linalg.inv(mats["eta"])[:, ell - 1] / model.a[ell - 1]
            errs["unit"] = max(errs["unit"], _rel(e_exact, e_tilde))
            E_exact = np.array([Fraction(j, ell + 1) * yv[f"y{j}"]
                                for j in range(1, ell + 1)], dtype=complex)
            E_tilde = np.array([j / (ell + 1.0) * model.a[j - 1] for j in range(1, ell + 1)])
            errs["euler"] = max(errs["euler"], _rel(E_exact, E_tilde))
    else:
        if m is None:
            raise PolyError("type C requires m")
        _, pz = shift_to_pencil_c(ell, m)
        g_z, eta_z = split_pencil(pz)
        B = _c_coefficient_map(ell)
        for _ in range(n_samples):
            model = sample_model("C", ell, m, rng)
            mats = lg_metrics(model)
            z = B @ model.a
            zv = {f"z{j}": z[j - 1] for j in range(1, ell + 1)}
            ETA = eta_z.evaluate(zv)
            G = g_z.evaluate(zv)
            pull_eta = B.T @ np.linalg.inv(ETA) @ B
            pull_g = B.T @ np.linalg.inv(G) @ B
            errs["eta"] = max(errs["eta"], _rel(pull_eta, 0.5 * mats["eta"]))
            errs["g"] = max(errs["g"], _rel(pull_g, 0.5 * mats["g"]))
            e_exact = -ETA[:, 0] / z[0]
            e_tilde = -2.0 * np.linalg.inv(mats["eta"]) @ np.ones(ell) / np.sum(model.a)
            errs["unit"] = max(errs["unit"], _rel(B @ e_tilde, e_exact))
            errs["euler"] = max(errs["euler"], _rel(B @ model.a, z))
    worst = max(errs.values())
    return {"check": "lg_isomorphism", "kind": kind, "rank": ell, "m": m,
            "samples": n_samples, "seed": seed, "errors": errs,
            "max_rel_err": worst, "pass": bool(worst < tol)}


def _rel(x, y) -> float:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    scale = max(1e-30, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    return float(np.max(np.abs(x - y)) / scale)


def lg_flat_metric_check(kind: str, ell: int, m: int | None = None,
                         n_samples: int = 5, seed: int = 42,
                         tol: float = 1e-9) -> dict:
    """Residue metric transformed to its flat coordinates vs the block form."""
    rng = np.random.default_rng(seed)
    want = expected_flat_metric(kind, ell, m)
    worst = 0.0
    for _ in range(n_samples):
        model = sample_model(kind, ell, m, rng, need_g=False)
        mats = lg_metrics(model)
        J = flat_coord_jacobian(model)
        Jinv = np.linalg.inv(J)
        eta_t = Jinv.T @ mats["eta"] @ Jinv
        worst = max(worst, _rel(eta_t, want))
    return {"check": "lg_flat_metric", "kind": kind.upper(), "rank": ell, "m": m,
            "samples": n_samples, "seed": seed, "max_rel_err": worst,
            "pass": bool(worst < tol)}


# ----------------------------------------------------------------------
# 4-tensor symmetry and the C-type rescaling remark
# ----------------------------------------------------------------------

def lg_symmetry_check(model: LGModel, h_step: float = 1e-5, tol: float = 1e-6) -> dict:
    """Total symmetry of d c~ / d t~ by central finite differences."""
    ell = model.ell

    def c_in_flat(mdl: LGModel) -> np.ndarray:
        mats = lg_metrics(mdl)
        Ainv = np.linalg.inv(flat_coord_jacobian(mdl))
        return np.einsum("ra,sb,tc,rst->abc", Ainv, Ainv, Ainv, mats["c"])

    Ainv0 = np.linalg.inv(flat_coord_jacobian(model))
    dc_da = np.zeros((ell, ell, ell, ell), dtype=complex)
    for r in range(ell):
        ap, am = model.a.copy(), model.a.copy()
        ap[r] += h_step
        am[r] -= h_step
        cp = c_in_flat(LGModel.build(model.kind, ell, ap, model.m))
        cm = c_in_flat(LGModel.build(model.kind, ell, am, model.m))
        dc_da[r] = (cp - cm) / (2 * h_step)
    c4 = np.einsum("rx,rabc->xabc", Ainv0, dc_da)   # index x = d/d t~^x
    import itertools
    worst = 0.0
    scale = max(1e-30, float(np.max(np.abs(c4))))
    for idx in itertools.permutations(range(4)):
        worst = max(worst, float(np.max(np.abs(c4 - np.transpose(c4, idx))) / scale))
    out = {"check": "lg_symmetry", "kind": model.kind, "rank": ell, "m": model.m,
           "h_step": h_step, "max_asymmetry": worst, "pass": bool(worst < tol)}
    return out


def rescaling_remark_check(ell: int, m: int, n_samples: int = 5, seed: int = 42,
                           tol: float = 1e-8) -> dict:
    """In the rescaled flat coordinates the contravariant residue metric
    equals sqrt(2) times the exact constant eta of the pencil pipeline."""
    from .flatcoords import flat_coords_c
    chart = flat_coords_c(ell, m)
    eta_exact = np.array([[float(x) for x in row] for row in chart.eta_t])
    scales = np.zeros(ell)
    B1 = ell - m
    for al in range(1, ell + 1):
        if al == B1:
            scales[al - 1] = 2.0 ** ((4 * B1 - 1) / (4.0 * B1)) if B1 else 0.0
        elif al < B1:
            scales[al - 1] = 2.0 ** ((6 * B1 + 2 * al - 1) / (4.0 * B1)) * B1
        elif al == ell:
            scales[al - 1] = 2.0 ** (3.0 / (4 * m))
        else:
            scales[al - 1] = 2.0 ** ((6 * (ell - al) + 4 * m + 3) / (4.0 * m)) * m
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        model = sample_model("C", ell, m, rng, need_g=False)
        mats = lg_metrics(model)
        J = flat_coord_jacobian(model)
        Jinv = np.linalg.inv(J)
        eta_cov_flat = Jinv.T @ mats["eta"] @ Jinv
        eta_contra_flat = np.linalg.inv(eta_cov_flat)
        rescaled = np.outer(scales, scales) * eta_contra_flat
        worst = max(worst, _rel(rescaled, np.sqrt(2.0) * eta_exact))
    return {"check": "lg_rescaling", "rank": ell, "m": m, "samples": n_samples,
            "seed": seed, "max_rel_err": worst, "pass": bool(worst < tol)}
