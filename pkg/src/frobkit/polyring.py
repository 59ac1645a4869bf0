"""Exact graded Laurent polynomial arithmetic over the rationals.

A polynomial is a sparse map {exponent tuple: Fraction} over a fixed
``VariableTable``.  Each variable carries a rational quasi-homogeneity
weight, and an ``invertible`` flag that gates negative exponents: only
flagged variables may ever appear with a negative power, every other
occurrence of a negative exponent raises.  Coefficients are
``fractions.Fraction`` throughout, so all identities checked downstream
are exact ring identities, never floating-point comparisons.

Canonical term order is graded-lex: monomials sort by weighted degree
first, then lexicographically on the exponent tuple, both descending.
This makes printed/serialized output byte-stable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

Exponent = tuple[int, ...]
Scalar = int | Fraction


class PolyError(ValueError):
    """Base class for exact-arithmetic failures."""


class TableMismatchError(PolyError):
    pass


class NonInvertibleVariableError(PolyError):
    pass


class NotSymmetricError(PolyError):
    pass


class NotTriangularError(PolyError):
    pass


class NonUnitDeterminantError(PolyError):
    pass


class InconsistentSystemError(PolyError):
    pass


def _frac(x: Scalar) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected exact scalar, got {type(x).__name__}")


@dataclass(frozen=True)
class VariableTable:
    """Ordered variable list with rational degrees and invertibility flags."""

    names: tuple[str, ...]
    degrees: tuple[Fraction, ...]
    invertible: tuple[bool, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise PolyError(f"duplicate variable names in {self.names}")
        if not (len(self.names) == len(self.degrees) == len(self.invertible)):
            raise PolyError("names/degrees/invertible length mismatch")
        object.__setattr__(self, "degrees", tuple(_frac(d) for d in self.degrees))

    @classmethod
    def make(cls, spec: Sequence[tuple[str, Scalar] | tuple[str, Scalar, bool]]) -> "VariableTable":
        names, degs, inv = [], [], []
        for entry in spec:
            names.append(entry[0])
            degs.append(_frac(entry[1]))
            inv.append(bool(entry[2]) if len(entry) > 2 else False)
        return cls(tuple(names), tuple(degs), tuple(inv))

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise PolyError(f"unknown variable {name!r}") from None

    def monomial_degree(self, exp: Exponent) -> Fraction:
        return sum((e * d for e, d in zip(exp, self.degrees)), Fraction(0))

    def check_exponent(self, exp: Exponent) -> None:
        if len(exp) != len(self.names):
            raise PolyError(f"exponent length {len(exp)} != {len(self.names)} variables")
        for e, ok, name in zip(exp, self.invertible, self.names):
            if e < 0 and not ok:
                raise NonInvertibleVariableError(
                    f"negative exponent on non-invertible variable {name!r}")


class GradedLaurentPoly:
    """Sparse exact Laurent polynomial over a :class:`VariableTable`."""

    __slots__ = ("table", "terms")

    def __init__(self, table: VariableTable, terms: Mapping[Exponent, Scalar]):
        clean: dict[Exponent, Fraction] = {}
        for exp, c in terms.items():
            c = _frac(c)
            if c == 0:
                continue
            exp = tuple(exp)
            table.check_exponent(exp)
            clean[exp] = c
        self.table = table
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, table: VariableTable) -> "GradedLaurentPoly":
        return cls(table, {})

    @classmethod
    def const(cls, table: VariableTable, c: Scalar) -> "GradedLaurentPoly":
        return cls(table, {(0,) * len(table): _frac(c)})

    @classmethod
    def variable(cls, table: VariableTable, name: str, power: int = 1) -> "GradedLaurentPoly":
        exp = [0] * len(table)
        exp[table.index(name)] = power
        return cls(table, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, table: VariableTable, coeff: Scalar, exp_by_name: Mapping[str, int]) -> "GradedLaurentPoly":
        exp = [0] * len(table)
        for name, e in exp_by_name.items():
            exp[table.index(name)] = e
        return cls(table, {tuple(exp): _frac(coeff)})

    # -- basics --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check_table(self, other: "GradedLaurentPoly") -> None:
        if self.table != other.table:
            raise TableMismatchError("operands live over different variable tables")

    def __eq__(self, other) -> bool:
        if isinstance(other, GradedLaurentPoly):
            return self.table == other.table and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == GradedLaurentPoly.const(self.table, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.table, frozenset(self.terms.items())))

    def __neg__(self) -> "GradedLaurentPoly":
        return GradedLaurentPoly(self.table, {e: -c for e, c in self.terms.items()})

    def __add__(self, other) -> "GradedLaurentPoly":
        if isinstance(other, (int, Fraction)):
            other = GradedLaurentPoly.const(self.table, other)
        self._check_table(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return GradedLaurentPoly(self.table, out)

    __radd__ = __add__

    def __sub__(self, other) -> "GradedLaurentPoly":
        if isinstance(other, (int, Fraction)):
            other = GradedLaurentPoly.const(self.table, other)
        return self + (-other)

    def __rsub__(self, other) -> "GradedLaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "GradedLaurentPoly":
        if isinstance(other, (int, Fraction)):
            c = _frac(other)
            if c == 0:
                return GradedLaurentPoly.zero(self.table)
            return GradedLaurentPoly(self.table, {e: c * v for e, v in self.terms.items()})
        self._check_table(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return GradedLaurentPoly(self.table, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GradedLaurentPoly":
        if not isinstance(n, int):
            raise TypeError("polynomial power must be an integer")
        if n < 0:
            inv = self.monomial_inverse()
            return inv ** (-n)
        result = GradedLaurentPoly.const(self.table, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def monomial_inverse(self) -> "GradedLaurentPoly":
        """Inverse of a single-term polynomial (a unit of the Laurent ring)."""
        if len(self.terms) != 1:
            raise NonUnitDeterminantError("only monomials are invertible in the Laurent ring")
        (exp, c), = self.terms.items()
        return GradedLaurentPoly(self.table, {tuple(-e for e in exp): 1 / c})

    # -- calculus ------------------------------------------------------
    def partial(self, name: str) -> "GradedLaurentPoly":
        i = self.table.index(name)
        out: dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            k = exp[i]
            if k == 0:
                continue
            e = list(exp)
            e[i] = k - 1
            e = tuple(e)
            s = out.get(e, Fraction(0)) + c * k
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return GradedLaurentPoly(self.table, out)

    # -- grading -------------------------------------------------------
    def degree(self) -> Fraction:
        """Weighted degree (max over monomials); undefined for 0."""
        if not self.terms:
            raise PolyError("degree of the zero polynomial is undefined")
        return max(self.table.monomial_degree(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        if not self.terms:
            return True
        degs = {self.table.monomial_degree(e) for e in self.terms}
        return len(degs) == 1

    def homogeneous_degree(self) -> Fraction:
        if not self.is_homogeneous():
            raise PolyError("polynomial is not quasi-homogeneous")
        return self.degree()

    def homogeneous_part(self, deg: Scalar) -> "GradedLaurentPoly":
        d = _frac(deg)
        return GradedLaurentPoly(
            self.table,
            {e: c for e, c in self.terms.items() if self.table.monomial_degree(e) == d})

    # -- views ---------------------------------------------------------
    def var_range(self, name: str) -> tuple[int, int]:
        """(min, max) exponent of `name` across terms; (0, 0) for absent."""
        i = self.table.index(name)
        if not self.terms:
            return (0, 0)
        exps = [e[i] for e in self.terms]
        return (min(exps), max(exps))

    def as_poly_in(self, name: str) -> dict[int, "GradedLaurentPoly"]:
        """Group terms by the power of one variable; coefficients drop it."""
        i = self.table.index(name)
        buckets: dict[int, dict[Exponent, Fraction]] = {}
        for exp, c in self.terms.items():
            k = exp[i]
            e = list(exp)
            e[i] = 0
            buckets.setdefault(k, {})[tuple(e)] = c
        return {k: GradedLaurentPoly(self.table, t) for k, t in buckets.items()}

    def coefficient(self, exp_by_name: Mapping[str, int]) -> "GradedLaurentPoly":
        """Coefficient polynomial of a partial monomial (named vars removed)."""
        idx = {self.table.index(n): k for n, k in exp_by_name.items()}
        out: dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            if all(exp[i] == k for i, k in idx.items()):
                e = list(exp)
                for i in idx:
                    e[i] = 0
                out[tuple(e)] = c
        return GradedLaurentPoly(self.table, out)

    # -- substitution / evaluation --------------------------------------
    def substitute(self, mapping: Mapping[str, "GradedLaurentPoly"],
                   target: VariableTable) -> "GradedLaurentPoly":
        """Exact substitution; every variable of this table must be mapped.

        Negative exponents require the image of that variable to be a
        monomial (a Laurent unit) so the substitution stays in the ring.
        """
        images: list[GradedLaurentPoly] = []
        for name in self.table.names:
            if name not in mapping:
                raise PolyError(f"substitution misses variable {name!r}")
            img = mapping[name]
            if img.table != target:
                raise TableMismatchError(f"image of {name!r} not over the target table")
            images.append(img)
        cache: dict[tuple[int, int], GradedLaurentPoly] = {}

        def power_memo(i: int, k: int) -> GradedLaurentPoly:
            key = (i, k)
            if key not in cache:
                if k < 0:
                    cache[key] = images[i].monomial_inverse() ** (-k)
                else:
                    cache[key] = images[i] ** k
            return cache[key]

        out = GradedLaurentPoly.zero(target)
        for exp, c in self.terms.items():
            term = GradedLaurentPoly.const(target, c)
            for i, k in enumerate(exp):
                if k:
                    term = term * power_memo(i, k)
            out = out + term
        return out

    def rename(self, target: VariableTable,
               name_map: Mapping[str, str] | None = None) -> "GradedLaurentPoly":
        """Re-home the polynomial onto `target` by variable name (or a map)."""
        name_map = name_map or {n: n for n in self.table.names}
        mapping = {src: GradedLaurentPoly.variable(target, dst)
                   for src, dst in name_map.items()}
        return self.substitute(mapping, target)

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        vals = [complex(values[n]) for n in self.table.names]
        total = 0j
        for exp, c in self.terms.items():
            prod = complex(c)
            for v, k in zip(vals, exp):
                if k:
                    prod *= v ** k
            total += prod
        return total

    # -- canonical form -------------------------------------------------
    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        return sorted(self.terms.items(),
                      key=lambda t: (self.table.monomial_degree(t[0]), t[0]),
                      reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exp, c in self.sorted_terms():
            factors = [f"{n}^{e}" if e != 1 else n
                       for n, e in zip(self.table.names, exp) if e]
            if not factors:
                body = str(c)
            elif c == 1:
                body = "*".join(factors)
            elif c == -1:
                body = "-" + "*".join(factors)
            else:
                body = str(c) + "*" + "*".join(factors)
            pieces.append(body)
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"<poly {self}>"

    # -- JSON interchange -------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            "vars": [{"name": n, "deg": str(d), "invertible": inv}
                     for n, d, inv in zip(self.table.names, self.table.degrees,
                                          self.table.invertible)],
            "terms": [{"coeff": str(c),
                       "exp": {n: e for n, e in zip(self.table.names, exp) if e}}
                      for exp, c in self.sorted_terms()],
        }

    @classmethod
    def from_json_dict(cls, data: dict, table: VariableTable | None = None) -> "GradedLaurentPoly":
        if table is None:
            table = VariableTable(
                tuple(v["name"] for v in data["vars"]),
                tuple(Fraction(v["deg"]) for v in data["vars"]),
                tuple(bool(v.get("invertible", False)) for v in data["vars"]))
        out = cls.zero(table)
        for t in data["terms"]:
            out = out + cls.monomial(table, Fraction(t["coeff"]), t.get("exp", {}))
        return out


# ----------------------------------------------------------------------
# division helpers
# ----------------------------------------------------------------------

def divide_by_linear(p: GradedLaurentPoly, var: str,
                     root: GradedLaurentPoly) -> tuple[GradedLaurentPoly, GradedLaurentPoly]:
    """Exact synthetic division of p by (var - root), root free of `var`.

    Returns (quotient, remainder); remainder does not involve `var`.
    """
    if root.var_range(var) != (0, 0):
        raise PolyError(f"root must not involve {var!r}")
    lo, hi = p.var_range(var)
    if lo < 0:
        raise PolyError(f"negative powers of {var!r} not supported in division")
    coeffs = p.as_poly_in(var)
    zero = GradedLaurentPoly.zero(p.table)
    acc = zero
    quotient = zero
    xvar = GradedLaurentPoly.variable(p.table, var)
    for k in range(hi, 0, -1):
        acc = acc + coeffs.get(k, zero)
        quotient = quotient + acc * xvar ** (k - 1)
        acc = acc * root
    remainder = acc + coeffs.get(0, zero)
    return quotient, remainder


# ----------------------------------------------------------------------
# symmetric reduction (fundamental theorem, partition basis)
# ----------------------------------------------------------------------

def _partition_basis(p: GradedLaurentPoly) -> dict[Exponent, Fraction]:
    """Compress a symmetric polynomial to {sorted exponent vector: coeff}.

    Verifies symmetry: every monomial orbit must be fully present with one
    shared coefficient.
    """
    n = len(p.table)
    out: dict[Exponent, Fraction] = {}
    counts: dict[Exponent, int] = {}
    for exp, c in p.terms.items():
        if any(e < 0 for e in exp):
            raise NotSymmetricError("Laurent terms not supported in symmetric reduction")
        key = tuple(sorted(exp, reverse=True))
        if key in out and out[key] != c:
            raise NotSymmetricError(f"orbit of {key} carries unequal coefficients")
        out[key] = c
        counts[key] = counts.get(key, 0) + 1
    for key, cnt in counts.items():
        expect = _orbit_size(key, n)
        if cnt != expect:
            raise NotSymmetricError(f"orbit of {key} incomplete ({cnt} of {expect} monomials)")
    return out


def _orbit_size(key: Exponent, n: int) -> int:
    import math
    size = math.factorial(n)
    for v in set(key):
        size //= math.factorial(key.count(v))
    return size


def _mul_elementary(f: dict[Exponent, Fraction], k: int, n: int) -> dict[Exponent, Fraction]:
    """Multiply a partition-basis symmetric polynomial by e_k, exactly."""
    subsets = list(itertools.combinations(range(n), k))
    candidates: set[Exponent] = set()
    for mu in f:
        for S in subsets:
            vec = list(mu)
            for i in S:
                vec[i] += 1
            candidates.add(tuple(sorted(vec, reverse=True)))
    out: dict[Exponent, Fraction] = {}
    for nu in candidates:
        total = Fraction(0)
        for S in subsets:
            if any(nu[i] == 0 for i in S):
                continue
            vec = list(nu)
            for i in S:
                vec[i] -= 1
            total += f.get(tuple(sorted(vec, reverse=True)), Fraction(0))
        if total:
            out[nu] = total
    return out


class _EMonomialCache:
    """Partition-basis expansions of products of elementary symmetrics."""

    def __init__(self, n: int):
        self.n = n
        self.cache: dict[Exponent, dict[Exponent, Fraction]] = {
            (0,) * n: {(0,) * n: Fraction(1)}}

    def expand(self, dvec: Exponent) -> dict[Exponent, Fraction]:
        if dvec in self.cache:
            return self.cache[dvec]
        for i in range(self.n - 1, -1, -1):
            if dvec[i] > 0:
                parent = list(dvec)
                parent[i] -= 1
                base = self.expand(tuple(parent))
                result = _mul_elementary(base, i + 1, self.n)
                self.cache[dvec] = result
                return result
        raise AssertionError("unreachable")


def reduce_symmetric(p: GradedLaurentPoly, target: VariableTable,
                     target_names: Sequence[str] | None = None,
                     max_vars: int = 7) -> GradedLaurentPoly:
    """Rewrite a symmetric polynomial in the elementary symmetric basis.

    Classical fundamental-theorem elimination: repeatedly subtract the
    elementary-symmetric monomial matched to the lex-leading term.  The
    j-th elementary symmetric maps to target_names[j-1] in `target`.
    """
    n = len(p.table)
    if n > max_vars:
        raise PolyError(f"{n} variables exceeds the configured cap {max_vars}")
    names = list(target_names) if target_names is not None else list(target.names[:n])
    if len(names) != n:
        raise PolyError(f"need {n} target names, got {len(names)}")
    work = _partition_basis(p)
    cache = _EMonomialCache(n)
    out = GradedLaurentPoly.zero(target)
    guard = 0
    while work:
        guard += 1
        if guard > 200000:
            raise PolyError("symmetric reduction failed to terminate")
        mu = max(work)
        c = work[mu]
        dvec = tuple(mu[i] - (mu[i + 1] if i + 1 < n else 0) for i in range(n))
        out = out + GradedLaurentPoly.monomial(
            target, c, {names[i]: d for i, d in enumerate(dvec) if d})
        for nu, v in cache.expand(dvec).items():
            s = work.get(nu, Fraction(0)) - c * v
            if s:
                work[nu] = s
            else:
                work.pop(nu, None)
    return out


def elementary_symmetric(table: VariableTable, k: int,
                         names: Sequence[str] | None = None) -> GradedLaurentPoly:
    """e_k of the listed variables (default: all of them)."""
    names = list(names) if names is not None else list(table.names)
    out: dict[Exponent, Fraction] = {}
    idx = [table.index(n) for n in names]
    for S in itertools.combinations(idx, k):
        exp = [0] * len(table)
        for i in S:
            exp[i] = 1
        out[tuple(exp)] = Fraction(1)
    return GradedLaurentPoly(table, out)


# ----------------------------------------------------------------------
# polynomial matrices
# ----------------------------------------------------------------------

class PolyMatrix:
    """Dense matrix of GradedLaurentPoly entries over one shared table."""

    __slots__ = ("table", "rows", "cols", "entries")

    def __init__(self, table: VariableTable, entries: Sequence[Sequence[GradedLaurentPoly]]):
        self.table = table
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise PolyError("ragged matrix")
            for e in row:
                if e.table != table:
                    raise TableMismatchError("matrix entry over a different table")

    @classmethod
    def from_scalars(cls, table: VariableTable, data: Sequence[Sequence[Scalar]]) -> "PolyMatrix":
        return cls(table, [[GradedLaurentPoly.const(table, v) for v in row] for row in data])

    @classmethod
    def identity(cls, table: VariableTable, n: int) -> "PolyMatrix":
        return cls.from_scalars(table, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> GradedLaurentPoly:
        return self.entries[ij[0]][ij[1]]

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyMatrix) and self.rows == other.rows
                and self.cols == other.cols
                and all(self.entries[i][j] == other.entries[i][j]
                        for i in range(self.rows) for j in range(self.cols)))

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise PolyError("matrix shape mismatch")
        zero = GradedLaurentPoly.zero(self.table)
        out = [[zero for _ in range(other.cols)] for _ in range(self.rows)]
        for i in range(self.rows):
            for k in range(self.cols):
                a = self.entries[i][k]
                if a.is_zero():
                    continue
                for j in range(other.cols):
                    b = other.entries[k][j]
                    if not b.is_zero():
                        out[i][j] = out[i][j] + a * b
        return PolyMatrix(self.table, out)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.table, [[self.entries[i][j] for i in range(self.rows)]
                                       for j in range(self.cols)])

    def map(self, f: Callable[[GradedLaurentPoly], GradedLaurentPoly],
            table: VariableTable | None = None) -> "PolyMatrix":
        return PolyMatrix(table or self.table, [[f(e) for e in row] for row in self.entries])

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows) for j in range(i + 1, self.cols))

    def evaluate(self, values: Mapping[str, complex]):
        import numpy as np
        return np.array([[e.evaluate(values) for e in row] for row in self.entries],
                        dtype=complex)

    def det(self) -> GradedLaurentPoly:
        """Determinant by dynamic programming over column subsets."""
        n = self.rows
        if n != self.cols:
            raise PolyError("determinant of non-square matrix")
        zero = GradedLaurentPoly.zero(self.table)
        # state: bitmask of used columns after filling the first popcount rows
        level: dict[int, GradedLaurentPoly] = {0: GradedLaurentPoly.const(self.table, 1)}
        for i in range(n):
            nxt: dict[int, GradedLaurentPoly] = {}
            for mask, val in level.items():
                if val.is_zero():
                    continue
                for j in range(n):
                    bit = 1 << j
                    if mask & bit:
                        continue
                    e = self.entries[i][j]
                    if e.is_zero():
                        continue
                    # inversions added: used columns with index greater than j
                    flip = bin(mask >> (j + 1)).count("1") & 1
                    contrib = val * e if flip == 0 else -(val * e)
                    m2 = mask | bit
                    nxt[m2] = nxt.get(m2, zero) + contrib
            level = nxt
        return level.get((1 << n) - 1, zero)

    def adjugate_inverse(self) -> "PolyMatrix":
        """Inverse via adjugate; requires a unit (monomial) determinant."""
        d = self.det()
        if len(d.terms) != 1:
            raise NonUnitDeterminantError(f"determinant is not a Laurent unit: {d}")
        dinv = d.monomial_inverse()
        n = self.rows
        cof = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = PolyMatrix(self.table,
                                   [[self.entries[r][c] for c in range(n) if c != j]
                                    for r in range(n) if r != i])
                md = minor.det() if n > 1 else GradedLaurentPoly.const(self.table, 1)
                cof[i][j] = md if (i + j) % 2 == 0 else -md
        inv = PolyMatrix(self.table, [[cof[j][i] * dinv for j in range(n)] for i in range(n)])
        if inv * self != PolyMatrix.identity(self.table, n):
            raise PolyError("adjugate inverse failed verification")  # pragma: no cover
        return inv


def matrix_adjugate_inverse(m: PolyMatrix) -> PolyMatrix:
    return m.adjugate_inverse()


# ----------------------------------------------------------------------
# coordinate maps
# ----------------------------------------------------------------------

@dataclass
class CoordinateMap:
    """Invertible polynomial substitution between two charts.

    forward[j] expresses target variable j in source variables;
    inverse[i] expresses source variable i in target variables.
    """

    source: VariableTable
    target: VariableTable
    forward: list[GradedLaurentPoly]
    inverse: list[GradedLaurentPoly]

    def to_target(self, p: GradedLaurentPoly) -> GradedLaurentPoly:
        """Re-express a source-chart polynomial in target coordinates."""
        mapping = {n: inv for n, inv in zip(self.source.names, self.inverse)}
        return p.substitute(mapping, self.target)

    def to_source(self, p: GradedLaurentPoly) -> GradedLaurentPoly:
        mapping = {n: f for n, f in zip(self.target.names, self.forward)}
        return p.substitute(mapping, self.source)

    def verify_roundtrip(self) -> None:
        for j, name in enumerate(self.target.names):
            back = self.forward[j].substitute(
                {n: inv for n, inv in zip(self.source.names, self.inverse)}, self.target)
            if back != GradedLaurentPoly.variable(self.target, name):
                raise NotTriangularError(f"forward∘inverse is not the identity on {name!r}")

    @classmethod
    def identity_map(cls, table: VariableTable) -> "CoordinateMap":
        vs = [GradedLaurentPoly.variable(table, n) for n in table.names]
        return cls(table, table, list(vs), list(vs))


def invert_triangular_map(source: VariableTable, target: VariableTable,
                          forward: Sequence[GradedLaurentPoly]) -> CoordinateMap:
    """Invert t_j = y_j + (correction in y_1..y_{j-1}) by ascending recursion."""
    n = len(source)
    if len(forward) != n or len(target) != n:
        raise NotTriangularError("triangular map must be square")
    inverse: list[GradedLaurentPoly] = []
    for j in range(n):
        corr = forward[j] - GradedLaurentPoly.variable(source, source.names[j])
        for exp in corr.terms:
            if any(exp[k] for k in range(j, n)):
                raise NotTriangularError(
                    f"entry {target.names[j]!r} is not leading-variable + earlier-variable correction")
        mapping = {source.names[k]: inverse[k] for k in range(j)}
        for k in range(j, n):
            mapping[source.names[k]] = GradedLaurentPoly.zero(target)  # absent by check
        corr_t = corr.substitute(mapping, target)
        inverse.append(GradedLaurentPoly.variable(target, target.names[j]) - corr_t)
    cmap = CoordinateMap(source, target, list(forward), inverse)
    cmap.verify_roundtrip()
    return cmap


# ----------------------------------------------------------------------
# Euler-operator integration
# ----------------------------------------------------------------------

def euler_integrate(second_derivs: PolyMatrix, degrees: Sequence[Scalar]) -> GradedLaurentPoly:
    """Recover a degree-2 quasi-homogeneous F from its Hessian M_{ab}.

    Uses grad_b F = (1/(2-d_b)) sum_a d_a t^a M_{ab}, then
    F = (1/2) sum_b d_b t^b grad_b F, and verifies the reconstruction
    reproduces M entrywise.
    """
    M = second_derivs
    table = M.table
    n = M.rows
    degs = [_frac(d) for d in degrees]
    if M.cols != n or len(degs) != n:
        raise PolyError("Hessian/degree shape mismatch")
    if not M.is_symmetric():
        raise InconsistentSystemError("Hessian input is not symmetric")
    for d in degs:
        if d == 2:
            raise PolyError("degree 2 - d_b vanishes; Euler integration invalid")
    tvars = [GradedLaurentPoly.variable(table, table.names[i]) for i in range(n)]
    grads = []
    for b in range(n):
        s = GradedLaurentPoly.zero(table)
        for a in range(n):
            if not M[a, b].is_zero():
                s = s + degs[a] * (tvars[a] * M[a, b])
        grads.append((Fraction(1) / (2 - degs[b])) * s)
    F = GradedLaurentPoly.zero(table)
    for b in range(n):
        F = F + degs[b] * (tvars[b] * grads[b])
    F = Fraction(1, 2) * F
    for a in range(n):
        for b in range(n):
            if F.partial(table.names[a]).partial(table.names[b]) != M[a, b]:
                raise InconsistentSystemError(
                    f"mixed partial ({a},{b}) does not reproduce the input Hessian")
    return F


# ----------------------------------------------------------------------
# exact linear algebra over Fraction (small systems)
# ----------------------------------------------------------------------

def frac_matrix_inverse(mat: Sequence[Sequence[Scalar]]) -> list[list[Fraction]]:
    n = len(mat)
    a = [[_frac(v) for v in row] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise InconsistentSystemError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def frac_solve(A: Sequence[Sequence[Scalar]], b: Sequence[Scalar]) -> list[Fraction]:
    """Solve A x = b exactly; free variables are set to zero.

    A may be rectangular (stacked equations).  Raises on inconsistency.
    """
    rows = [[_frac(v) for v in row] + [_frac(rhs)] for row, rhs in zip(A, b)]
    ncols = len(rows[0]) - 1 if rows else 0
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][ncols] != 0:
            raise InconsistentSystemError("linear system is inconsistent")
    x = [Fraction(0)] * ncols
    for rr, cc in pivots:
        x[cc] = rows[rr][ncols]
    return x
