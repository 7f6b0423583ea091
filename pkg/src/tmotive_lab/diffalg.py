"""Linear hyperdifferential polynomials over F_q(t) and elimination of derivatives.

Variables are ``DiffVar(h, i, j, l)``: the l-th t-hyperderivative of entry
(i, j) of the matrix X_h (indices 1-based).  Only the homogeneous linear
fragment is represented; it is closed under the hyperderivatives.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

from .errors import EliminationMismatch
from .ffbase import GF, Poly, RatFunc, binom_mod_p
from .galois import bareiss_rank, prolonged_matrix


@total_ordering
@dataclass(frozen=True)
class DiffVar:
    h: int
    i: int
    j: int
    l: int = 0

    @property
    def key(self) -> tuple:
        # block first, then derivative order, then column-major position
        return (self.h, self.l, self.j, self.i)

    def __lt__(self, other: "DiffVar") -> bool:
        return self.key < other.key

    def raised(self, k: int) -> "DiffVar":
        return DiffVar(self.h, self.i, self.j, self.l + k)

    def __str__(self) -> str:
        d = f"d{self.l}" if self.l else ""
        return f"{d}X{self.h}[{self.i},{self.j}]"


def var_cmp(a: DiffVar, b: DiffVar) -> int:
    return (a.key > b.key) - (a.key < b.key)


def elimination_key(v: DiffVar) -> tuple:
    """Order putting every derivative variable above every order-0 variable."""
    return (v.l >= 1, *v.key)


class LinDiffPoly:
    """sum c_v * v + constant with c_v in F_q(t); zero coefficients are dropped."""

    __slots__ = ("F", "terms", "constant")

    def __init__(self, F: GF, terms: dict | None = None, constant: RatFunc | None = None):
        self.F = F
        self.terms = {v: c for v, c in (terms or {}).items() if not c.is_zero()}
        self.constant = constant if constant is not None and not constant.is_zero() else None

    @classmethod
    def var(cls, F: GF, v: DiffVar, coef: RatFunc | None = None) -> "LinDiffPoly":
        return cls(F, {v: coef if coef is not None else _one(F)})

    def is_zero(self) -> bool:
        return not self.terms and self.constant is None

    def is_homogeneous(self) -> bool:
        return self.constant is None

    def lead(self, key=None) -> DiffVar | None:
        if not self.terms:
            return None
        return max(self.terms, key=key or (lambda v: v.key))

    def order(self) -> int:
        return max((v.l for v in self.terms), default=0)

    def __add__(self, other: "LinDiffPoly") -> "LinDiffPoly":
        terms = dict(self.terms)
        for v, c in other.terms.items():
            terms[v] = terms[v] + c if v in terms else c
        const = _add_opt(self.constant, other.constant)
        return LinDiffPoly(self.F, terms, const)

    def __neg__(self) -> "LinDiffPoly":
        return LinDiffPoly(self.F, {v: -c for v, c in self.terms.items()}, None if self.constant is None else -self.constant)

    def __sub__(self, other: "LinDiffPoly") -> "LinDiffPoly":
        return self + (-other)

    def scale(self, c: RatFunc) -> "LinDiffPoly":
        if c.is_zero():
            return LinDiffPoly(self.F)
        return LinDiffPoly(self.F, {v: c * x for v, x in self.terms.items()}, None if self.constant is None else c * self.constant)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinDiffPoly) and (self - other).is_zero()

    def __repr__(self) -> str:
        parts = [f"({c.num.codes()}/{c.den.codes()})*{v}" for v, c in sorted(self.terms.items(), key=lambda kv: kv[0].key, reverse=True)]
        if self.constant is not None:
            parts.append(f"({self.constant.num.codes()}/{self.constant.den.codes()})")
        return " + ".join(parts) or "0"


def _one(F: GF) -> RatFunc:
    return RatFunc(Poly.const(F, F.one()))


def _add_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def apply_partial(a: int, P: LinDiffPoly) -> LinDiffPoly:
    """a-th hyperderivative: d^a(c v) = sum_i d^(a-i)(c) * C(l+i, i) * d^(l+i) X."""
    if a == 0:
        return P
    F, p = P.F, P.F.p
    terms: dict = {}
    for v, c in P.terms.items():
        for i in range(a + 1):
            w = binom_mod_p(v.l + i, i, p)
            if not w:
                continue
            dc = c.hyperderiv(a - i)
            if dc.is_zero():
                continue
            nv = v.raised(i)
            val = dc * w if w != 1 else dc
            terms[nv] = terms[nv] + val if nv in terms else val
    const = None if P.constant is None else P.constant.hyperderiv(a)
    return LinDiffPoly(F, terms, const)


class Basis:
    """Echelon basis keyed by leading variable; every element is monic."""

    def __init__(self, F: GF, key=None):
        self.F = F
        self.key = key or (lambda v: v.key)
        self.rows: dict = {}

    def reduce(self, P: LinDiffPoly) -> LinDiffPoly:
        if not self.rows:
            return P
        out = P
        done: set = set()
        while True:
            cands = [v for v in out.terms if v in self.rows and v not in done]
            if not cands:
                return out
            v = max(cands, key=self.key)
            out = out - self.rows[v].scale(out.terms[v])
            done.add(v)

    def add(self, P: LinDiffPoly) -> bool:
        R = self.reduce(P)
        if not R.terms:
            return False
        v = R.lead(self.key)
        R = R.scale(R.terms[v].inv())
        self.rows[v] = R
        return True

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows.values())


def interreduce(G, key=None) -> Basis:
    if not G:
        return Basis(None, key)
    B = Basis(G[0].F, key)
    for g in G:
        B.add(g)
    return B


def reduce(P: LinDiffPoly, G, key=None) -> LinDiffPoly:
    """Remainder of P modulo the linear span of G (interreduced automatically)."""
    B = G if isinstance(G, Basis) else interreduce(list(G), key)
    return B.reduce(P)


def x_vars(r: int, h: int, l: int = 0) -> list[DiffVar]:
    """vec(X_h) in column-major order: position (j-1) r + i <-> (i, j)."""
    return [DiffVar(h, i, j, l) for j in range(1, r + 1) for i in range(1, r + 1)]


def generate_T(B: list, r: int, n: int, L: int | None = None, F: GF | None = None) -> list[LinDiffPoly]:
    """Prolongations up to order L of B vec(X_0) and d^h(X_0) - X_h, h = 1..n."""
    if L is None:
        L = n
    if L < n:
        raise ValueError("order bound L must be at least n")
    if F is None:
        F = B[0][0].F
    one = _one(F)
    base = []
    xs = x_vars(r, 0)
    for row in B:
        base.append(LinDiffPoly(F, {v: c for v, c in zip(xs, row)}))
    for h in range(1, n + 1):
        for v in xs:
            base.append(LinDiffPoly(F, {DiffVar(0, v.i, v.j, h): one, DiffVar(h, v.i, v.j, 0): -one}))
    return [apply_partial(l, g) for g in base for l in range(L + 1)]


def _system_rows(polys, cols: list[DiffVar], F: GF) -> list[list[RatFunc]]:
    zero = RatFunc(Poly.zero(F))
    return [[P.terms.get(v, zero) for v in cols] for P in polys]


def dB_system(B: list, r: int, n: int, F: GF) -> list[LinDiffPoly]:
    """d_{t,n+1}[B] vec([X_n, ..., X_0]) as linear polynomials."""
    cols = [v for c in range(n + 1) for v in x_vars(r, n - c)]
    dB = prolonged_matrix(B, n)
    return [LinDiffPoly(F, dict(zip(cols, row))) for row in dB]


@dataclass
class Elimination:
    system: list
    r: int
    n: int
    L: int
    rank: int
    matches: bool | None = None

    def rows(self, F: GF) -> list[list[RatFunc]]:
        cols = [v for h in range(self.n + 1) for v in x_vars(self.r, h)]
        return _system_rows(self.system, cols, F)


def _eliminate_once(gens: list[LinDiffPoly], r: int, n: int) -> list[LinDiffPoly]:
    basis = interreduce(gens, elimination_key)
    return [P for P in basis if P.lead(elimination_key).l == 0]


def eliminate(gens: list[LinDiffPoly], r: int, n: int, B: list | None = None, L: int | None = None, F: GF | None = None) -> Elimination:
    """Order-0 part of the echelon form of gens.

    With B supplied, the result is compared with the row space of
    d_{t,n+1}[B]; on mismatch the generators are rebuilt with L + 2 once.
    """
    if F is None:
        F = gens[0].F if gens else (B[0][0].F if B else None)
    system = _eliminate_once(gens, r, n)
    order = max((g.order() for g in gens), default=n)
    res = Elimination(system, r, n, L if L is not None else order, len(system))
    if B is None or not B:
        if B is not None:
            res.matches = not system
        return res
    if _same_row_space(system, dB_system(B, r, n, F), r, n, F):
        res.matches = True
        return res
    L2 = res.L + 2
    system = _eliminate_once(generate_T(B, r, n, L2, F), r, n)
    if _same_row_space(system, dB_system(B, r, n, F), r, n, F):
        return Elimination(system, r, n, L2, len(system), True)
    raise EliminationMismatch(f"eliminated system differs from d[B] for n={n} even at L={L2}")


def _same_row_space(A: list, D: list, r: int, n: int, F: GF) -> bool:
    cols = [v for h in range(n + 1) for v in x_vars(r, h)]
    ra, rd = _system_rows(A, cols, F), _system_rows(D, cols, F)
    ka = bareiss_rank(ra, F) if ra else 0
    kd = bareiss_rank(rd, F) if rd else 0
    if ka != kd:
        return False
    both = ra + rd
    return (bareiss_rank(both, F) if both else 0) == ka


def eliminate_from_B(B: list, r: int, n: int, F: GF | None = None, L: int | None = None) -> Elimination:
    if F is None:
        F = B[0][0].F
    if not B:
        return Elimination([], r, n, n if L is None else L, 0, True)
    L = n if L is None else L
    return eliminate(generate_T(B, r, n, L, F), r, n, B, L, F)


def prolong_set(S: list[LinDiffPoly], L: int) -> list[LinDiffPoly]:
    return [apply_partial(l, g) for g in S for l in range(L + 1)]


def linear_ideal_contains(P: LinDiffPoly, S: list[LinDiffPoly], L: int) -> bool:
    """Membership of P in the hyperdifferential ideal of S, using prolongations up to L."""
    if any(not g.is_homogeneous() for g in S):
        raise ValueError("generators must be homogeneous of degree one")
    if P.is_zero():
        return True
    if not S:
        return False
    return reduce(P, prolong_set(S, L)).is_zero()


__all__ = [
    "Basis",
    "DiffVar",
    "Elimination",
    "LinDiffPoly",
    "apply_partial",
    "dB_system",
    "eliminate",
    "eliminate_from_B",
    "elimination_key",
    "generate_T",
    "interreduce",
    "linear_ideal_contains",
    "prolong_set",
    "reduce",
    "var_cmp",
    "x_vars",
]
