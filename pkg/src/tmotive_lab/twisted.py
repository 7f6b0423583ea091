"""Twisted polynomial rings K[tau] and K[sigma] and the star anti-involution."""
from __future__ import annotations

from .linalg import is_exact_zero


def _twist(x, n: int):
    return x if n == 0 else x.twist(n)


class TwistedPoly:
    """sum c_i V^i with V = tau (V c = c^(q) V) or V = sigma (V c = c^(-1) V)."""

    __slots__ = ("var", "c")

    def __init__(self, coeffs, var: str = "tau"):
        if var not in ("tau", "sigma"):
            raise ValueError(f"unknown twisted variable {var!r}")
        coeffs = list(coeffs)
        while coeffs and is_exact_zero(coeffs[-1]):
            coeffs.pop()
        self.var = var
        self.c = tuple(coeffs)

    @property
    def sign(self) -> int:
        return 1 if self.var == "tau" else -1

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, i: int, like=None):
        if 0 <= i < len(self.c):
            return self.c[i]
        ref = like if like is not None else (self.c[0] if self.c else None)
        if ref is None:
            raise ValueError("zero twisted polynomial has no coefficient type")
        return ref.zero_like()

    def __repr__(self) -> str:
        return f"TwistedPoly({self.var}, {list(self.c)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwistedPoly) or other.var != self.var:
            return False
        if len(self.c) != len(other.c):
            return False
        return all((a - b).is_zero() for a, b in zip(self.c, other.c))

    def __hash__(self):
        return hash((self.var, self.c))

    def _check(self, other: "TwistedPoly"):
        if other.var != self.var:
            raise ValueError("mixing tau and sigma polynomials")

    def __add__(self, other: "TwistedPoly") -> "TwistedPoly":
        self._check(other)
        n = max(len(self.c), len(other.c))
        like = (self.c or other.c)[0] if (self.c or other.c) else None
        if like is None:
            return self
        return TwistedPoly([self.coeff(i, like) + other.coeff(i, like) for i in range(n)], self.var)

    def __neg__(self) -> "TwistedPoly":
        return TwistedPoly([-x for x in self.c], self.var)

    def __sub__(self, other: "TwistedPoly") -> "TwistedPoly":
        return self + (-other)

    def __mul__(self, other) -> "TwistedPoly":
        if not isinstance(other, TwistedPoly):
            # scalar on the right: V^i c = c^(+-i) V^i
            return TwistedPoly([a * _twist(other, self.sign * i) for i, a in enumerate(self.c)], self.var)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return TwistedPoly([], self.var)
        out: list = [None] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if is_exact_zero(a):
                continue
            for j, b in enumerate(other.c):
                if is_exact_zero(b):
                    continue
                term = a * _twist(b, self.sign * i)
                out[i + j] = term if out[i + j] is None else out[i + j] + term
        like = self.c[0]
        return TwistedPoly([x if x is not None else like.zero_like() for x in out], self.var)

    def __rmul__(self, scalar) -> "TwistedPoly":
        return TwistedPoly([scalar * a for a in self.c], self.var)

    def twist(self, n: int) -> "TwistedPoly":
        return TwistedPoly([_twist(a, n) for a in self.c], self.var)


def tw_mul(a: TwistedPoly, b: TwistedPoly) -> TwistedPoly:
    return a * b


def star(b):
    """b* = sum c_i^(-i) sigma^i; on a matrix, entrywise star of the transpose."""
    if isinstance(b, list):
        return [[star(b[j][i]) for j in range(len(b))] for i in range(len(b[0]))]
    if b.var != "tau":
        raise ValueError("star expects a tau-polynomial")
    return TwistedPoly([_twist(c, -i) for i, c in enumerate(b.c)], "sigma")


def star_inverse(b: TwistedPoly) -> TwistedPoly:
    if b.var != "sigma":
        raise ValueError("expects a sigma-polynomial")
    return TwistedPoly([_twist(c, i) for i, c in enumerate(b.c)], "tau")


def apply(b: TwistedPoly, x):
    """Evaluate the F_q-linear operator sum c_i tau^i at a series: sum c_i x^(q^i)."""
    if b.var != "tau":
        raise ValueError("only tau-polynomials act on series")
    out = None
    for i, c in enumerate(b.c):
        if is_exact_zero(c):
            continue
        xt = x.twist(i)
        term = _as_series_like(c, xt, x.prec) * xt
        out = term if out is None else out + term
    return out if out is not None else x.zero_like()


def _as_series_like(c, x, prec):
    from .ffbase import ExactCoef
    from .series import exact_to_series

    if isinstance(c, ExactCoef):
        prec = prec + max(0, x.deg_bound()) + 1 if prec != float("inf") else 64
        return exact_to_series(c, x.e, prec)
    return c


def tw_matmul(A, B):
    """Matrix product with TwistedPoly entries."""
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for l in range(k):
                term = A[i][l] * B[l][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out

