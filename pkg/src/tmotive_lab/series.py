"""Truncated ramified Laurent series, Tate polynomials, d-matrices and D_zeta.

A ``RamSeries`` represents sum c_a * vt^a in the variable vt = theta^(1/e),
stored densely from the top exponent downwards.  ``prec = N`` means every
exponent <= -N is unknown; ``math.inf`` marks an exact value.
A ``TatePoly`` is a t-polynomial (or t-truncated power series) whose
coefficients share one ramification index, one top exponent and one precision.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction

import numpy as np

from .errors import (
    DivisionByZeroWithinPrecision,
    InseparableRamification,
    NonTwistable,
    PrecisionExhausted,
)
from .ffbase import GF, ExactCoef, Poly, RatFunc, TPoly, binom_mod_p, binom_padic
from .linalg import is_exact_zero

INF = math.inf


def _iprec(x):
    return x if x == INF else int(x)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# ---- row helpers: the vt-exponent axis is axis -2 of every coefficient array


def _normalize(c: np.ndarray, top: int, prec):
    if prec != INF:
        keep = max(0, top + prec)
        if c.shape[-2] > keep:
            c = c[..., :keep, :]
    if c.shape[-2] == 0:
        return c, 0
    nz = np.flatnonzero(_row_nonzero(c))
    if nz.size == 0:
        return c[..., :0, :], 0
    return c[..., nz[0] : nz[-1] + 1, :], top - int(nz[0])


def _stretch(c: np.ndarray, f: int) -> np.ndarray:
    L = c.shape[-2]
    if f == 1 or L <= 1:
        return c
    out = np.zeros((*c.shape[:-2], (L - 1) * f + 1, c.shape[-1]), dtype=np.int64)
    out[..., ::f, :] = c
    return out


def _align(c1, top1, c2, top2):
    """Pad two row-arrays onto a common exponent window."""
    if c1.shape[-2] == 0:
        top1 = top2
    if c2.shape[-2] == 0:
        top2 = top1
    top = max(top1, top2)
    bot = min(top1 - c1.shape[-2], top2 - c2.shape[-2])
    L = top - bot

    def pad(c, t):
        before = top - t
        if before == 0 and c.shape[-2] == L:
            return c
        out = np.zeros((*c.shape[:-2], L, c.shape[-1]), dtype=c.dtype)
        out[..., before : before + c.shape[-2], :] = c
        return out

    return pad(c1, top1), pad(c2, top2), top


def _row_nonzero(c: np.ndarray) -> np.ndarray:
    axes = tuple(i for i in range(c.ndim) if i != c.ndim - 2)
    return c.any(axis=axes)


def _series_inv(F: GF, c: np.ndarray, n: int) -> np.ndarray:
    """First n coefficients of 1/c as a power series (c[0] invertible)."""
    g = F.inv(c[0])[None, :]
    m = 1
    while m < n:
        m = min(2 * m, n)
        cg = F.conv(c[:m], g)[:m]
        corr = (-cg) % F.p
        corr[0] = (corr[0] + F.const(2)) % F.p
        g = F.conv(g, corr)[:m]
    return g[:n]


class RamSeries:
    """Element of F_{q^m}((theta^(1/e)))^ known modulo vt^(-prec)."""

    __slots__ = ("F", "e", "top", "c", "prec")

    def __init__(self, F: GF, e: int, top: int, c, prec=INF):
        c = np.asarray(c, dtype=np.int64)
        if c.ndim == 1:
            c = c.reshape(-1, F.k)
        prec = _iprec(prec)
        c, top = _normalize(c % F.p, int(top), prec)
        self.F, self.e, self.top, self.c, self.prec = F, int(e), top, c, prec

    # construction
    @classmethod
    def zero(cls, F: GF, e: int = 1, prec=INF) -> "RamSeries":
        return cls(F, e, 0, F.zero((0,)), prec)

    @classmethod
    def monomial(cls, F: GF, exp: int, v=None, e: int = 1, prec=INF) -> "RamSeries":
        v = F.one() if v is None else np.asarray(v, dtype=np.int64)
        return cls(F, e, exp, v[None, :], prec)

    @classmethod
    def const(cls, F: GF, v, e: int = 1, prec=INF) -> "RamSeries":
        if isinstance(v, (int, np.integer)):
            v = F.const(int(v))
        return cls.monomial(F, 0, v, e, prec)

    @classmethod
    def from_terms(cls, F: GF, e: int, terms: dict[int, object], prec=INF) -> "RamSeries":
        if not terms:
            return cls.zero(F, e, prec)
        top, bot = max(terms), min(terms)
        c = F.zero((top - bot + 1,))
        for a, v in terms.items():
            c[top - a] = F.vec(v) if isinstance(v, (int, np.integer)) else v
        return cls(F, e, top, c, prec)

    def zero_like(self) -> "RamSeries":
        return RamSeries.zero(self.F, self.e)

    def one_like(self) -> "RamSeries":
        return RamSeries.const(self.F, 1, self.e)

    # inspection
    def is_zero(self) -> bool:
        return self.c.shape[0] == 0

    def is_exact_zero(self) -> bool:
        return self.is_zero() and self.prec == INF

    @property
    def lead(self) -> int | None:
        return None if self.is_zero() else self.top

    def deg_bound(self):
        """Upper bound on the true vt-degree (uses -prec for an unresolved zero)."""
        return self.top if not self.is_zero() else -self.prec

    def degree(self):
        """Degree in theta units (Fraction) of the known leading term."""
        if self.is_zero():
            return -INF if self.prec == INF else Fraction(-self.prec, self.e)
        return Fraction(self.top, self.e)

    def valuation(self):
        d = self.degree()
        return -d

    def digits(self):
        """Number of certified coefficients counted down from the leading term."""
        if self.is_zero():
            return 0
        return INF if self.prec == INF else self.top + self.prec

    def coeff(self, a: int) -> np.ndarray:
        i = self.top - a
        if 0 <= i < self.c.shape[0]:
            return self.c[i]
        if self.prec != INF and a <= -self.prec:
            raise PrecisionExhausted(f"exponent {a} is beyond the known precision")
        return self.F.zero()

    def terms(self) -> list[tuple[int, int]]:
        codes = self.F.code(self.c) if self.c.size else []
        return [(self.top - i, int(x)) for i, x in enumerate(np.atleast_1d(codes)) if x]

    def __repr__(self) -> str:
        return f"RamSeries({self.to_text()})"

    # precision and ramification
    def lift(self, e: int) -> "RamSeries":
        if e == self.e:
            return self
        if e % self.e:
            raise ValueError(f"cannot lift ramification {self.e} to {e}")
        f = e // self.e
        return RamSeries(self.F, e, self.top * f, _stretch(self.c, f), self.prec * f if self.prec != INF else INF)

    def with_prec(self, prec) -> "RamSeries":
        return RamSeries(self.F, self.e, self.top, self.c, min(prec, self.prec))

    def _common(self, other: "RamSeries"):
        if self.e == other.e:
            return self, other
        e = _lcm(self.e, other.e)
        return self.lift(e), other.lift(e)

    def _coerce(self, other):
        if isinstance(other, RamSeries):
            return other
        if isinstance(other, (int, np.integer)):
            return RamSeries.const(self.F, int(other), self.e)
        if isinstance(other, ExactCoef):
            return exact_to_series(other, self.e, self.prec + max(self.deg_bound(), 0) + 1 if self.prec != INF else 64)
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(other)
        ca, cb, top = _align(a.c, a.top, b.c, b.top)
        return RamSeries(a.F, a.e, top, ca + cb, min(a.prec, b.prec))

    __radd__ = __add__

    def __neg__(self):
        return RamSeries(self.F, self.e, self.top, -self.c, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, v) -> "RamSeries":
        return RamSeries(self.F, self.e, self.top, self.F.mul(self.c, v), self.prec)

    def shift(self, d: int) -> "RamSeries":
        """Multiply by vt^d."""
        return RamSeries(self.F, self.e, self.top + d, self.c, self.prec - d if self.prec != INF else INF)

    def __mul__(self, other):
        if isinstance(other, np.ndarray):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(other)
        if a.is_exact_zero() or b.is_exact_zero():
            return RamSeries.zero(a.F, a.e)
        A, B = a.deg_bound(), b.deg_bound()
        prec = min(b.prec - A, a.prec - B)
        ca, cb = a.c, b.c
        if prec != INF:
            ca = ca[: max(0, a.top + b.top + int(prec))]
            cb = cb[: max(0, a.top + b.top + int(prec))]
        return RamSeries(a.F, a.e, a.top + b.top, a.F.conv(ca, cb), prec)

    __rmul__ = __mul__

    def inv(self, prec=None) -> "RamSeries":
        if self.is_zero():
            raise DivisionByZeroWithinPrecision("inverse of a series that vanishes at its precision")
        L = self.top
        if self.c.shape[0] == 1 and self.prec == INF:
            return RamSeries(self.F, self.e, -L, self.F.inv(self.c[0])[None, :], INF)
        new_prec = 2 * L + self.prec if self.prec != INF else INF
        if prec is not None:
            new_prec = min(new_prec, prec)
        if new_prec == INF:
            raise ValueError("inverse of an exact non-monomial series needs a target precision")
        n = max(0, -L + int(new_prec))
        return RamSeries(self.F, self.e, -L, _series_inv(self.F, self.c, n), new_prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.prec == INF and other.c.shape[0] > 1:
            if self.prec == INF:
                raise ValueError("exact division by a non-monomial series needs a finite precision")
            return self * other.inv(self.prec + self.deg_bound())
        return self * other.inv()

    def __pow__(self, n: int) -> "RamSeries":
        if n < 0:
            return self.inv() ** (-n)
        out = self.one_like()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def agrees(self, other, prec=None) -> bool:
        d = self - other
        if prec is not None:
            d = d.with_prec(prec)
        return d.is_zero()

    # twisting and derivatives
    def twist(self, n: int, ramify: bool = False) -> "RamSeries":
        c, top, prec, e = _twist_rows(self.F, self.c, self.top, self.prec, self.e, n, ramify)
        return RamSeries(self.F, e, top, c, prec)

    def hyperderiv_theta(self, j: int) -> "RamSeries":
        if j == 0:
            return self
        c, top, prec = _theta_deriv_rows(self.F, self.c, self.top, self.prec, self.e, j)
        return RamSeries(self.F, self.e, top, c, prec)

    # text I/O
    def to_text(self) -> str:
        terms = ",".join(f"({a},{v})" for a, v in self.terms())
        prec = "inf" if self.prec == INF else str(self.prec)
        return f"e={self.e}; m={self.F.m}; terms=[{terms}]; prec={prec}"

    @classmethod
    def from_text(cls, F: GF, text: str) -> "RamSeries":
        m = _TEXT_RE.fullmatch(text.strip())
        if not m:
            raise ValueError(f"malformed series text: {text!r}")
        e, mm, body, prec = int(m["e"]), int(m["m"]), m["terms"], m["prec"]
        if mm != F.m:
            raise ValueError(f"series over m={mm} read into a field with m={F.m}")
        terms = {}
        for a, v in _TERM_RE.findall(body):
            terms[int(a)] = int(v)
        if any(not 0 <= v < F.size for v in terms.values()):
            raise ValueError("coefficient code outside the field")
        return cls.from_terms(F, e, terms, INF if prec == "inf" else int(prec))


_TEXT_RE = re.compile(
    r"e=(?P<e>\d+);\s*m=(?P<m>\d+);\s*terms=\[(?P<terms>[^\]]*)\];\s*prec=(?P<prec>-?\d+|inf)"
)
_TERM_RE = re.compile(r"\(\s*(-?\d+)\s*,\s*(\d+)\s*\)")


def _twist_rows(F: GF, c, top, prec, e, n, ramify):
    if n == 0:
        return c, top, prec, e
    q = F.q
    Q = q ** abs(n)
    if n > 0:
        c2 = F.qpow(_stretch(c, Q), n)
        return c2, top * Q, (prec * Q if prec != INF else INF), e
    rows = np.flatnonzero(_row_nonzero(c)) if c.shape[-2] else np.array([], dtype=int)
    exps = top - rows
    if np.all(exps % Q == 0):
        if c.shape[-2] == 0:
            return c, 0, (-((-prec) // Q) if prec != INF else INF), e
        return F.qpow(c[..., ::Q, :], n), top // Q, (-((-prec) // Q) if prec != INF else INF), e
    if not ramify:
        raise NonTwistable(f"exponents are not all divisible by {Q}")
    return F.qpow(c, n), top, prec, e * Q


def _theta_deriv_rows(F: GF, c, top, prec, e, j):
    p = F.p
    if e % p == 0:
        raise InseparableRamification(f"ramification index {e} is divisible by p={p}")
    L = c.shape[-2]
    w = np.array([binom_padic(top - i, e, j, p) for i in range(L)], dtype=np.int64)
    shape = [1] * c.ndim
    shape[-2] = L
    c2 = (c * w.reshape(shape)) % p
    return c2, top - j * e, (prec + j * e if prec != INF else INF)


def exact_to_series(x: ExactCoef, e: int, prec) -> RamSeries:
    """Expand an exact coefficient in vt = theta^(1/e'), where e' is e times a power of p.

    w = theta^(1/q^D) becomes vt^(e'/q^D); e' is the least admissible multiple of e.
    """
    spec = x.spec
    F = spec.field
    W = spec.w_per_theta
    if x.is_zero():
        return RamSeries.zero(F, e)
    supp = np.concatenate([x.num.support(), x.den.support()])
    ee = e
    while np.any((supp * ee) % W):
        ee *= spec.p
    f = Fraction(ee, W)

    def expand(P: Poly):
        s = P.support()
        top = int(s[-1] * f)
        arr = F.zero((top - int(s[0] * f) + 1,))
        for a in s:
            arr[top - int(a * f)] = P.c[a]
        return RamSeries(F, ee, top, arr, INF)

    N = expand(x.num)
    if x.den.deg == 0 and x.den.is_one():
        return N
    D = expand(x.den)
    if D.c.shape[0] == 1:
        return N * D.inv()
    if prec == INF:
        raise ValueError("non-Laurent exact coefficient needs a finite precision")
    dprec = int(prec) * (ee // e) + N.top
    return N * D.inv(dprec)


class TatePoly:
    """t-polynomial with RamSeries coefficients sharing (e, top, prec).

    ``exact_t`` says that coefficients beyond ``tdeg`` vanish.  Otherwise the
    object is a truncation, optionally carrying ``decay = (beta, gamma)``
    (theta units) with deg a_i <= beta - gamma*i for every i >= 0.
    """

    __slots__ = ("F", "e", "top", "c", "prec", "tdeg", "exact_t", "decay")

    def __init__(self, F: GF, e: int, top: int, c, prec=INF, tdeg=None, exact_t=False, decay=None):
        c = np.asarray(c, dtype=np.int64)
        prec = _iprec(prec)
        c, top = _normalize(c % F.p, int(top), prec)
        if tdeg is None:
            tdeg = c.shape[0] - 1
        if c.shape[0] < tdeg + 1:
            c = np.concatenate([c, np.zeros((tdeg + 1 - c.shape[0], *c.shape[1:]), dtype=np.int64)])
        elif c.shape[0] > tdeg + 1:
            c = c[: tdeg + 1]
        self.F, self.e, self.top, self.c, self.prec = F, int(e), top, c, prec
        self.tdeg, self.exact_t = int(tdeg), bool(exact_t)
        self.decay = None if decay is None else (Fraction(decay[0]), Fraction(decay[1]))

    # construction
    @classmethod
    def zero(cls, F: GF, e: int = 1) -> "TatePoly":
        return cls(F, e, 0, np.zeros((1, 0, F.k), dtype=np.int64), INF, 0, True)

    @classmethod
    def from_series(cls, coeffs: list[RamSeries], exact_t: bool = False, decay=None) -> "TatePoly":
        F = coeffs[0].F
        e = 1
        for s in coeffs:
            e = _lcm(e, s.e)
        coeffs = [s.lift(e) for s in coeffs]
        prec = min(s.prec for s in coeffs)
        nz = [s for s in coeffs if not s.is_zero()]
        if not nz:
            return cls(F, e, 0, np.zeros((len(coeffs), 0, F.k), dtype=np.int64), prec, len(coeffs) - 1, exact_t, decay)
        top = max(s.top for s in nz)
        bot = min(s.top - s.c.shape[0] for s in nz)
        arr = np.zeros((len(coeffs), top - bot, F.k), dtype=np.int64)
        for i, s in enumerate(coeffs):
            if not s.is_zero():
                arr[i, top - s.top : top - s.top + s.c.shape[0]] = s.c
        return cls(F, e, top, arr, prec, len(coeffs) - 1, exact_t, decay)

    @classmethod
    def const(cls, s: RamSeries) -> "TatePoly":
        return cls.from_series([s], exact_t=True)

    @classmethod
    def t(cls, F: GF, e: int = 1) -> "TatePoly":
        return cls.from_series([RamSeries.zero(F, e), RamSeries.const(F, 1, e)], exact_t=True)

    def zero_like(self) -> "TatePoly":
        return TatePoly.zero(self.F, self.e)

    def one_like(self) -> "TatePoly":
        return TatePoly.const(RamSeries.const(self.F, 1, self.e))

    # inspection
    def coeff(self, i: int) -> RamSeries:
        if i > self.tdeg:
            if self.exact_t:
                return RamSeries.zero(self.F, self.e)
            raise PrecisionExhausted(f"t-coefficient {i} beyond truncation {self.tdeg}")
        return RamSeries(self.F, self.e, self.top, self.c[i], self.prec)

    def coeffs(self) -> list[RamSeries]:
        return [self.coeff(i) for i in range(self.tdeg + 1)]

    def is_zero(self) -> bool:
        return self.c.shape[1] == 0

    def is_exact_zero(self) -> bool:
        return self.is_zero() and self.prec == INF and self.exact_t

    def deg_bound(self):
        return self.top if not self.is_zero() else -self.prec

    def max_degree(self):
        """Highest theta-degree of a known nonzero coefficient, or None."""
        return None if self.is_zero() else Fraction(self.top, self.e)

    def __repr__(self) -> str:
        return f"TatePoly(e={self.e}, tdeg={self.tdeg}, prec={self.prec}, exact_t={self.exact_t}, top={self.top})"

    def lift(self, e: int) -> "TatePoly":
        if e == self.e:
            return self
        f = e // self.e
        if e % self.e:
            raise ValueError("bad lift")
        return TatePoly(self.F, e, self.top * f, _stretch(self.c, f), self.prec * f if self.prec != INF else INF, self.tdeg, self.exact_t, self.decay)

    def with_prec(self, prec) -> "TatePoly":
        return TatePoly(self.F, self.e, self.top, self.c, min(prec, self.prec), self.tdeg, self.exact_t, self.decay)

    def truncate_t(self, T: int) -> "TatePoly":
        if T >= self.tdeg and self.exact_t:
            return self
        T = min(T, self.tdeg)
        return TatePoly(self.F, self.e, self.top, self.c[: T + 1], self.prec, T, False, self.decay)

    def _coerce(self, other):
        if isinstance(other, TatePoly):
            return other
        if isinstance(other, RamSeries):
            return TatePoly.const(other)
        if isinstance(other, (int, np.integer)):
            return TatePoly.const(RamSeries.const(self.F, int(other), self.e))
        if isinstance(other, (ExactCoef, TPoly)):
            margin = self.prec + max(0, self.deg_bound()) + 1 if self.prec != INF else 64
            return exact_to_tate(other, self.e, margin)
        return NotImplemented

    def _common(self, other: "TatePoly"):
        if self.e == other.e:
            return self, other
        e = _lcm(self.e, other.e)
        return self.lift(e), other.lift(e)

    def _decay_at(self, gamma):
        """A majorant (beta, gamma') valid with gamma' >= gamma or None."""
        if self.exact_t:
            if self.is_zero():
                return (Fraction(-10**9), gamma)
            best = None
            for i in range(self.tdeg + 1):
                nz = np.flatnonzero(self.c[i].any(axis=1))
                d = Fraction(self.top - int(nz[0]), self.e) if nz.size else Fraction(-self.prec, self.e) if self.prec != INF else None
                if d is None:
                    continue
                val = d + gamma * i
                best = val if best is None or val > best else best
            return (best if best is not None else Fraction(0), gamma)
        if self.decay is None:
            return None
        return (self.decay[0], min(self.decay[1], gamma))

    @staticmethod
    def _merge_decay(a: "TatePoly", b: "TatePoly", mode: str):
        if a.exact_t and b.exact_t:
            return None
        ga = a.decay[1] if (not a.exact_t and a.decay) else None
        gb = b.decay[1] if (not b.exact_t and b.decay) else None
        cands = [g for g in (ga, gb) if g is not None]
        if (not a.exact_t and a.decay is None) or (not b.exact_t and b.decay is None) or not cands:
            return None
        gamma = min(cands)
        da, db = a._decay_at(gamma), b._decay_at(gamma)
        if mode == "add":
            return (max(da[0], db[0]), gamma)
        return (da[0] + db[0], gamma)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(other)
        if a.exact_t and b.exact_t:
            T, exact = max(a.tdeg, b.tdeg), True
        elif a.exact_t:
            T, exact = b.tdeg, False
        elif b.exact_t:
            T, exact = a.tdeg, False
        else:
            T, exact = min(a.tdeg, b.tdeg), False
        ca, cb = _pad_t(a.c, T), _pad_t(b.c, T)
        ca, cb, top = _align(ca, a.top, cb, b.top)
        decay = TatePoly._merge_decay(a, b, "add")
        return TatePoly(a.F, a.e, top, ca + cb, min(a.prec, b.prec), T, exact, decay)

    __radd__ = __add__

    def __neg__(self):
        return TatePoly(self.F, self.e, self.top, -self.c, self.prec, self.tdeg, self.exact_t, self.decay)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(other)
        if a.is_exact_zero() or b.is_exact_zero():
            return TatePoly.zero(a.F, a.e)
        if a.exact_t and b.exact_t:
            T, exact = a.tdeg + b.tdeg, True
        elif a.exact_t:
            T, exact = b.tdeg, False
        elif b.exact_t:
            T, exact = a.tdeg, False
        else:
            T, exact = min(a.tdeg, b.tdeg), False
        A, B = a.deg_bound(), b.deg_bound()
        prec = min(b.prec - A, a.prec - B)
        ca, cb = a.c[: T + 1], b.c[: T + 1]
        if prec != INF:
            cut = max(0, a.top + b.top + int(prec))
            ca, cb = ca[:, :cut], cb[:, :cut]
        prod = a.F.conv(ca, cb)[: T + 1]
        decay = TatePoly._merge_decay(a, b, "mul")
        return TatePoly(a.F, a.e, a.top + b.top, prod, prec, T, exact, decay)

    __rmul__ = __mul__

    def scale(self, v) -> "TatePoly":
        return TatePoly(self.F, self.e, self.top, self.F.mul(self.c, v), self.prec, self.tdeg, self.exact_t, self.decay)

    def inv(self) -> "TatePoly":
        """Inverse as a t-power series, truncated at tdeg."""
        a = self.coeffs()
        if self.exact_t and self.tdeg == 0:
            return TatePoly.const(a[0].inv())
        b0 = a[0].inv()
        b = [b0]
        for i in range(1, self.tdeg + 1):
            acc = None
            for j in range(1, i + 1):
                if a[j].is_exact_zero():
                    continue
                term = a[j] * b[i - j]
                acc = term if acc is None else acc + term
            b.append(RamSeries.zero(self.F, self.e) if acc is None else -(b0 * acc))
        return TatePoly.from_series(b)

    # twisting and derivatives
    def twist(self, n: int, ramify: bool = False) -> "TatePoly":
        c, top, prec, e = _twist_rows(self.F, self.c, self.top, self.prec, self.e, n, ramify)
        decay = self.decay
        if decay is not None:
            f = Fraction(self.F.q) ** n
            decay = (decay[0] * f, decay[1] * f)
        return TatePoly(self.F, e, top, c, prec, self.tdeg, self.exact_t, decay)

    def hyperderiv_t(self, j: int) -> "TatePoly":
        if j == 0:
            return self
        p = self.F.p
        T = self.tdeg - j
        if T < 0:
            if self.exact_t:
                return TatePoly.zero(self.F, self.e)
            raise PrecisionExhausted("t-derivative order exceeds the truncation degree")
        w = np.array([binom_mod_p(i + j, j, p) for i in range(T + 1)], dtype=np.int64)
        c = (self.c[j:] * w[:, None, None]) % p
        decay = None if self.decay is None else (self.decay[0] - self.decay[1] * j, self.decay[1])
        return TatePoly(self.F, self.e, self.top, c, self.prec, T, self.exact_t, decay)

    hyperderiv = hyperderiv_t

    def hyperderiv_theta(self, j: int) -> "TatePoly":
        if j == 0:
            return self
        c, top, prec = _theta_deriv_rows(self.F, self.c, self.top, self.prec, self.e, j)
        decay = None if self.decay is None else (self.decay[0] - j, self.decay[1])
        return TatePoly(self.F, self.e, top, c, prec, self.tdeg, self.exact_t, decay)

    def eval_at_theta(self, tail_bound=None) -> RamSeries:
        """Substitute t = theta.

        For a truncation, the omitted tail is bounded by the decay majorant
        (requires gamma > 1) or by an explicit theta-degree ``tail_bound``.
        """
        return eval_at_theta(self, tail_bound)


def _pad_t(c: np.ndarray, T: int) -> np.ndarray:
    if c.shape[0] >= T + 1:
        return c[: T + 1]
    return np.concatenate([c, np.zeros((T + 1 - c.shape[0], *c.shape[1:]), dtype=np.int64)])


def exact_to_tate(x, e: int, prec) -> TatePoly:
    """Convert an ExactCoef or TPoly to an exact-in-t TatePoly at ramification e (or a multiple)."""
    if isinstance(x, ExactCoef):
        return TatePoly.const(exact_to_series(x, e, prec))
    coeffs = [exact_to_series(c, e, prec) for c in x.c]
    if not coeffs:
        F = x.spec.field
        return TatePoly.zero(F, e)
    return TatePoly.from_series(coeffs, exact_t=True)


def eval_at_theta(f: TatePoly, tail_bound=None) -> RamSeries:
    F, e, T = f.F, f.e, f.tdeg
    prec = f.prec - e * T if f.prec != INF else INF
    if not f.exact_t:
        if tail_bound is None:
            if f.decay is None or f.decay[1] <= 1:
                raise PrecisionExhausted("no certified tail bound for substitution t = theta")
            beta, gamma = f.decay
            tail_bound = beta - (gamma - 1) * (T + 1)
        prec = min(prec, -math.floor(Fraction(tail_bound) * e))
    L = f.c.shape[1]
    if L == 0:
        return RamSeries.zero(F, e, prec)
    out = np.zeros((e * T + L, F.k), dtype=np.int64)
    for i in range(T + 1):
        s = e * (T - i)
        out[s : s + L] += f.c[i]
    return RamSeries(F, e, f.top + e * T, out, prec)


def dzeta(g: TatePoly, zeta, N: int) -> list[RamSeries]:
    """Coefficients of X^0..X^{N-1} of D_zeta(g): the m-th is d_t^m(g) at t = zeta."""
    F, p = g.F, g.F.p
    T = g.tdeg
    prec = g.prec
    if not g.exact_t:
        if g.decay is None or g.decay[1] <= 0:
            raise PrecisionExhausted("no certified tail bound for evaluation at a constant")
        beta, gamma = g.decay
        prec = min(prec, -math.floor((beta - gamma * (T + 1)) * g.e))
    zpows = F.zero((T + 1,))
    zpows[0] = F.one()
    for i in range(1, T + 1):
        zpows[i] = F.mul(zpows[i - 1], zeta)
    out = []
    for m in range(N):
        if m > T:
            out.append(RamSeries.zero(F, g.e, prec))
            continue
        w = F.zero((T + 1,))
        for i in range(m, T + 1):
            b = binom_mod_p(i, m, p)
            if b:
                w[i] = (zpows[i - m] * b) % p
        acc = F.mul(g.c, w[:, None, :]).sum(axis=0) % p
        out.append(RamSeries(F, g.e, g.top, acc, prec))
    return out


def xseries_mul(a: list[RamSeries], b: list[RamSeries], N: int) -> list[RamSeries]:
    """Truncated Cauchy product of two X-power series with series coefficients."""
    # an X-series is a t-polynomial in disguise, so one convolution does it
    A = TatePoly.from_series(list(a[:N]), exact_t=True)
    B = TatePoly.from_series(list(b[:N]), exact_t=True)
    P = A * B
    return [P.coeff(m) for m in range(N)]


def _hd(x, k: int, var: str):
    if k == 0:
        return x
    if var == "t":
        f = getattr(x, "hyperderiv_t", None) or x.hyperderiv
        return f(k)
    if var == "theta":
        f = getattr(x, "hyperderiv_theta", None) or getattr(x, "theta_hyperderiv", None) or x.hyperderiv
        return f(k)
    raise ValueError(f"unknown variable {var!r}")


class DMatrix:
    """d-matrix d_n[f] stored by its first block row (f, d^1 f, ..., d^{n-1} f)."""

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        self.blocks = [list(map(list, b)) for b in blocks]

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def base(self):
        return self.blocks[0]

    @property
    def rows(self) -> int:
        return len(self.blocks[0])

    @property
    def cols(self) -> int:
        return len(self.blocks[0][0])

    def __matmul__(self, other: "DMatrix") -> "DMatrix":
        from .linalg import matadd, matmul

        n = min(self.n, other.n)
        out = []
        for k in range(n):
            acc = None
            for a in range(k + 1):
                term = matmul(self.blocks[a], other.blocks[k - a])
                acc = term if acc is None else matadd(acc, term)
            out.append(acc)
        return DMatrix(out)

    def __sub__(self, other: "DMatrix") -> "DMatrix":
        from .linalg import matsub

        return DMatrix([matsub(a, b) for a, b in zip(self.blocks, other.blocks)])

    def __add__(self, other: "DMatrix") -> "DMatrix":
        from .linalg import matadd

        return DMatrix([matadd(a, b) for a, b in zip(self.blocks, other.blocks)])

    def map(self, fn) -> "DMatrix":
        return DMatrix([[[fn(x) for x in row] for row in blk] for blk in self.blocks])

    def twist(self, n: int, **kw) -> "DMatrix":
        return self.map(lambda x: x.twist(n, **kw) if kw else x.twist(n))

    def truncate(self, n: int) -> "DMatrix":
        return DMatrix(self.blocks[:n])

    def full(self):
        """Expanded upper-triangular block-Toeplitz matrix."""
        r, c, n = self.rows, self.cols, self.n
        zero = self.blocks[0][0][0].zero_like()
        out = [[zero] * (c * n) for _ in range(r * n)]
        for bi in range(n):
            for k in range(n - bi):
                blk = self.blocks[k]
                bj = bi + k
                for i in range(r):
                    for j in range(c):
                        out[bi * r + i][bj * c + j] = blk[i][j]
        return out

    def entries(self):
        for blk in self.blocks:
            for row in blk:
                yield from row


def build_dmatrix(f, n: int, var: str = "t") -> DMatrix:
    """d_{var,n}[f]: block (i, i+k) is the k-th hyperderivative of f."""
    base = f if isinstance(f, list) else [[f]]
    return DMatrix([[[_hd(x, k, var) for x in row] for row in base] for k in range(n)])
