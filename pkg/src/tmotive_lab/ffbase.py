"""Finite fields F_{q^m}, dense polynomials, rational functions and hyperderivatives.

Field elements are stored as digit vectors over F_p along the last axis of an
int64 array (little-endian in the powers of a fixed primitive root ``x``).
Integer codes ``sum(d_i * p**i)`` are used only for text I/O and table lookups.
"""
from __future__ import annotations

import functools
import math
import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import signal

from .errors import TwistDepthExceeded


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def binom_mod_p(m: int, j: int, p: int) -> int:
    """C(m, j) mod p by Lucas' theorem; zero when j > m or j < 0."""
    if j < 0 or m < 0 or j > m:
        return 0
    out = 1
    while j:
        mi, ji = m % p, j % p
        if ji > mi:
            return 0
        out = out * _small_binom(mi, ji, p) % p
        m //= p
        j //= p
    return out


@functools.lru_cache(maxsize=None)
def _small_binom(m: int, j: int, p: int) -> int:
    num = den = 1
    for i in range(j):
        num = num * (m - i) % p
        den = den * (i + 1) % p
    return num * pow(den, -1, p) % p


def binom_padic(a: int, e: int, j: int, p: int) -> int:
    """C(a/e, j) mod p for an integer a and an e prime to p.

    The generalised binomial is continuous on Z_p, so its residue only depends
    on a/e modulo p^L with p^L > j.
    """
    if j == 0:
        return 1
    mod = p
    while mod <= j:
        mod *= p
    s = a * pow(e, -1, mod) % mod
    return binom_mod_p(s, j, p)


def _first_primitive_modulus(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic primitive polynomial of degree k over F_p.

    Returned as the low coefficients (g_0, ..., g_{k-1}) of x^k + sum g_i x^i.
    """
    size = p**k
    for low in itertools.product(range(p), repeat=k):
        low = tuple(reversed(low))
        if low[0] == 0:
            continue
        # walk powers of x and measure its order
        v = [0] * k
        v[0] = 1
        order = 0
        while True:
            top = v[-1]
            v = [0] + v[:-1]
            if top:
                v = [(vi - top * gi) % p for vi, gi in zip(v, low)]
            order += 1
            if v[0] == 1 and not any(v[1:]):
                break
            if order > size:
                break
        if order == size - 1:
            return low
    raise ValueError(f"no primitive polynomial of degree {k} over F_{p}")


class GF:
    """The field F_{q^m} with q = p^e, as a k = e*m dimensional F_p-space."""

    _cache: dict[tuple[int, int, int], "GF"] = {}

    def __new__(cls, p: int, e: int = 1, m: int = 1):
        key = (p, e, m)
        inst = cls._cache.get(key)
        if inst is None:
            inst = super().__new__(cls)
            inst._build(p, e, m)
            cls._cache[key] = inst
        return inst

    def __getnewargs__(self):
        return (self.p, self.e, self.m)

    def _build(self, p: int, e: int, m: int) -> None:
        if not is_prime(p) or e < 1 or m < 1:
            raise ValueError(f"invalid field parameters p={p}, e={e}, m={m}")
        k = e * m
        self.p, self.e, self.m, self.k = p, e, m, k
        self.q = p**e
        self.size = p**k
        self.powers = p ** np.arange(k, dtype=np.int64)
        self.modulus = _first_primitive_modulus(p, k)
        n = self.size - 1
        exp = np.zeros(n, dtype=np.int64)
        v = [1] + [0] * (k - 1)
        pw = [p**i for i in range(k)]
        for i in range(n):
            exp[i] = sum(d * w for d, w in zip(v, pw))
            top = v[-1]
            v = [0] + v[:-1]
            if top:
                v = [(vi - top * gi) % p for vi, gi in zip(v, self.modulus)]
        log = np.full(self.size, -1, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        self.exp_table, self.log_table = exp, log
        self.red = self.vec(exp[np.arange(2 * k - 1) % n])
        self.mul_tensor = np.stack([self.red[i : i + k] for i in range(k)])
        frob = []
        for s in range(k):
            ex = (np.arange(k, dtype=np.int64) * p**s) % n
            frob.append(self.vec(exp[ex]))
        self.frob_mats = np.stack(frob)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})"

    def __reduce__(self):
        return (GF, (self.p, self.e, self.m))

    # conversions
    def vec(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[..., None] // self.powers) % self.p

    def code(self, v) -> np.ndarray | int:
        out = (np.asarray(v, dtype=np.int64) * self.powers).sum(-1)
        return int(out) if np.ndim(out) == 0 else out

    def zero(self, shape=()) -> np.ndarray:
        return np.zeros((*shape, self.k), dtype=np.int64)

    def one(self) -> np.ndarray:
        return self.const(1)

    def const(self, n: int) -> np.ndarray:
        v = self.zero()
        v[0] = n % self.p
        return v

    def gen(self) -> np.ndarray:
        """The primitive element x (the generator ``g`` of module files)."""
        return self.vec(self.exp_table[1 % (self.size - 1)])

    def fq_gen(self) -> np.ndarray:
        """A generator of the multiplicative group of the subfield F_q."""
        return self.vec(self.exp_table[(self.size - 1) // (self.q - 1) % (self.size - 1)])

    def fq_elements(self) -> np.ndarray:
        gam = self.code(self.fq_gen())
        step = self.log_table[gam] if gam != 1 else 0
        pw = [0] + [int(self.exp_table[(step * i) % (self.size - 1)]) for i in range(self.q - 1)]
        return self.vec(np.array(sorted(set(pw)), dtype=np.int64))

    def random(self, rng: np.random.Generator, shape=()) -> np.ndarray:
        return rng.integers(0, self.p, size=(*shape, self.k), dtype=np.int64)

    # arithmetic on digit vectors (broadcasting over leading axes)
    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        return np.einsum("...i,...j,ijl->...l", a, b, self.mul_tensor) % self.p

    def inv(self, a):
        codes = np.asarray(self.code(a))
        if np.any(codes == 0):
            raise ZeroDivisionError("inverse of zero in finite field")
        n = self.size - 1
        return self.vec(self.exp_table[(-self.log_table[codes]) % n])

    def power(self, a, n: int):
        codes = np.asarray(self.code(a))
        if n == 0:
            return self.vec(np.ones_like(codes))
        logs = self.log_table[codes]
        if n < 0 and np.any(codes == 0):
            raise ZeroDivisionError("negative power of zero")
        out = self.exp_table[(logs * n) % (self.size - 1)]
        return self.vec(np.where(codes == 0, 0, out))

    def frob(self, a, s: int):
        """a -> a^(p^s); negative s uses the inverse automorphism."""
        s %= self.k
        if s == 0:
            return a
        return (a @ self.frob_mats[s]) % self.p

    def qpow(self, a, n: int):
        """a -> a^(q^n) for any integer n."""
        return self.frob(a, self.e * n)

    def is_zero(self, a) -> bool:
        return not np.any(a)

    def in_fq(self, a) -> bool:
        return bool(np.array_equal(self.qpow(a, 1), a % self.p))

    def root(self, c, n: int):
        """Smallest-code x with x^n = c, or None."""
        cc = self.code(c)
        if cc == 0:
            return self.zero()
        N = self.size - 1
        lc = int(self.log_table[cc])
        best = None
        for lx in range(N):
            if (lx * n - lc) % N == 0:
                code = int(self.exp_table[lx])
                if best is None or code < best:
                    best = code
        return None if best is None else self.vec(best)

    def conv(self, a, b):
        """Full convolution over all leading axes, reduced in the field."""
        if 0 in a.shape[:-1] or 0 in b.shape[:-1]:
            lead = tuple(max(x + y - 1, 0) for x, y in zip(a.shape[:-1], b.shape[:-1]))
            return np.zeros((*lead, self.k), dtype=np.int64)
        if a.ndim == b.ndim and a.size * b.size <= SMALL_CONV:
            raw = _packed_convolve(a, b)
        else:
            raw = signal.convolve(a, b)
        return (raw @ self.red) % self.p


# below this product of input sizes one packed np.convolve beats scipy's dispatch
SMALL_CONV = 1 << 15


def _packed_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """n-dimensional full convolution via Kronecker substitution into 1-D."""
    shape = tuple(x + y - 1 for x, y in zip(a.shape, b.shape))
    size = math.prod(shape)

    def pack(x):
        buf = np.zeros(shape, dtype=np.int64)
        buf[tuple(slice(0, n) for n in x.shape)] = x
        last = np.ravel_multi_index(tuple(n - 1 for n in x.shape), shape)
        return buf.reshape(-1)[: last + 1]

    out = np.convolve(pack(a), pack(b))
    full = np.zeros(size, dtype=np.int64)
    full[: out.size] = out[:size]
    return full.reshape(shape)


@dataclass(frozen=True)
class FieldSpec:
    """Parameters p, e (q = p^e), constant degree m and twist depth D."""

    p: int
    e: int = 1
    m: int = 1
    D: int = 0

    def __post_init__(self):
        if not is_prime(self.p) or self.e < 1 or self.m < 1 or self.D < 0:
            raise ValueError(f"invalid field spec {self}")

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def field(self) -> GF:
        return GF(self.p, self.e, self.m)

    @property
    def w_per_theta(self) -> int:
        """Exponent of w equal to one theta, q^D."""
        return self.q**self.D

    def with_depth(self, D: int) -> "FieldSpec":
        return FieldSpec(self.p, self.e, self.m, D)


class Poly:
    """Dense univariate polynomial over a GF, coefficients lowest degree first."""

    __slots__ = ("F", "c")

    def __init__(self, F: GF, c):
        c = np.asarray(c, dtype=np.int64) % F.p
        if c.ndim != 2:
            c = c.reshape(-1, F.k)
        nz = np.flatnonzero(c.any(axis=1))
        self.F = F
        self.c = c[: nz[-1] + 1] if nz.size else c[:0]

    @classmethod
    def zero(cls, F: GF) -> "Poly":
        return cls(F, F.zero((0,)))

    @classmethod
    def const(cls, F: GF, v) -> "Poly":
        return cls(F, np.asarray(v, dtype=np.int64)[None, :])

    @classmethod
    def monomial(cls, F: GF, deg: int, v=None) -> "Poly":
        c = F.zero((deg + 1,))
        c[deg] = F.one() if v is None else v
        return cls(F, c)

    @classmethod
    def from_codes(cls, F: GF, codes) -> "Poly":
        return cls(F, F.vec(np.asarray(list(codes), dtype=np.int64)))

    def codes(self) -> list[int]:
        return [int(x) for x in np.atleast_1d(self.F.code(self.c))] if self.c.size else []

    @property
    def deg(self) -> int:
        return self.c.shape[0] - 1

    def is_zero(self) -> bool:
        return self.c.shape[0] == 0

    def is_one(self) -> bool:
        return self.deg == 0 and self.F.code(self.c[0]) == 1

    @property
    def lead(self):
        return self.c[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.F is other.F and np.array_equal(self.c, other.c)

    def __hash__(self) -> int:
        return hash((self.F.size, self.c.tobytes()))

    def __repr__(self) -> str:
        return f"Poly({self.codes()})"

    def _pad(self, n: int):
        out = self.F.zero((n,))
        out[: self.c.shape[0]] = self.c
        return out

    def __add__(self, other: "Poly") -> "Poly":
        n = max(self.c.shape[0], other.c.shape[0])
        return Poly(self.F, self._pad(n) + other._pad(n))

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(self.c.shape[0], other.c.shape[0])
        return Poly(self.F, self._pad(n) - other._pad(n))

    def __neg__(self) -> "Poly":
        return Poly(self.F, -self.c)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            return Poly(self.F, self.F.conv(self.c, other.c))
        return self.scale(other)

    def scale(self, v) -> "Poly":
        return Poly(self.F, self.F.mul(self.c, np.asarray(v, dtype=np.int64)))

    def shift(self, d: int) -> "Poly":
        if self.is_zero():
            return self
        return Poly(self.F, np.concatenate([self.F.zero((d,)), self.c]))

    def __pow__(self, n: int) -> "Poly":
        out = Poly.const(self.F, self.F.one())
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.F
        db = other.deg
        if self.deg < db:
            return Poly.zero(F), self
        if F.k == 1:
            return self._divmod_prime(other)
        r = self.c.copy()
        binv = F.inv(other.lead)
        bmon = F.mul(other.c, binv)
        qc = F.zero((self.deg - db + 1,))
        for i in range(self.deg - db, -1, -1):
            lc = r[i + db]
            if lc.any():
                qc[i] = lc
                r[i : i + db + 1] = (r[i : i + db + 1] - F.mul(bmon, lc)) % F.p
        return Poly(F, F.mul(qc, binv)), Poly(F, r[:db])

    def _divmod_prime(self, other: "Poly") -> tuple["Poly", "Poly"]:
        # schoolbook division on Python ints; faster than numpy for short inputs
        F, p = self.F, self.F.p
        r = self.c[:, 0].tolist()
        b = other.c[:, 0].tolist()
        db = len(b) - 1
        binv = pow(b[-1], p - 2, p)
        bm = [x * binv % p for x in b]
        qc = [0] * (len(r) - db)
        for i in range(len(r) - db - 1, -1, -1):
            lc = r[i + db]
            if lc:
                qc[i] = lc * binv % p
                for k in range(db + 1):
                    r[i + k] = (r[i + k] - bm[k] * lc) % p
        return Poly(F, np.array(qc, dtype=np.int64)[:, None]), Poly(F, np.array(r[:db], dtype=np.int64).reshape(-1, 1))

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        qt, rm = self.divmod(other)
        if not rm.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return qt

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.F.inv(self.lead))

    def evaluate(self, x):
        F = self.F
        acc = F.zero(np.shape(x)[:-1])
        for row in self.c[::-1]:
            acc = F.add(F.mul(acc, x), row)
        return acc

    def hyperderiv(self, j: int) -> "Poly":
        if j == 0:
            return self
        if self.deg < j:
            return Poly.zero(self.F)
        p = self.F.p
        w = np.array([binom_mod_p(i, j, p) for i in range(j, self.deg + 1)], dtype=np.int64)
        return Poly(self.F, self.c[j:] * w[:, None])

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.F, fn(self.c))

    def stretch(self, f: int) -> "Poly":
        if f == 1 or self.deg <= 0:
            return self
        out = self.F.zero((self.deg * f + 1,))
        out[::f] = self.c
        return Poly(self.F, out)

    def shrinkable(self, f: int) -> bool:
        if f == 1 or self.deg <= 0:
            return True
        mask = np.ones(self.c.shape[0], dtype=bool)
        mask[::f] = False
        return not self.c[mask].any()

    def shrink(self, f: int) -> "Poly":
        return self if f == 1 else Poly(self.F, self.c[::f])

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.c.any(axis=1))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


class RatFunc:
    """Reduced quotient of polynomials with a monic denominator.

    Over F_q this models F_q(t); the Frobenius twist acts on coefficients only.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduced: bool = False):
        F = num.F
        if den is None:
            den = Poly.const(F, F.one())
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly.const(F, F.one())
        elif not reduced and den.deg > 0:
            g = poly_gcd(num, den)
            if g.deg > 0:
                num, den = num // g, den // g
        if not den.lead[0] == 1 or np.any(den.lead[1:]):
            li = F.inv(den.lead)
            num, den = num.scale(li), den.scale(li)
        self.num, self.den = num, den

    # construction helpers; subclasses override _new to keep their metadata
    def _new(self, num: Poly, den: Poly | None = None, reduced: bool = False):
        return RatFunc(num, den, reduced)

    @property
    def F(self) -> GF:
        return self.num.F

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p)

    @classmethod
    def const(cls, F: GF, v) -> "RatFunc":
        return cls(Poly.const(F, v))

    @classmethod
    def from_int(cls, F: GF, n: int) -> "RatFunc":
        return cls(Poly.const(F, F.const(n)))

    @classmethod
    def var(cls, F: GF) -> "RatFunc":
        return cls(Poly.monomial(F, 1))

    def zero_like(self):
        return self._new(Poly.zero(self.F))

    def one_like(self):
        return self._new(Poly.const(self.F, self.F.one()))

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return self._new(other)
        if isinstance(other, (int, np.integer)):
            return self._new(Poly.const(self.F, self.F.const(int(other))))
        if isinstance(other, np.ndarray):
            return self._new(Poly.const(self.F, other))
        return NotImplemented

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_poly(self) -> bool:
        return self.den.deg == 0

    def is_const(self) -> bool:
        return self.num.deg <= 0 and self.den.deg == 0

    def const_value(self):
        return self.num.c[0] if self.num.deg == 0 else self.F.zero()

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.num.codes()}/{self.den.codes()})"

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return self._new(other.num, other.den, reduced=True)
        if self.den == other.den:
            return self._new(self.num + other.num, self.den)
        return self._new(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, np.ndarray):
            return self._new(self.num.scale(other), self.den)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return self.zero_like()
        if self.den.deg == 0 and other.den.deg == 0:
            return self._new(self.num * other.num, self.den, reduced=True)
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n = (self.num // g1) * (other.num // g2)
        d = (self.den // g2) * (other.den // g1)
        return self._new(n, d, reduced=True)

    __rmul__ = __mul__

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return self._new(self.den, self.num, reduced=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        return self._new(self.num**n, self.den**n, reduced=True)

    def evaluate(self, x):
        F = self.F
        return F.mul(self.num.evaluate(x), F.inv(self.den.evaluate(x)))

    def hyperderiv(self, j: int):
        """j-th hyperderivative in the variable via the quotient formula."""
        if j == 0 or self.is_zero():
            return self if j == 0 else self.zero_like()
        if self.den.deg == 0:
            return self._new(self.num.hyperderiv(j), self.den, reduced=False)
        N = self._new(self.num)
        out = self._new(self.num.hyperderiv(j)) * self._new(Poly.const(self.F, self.F.one()), self.den)
        for i in range(j):
            out = out + N.hyperderiv(i) * _recip_hyperderiv(self, j - i)
        return out

    def twist(self, n: int):
        """Frobenius twist of coefficients; the variable is fixed."""
        F = self.F
        return self._new(
            self.num.map_coeffs(lambda c: F.qpow(c, n)),
            self.den.map_coeffs(lambda c: F.qpow(c, n)),
            reduced=True,
        )


def _recip_hyperderiv(f: RatFunc, k: int) -> RatFunc:
    """k-th hyperderivative of 1/D for the denominator D of f (k >= 1)."""
    D = f.den
    F = f.F
    p = F.p
    one = Poly.const(F, F.one())
    out = f._new(Poly.zero(F))
    De = one
    for e in range(1, k + 1):
        De = De * D
        coef = binom_mod_p(k + 1, e + 1, p) * (-1) ** e % p
        if coef:
            term = f._new(De.hyperderiv(k).scale(F.const(coef)), D ** (e + 1))
            out = out + term
    return out


class ExactCoef(RatFunc):
    """Rational function of w over F_{q^m} where theta = w^(q^D)."""

    __slots__ = ("spec",)

    def __init__(self, num: Poly, den: Poly | None = None, reduced: bool = False, spec: FieldSpec | None = None):
        super().__init__(num, den, reduced)
        if spec is None:
            raise ValueError("ExactCoef needs a FieldSpec")
        self.spec = spec

    def _new(self, num, den=None, reduced=False):
        return ExactCoef(num, den, reduced, spec=self.spec)

    @classmethod
    def theta(cls, spec: FieldSpec) -> "ExactCoef":
        return cls(Poly.monomial(spec.field, spec.w_per_theta), spec=spec)

    @classmethod
    def w(cls, spec: FieldSpec) -> "ExactCoef":
        return cls(Poly.monomial(spec.field, 1), spec=spec)

    @classmethod
    def scalar(cls, spec: FieldSpec, v) -> "ExactCoef":
        F = spec.field
        if isinstance(v, (int, np.integer)):
            v = F.const(int(v))
        return cls(Poly.const(F, v), spec=spec)

    def _coerce(self, other):
        if isinstance(other, ExactCoef):
            if other.spec != self.spec:
                raise ValueError("mixing ExactCoef with different field specs")
            return other
        return super()._coerce(other)

    def twist(self, n: int) -> "ExactCoef":
        """Frobenius twist by q^n: coefficients and exponents of w scale by q^n."""
        if n == 0 or self.is_zero():
            return self
        F = self.F
        f = self.spec.q ** abs(n)
        num, den = self.num, self.den
        if n > 0:
            num, den = num.stretch(f), den.stretch(f)
        else:
            if not (num.shrinkable(f) and den.shrinkable(f)):
                raise TwistDepthExceeded(f"twist by {n} leaves the w-lattice (depth {self.spec.D})")
            num, den = num.shrink(f), den.shrink(f)
        return ExactCoef(
            num.map_coeffs(lambda c: F.qpow(c, n)),
            den.map_coeffs(lambda c: F.qpow(c, n)),
            reduced=True,
            spec=self.spec,
        )

    def degree(self):
        """Degree in theta units as a Fraction (-inf for zero)."""
        if self.is_zero():
            return float("-inf")
        return Fraction(self.num.deg - self.den.deg, self.spec.w_per_theta)

    def theta_hyperderiv(self, j: int) -> "ExactCoef":
        """d/dtheta hyperderivative; only available when the value lies in F(theta)."""
        f = self.spec.w_per_theta
        if not (self.num.shrinkable(f) and self.den.shrinkable(f)):
            raise ValueError("theta-derivative of an element outside F_{q^m}(theta)")
        R = RatFunc(self.num.shrink(f), self.den.shrink(f), reduced=True).hyperderiv(j)
        return ExactCoef(R.num.stretch(f), R.den.stretch(f), reduced=True, spec=self.spec)


def hyperderiv_poly(f: Poly, j: int) -> Poly:
    return f.hyperderiv(j)


def hyperderiv_rat(f: RatFunc, j: int) -> RatFunc:
    return f.hyperderiv(j)


def twist_exact(f: ExactCoef, n: int) -> ExactCoef:
    return f.twist(n)


class TPoly:
    """Polynomial in t with ExactCoef coefficients (entries of Phi, V, H)."""

    __slots__ = ("spec", "c")

    def __init__(self, spec: FieldSpec, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.spec = spec
        self.c = tuple(coeffs)

    @classmethod
    def const(cls, x: ExactCoef) -> "TPoly":
        return cls(x.spec, [x])

    @classmethod
    def t(cls, spec: FieldSpec) -> "TPoly":
        return cls(spec, [ExactCoef.scalar(spec, 0), ExactCoef.scalar(spec, 1)])

    @classmethod
    def from_int(cls, spec: FieldSpec, n: int) -> "TPoly":
        return cls(spec, [ExactCoef.scalar(spec, n)])

    def zero_like(self) -> "TPoly":
        return TPoly(self.spec, [])

    def one_like(self) -> "TPoly":
        return TPoly.from_int(self.spec, 1)

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, i: int) -> ExactCoef:
        return self.c[i] if 0 <= i < len(self.c) else ExactCoef.scalar(self.spec, 0)

    def _coerce(self, other):
        if isinstance(other, TPoly):
            return other
        if isinstance(other, ExactCoef):
            return TPoly.const(other)
        if isinstance(other, (int, np.integer)):
            return TPoly.from_int(self.spec, int(other))
        return NotImplemented

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self) -> str:
        return f"TPoly({list(self.c)})"

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.c), len(other.c))
        return TPoly(self.spec, [self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return TPoly(self.spec, [-x for x in self.c])

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
        if self.is_zero() or other.is_zero():
            return self.zero_like()
        out = [ExactCoef.scalar(self.spec, 0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a.is_zero():
                continue
            for j, b in enumerate(other.c):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return TPoly(self.spec, out)

    __rmul__ = __mul__

    def __truediv__(self, other: ExactCoef):
        if isinstance(other, TPoly):
            if other.deg > 0:
                raise ValueError("TPoly division by a non-constant")
            other = other.c[0]
        inv = other.inv()
        return TPoly(self.spec, [x * inv for x in self.c])

    def twist(self, n: int) -> "TPoly":
        return TPoly(self.spec, [x.twist(n) for x in self.c])

    def hyperderiv(self, j: int) -> "TPoly":
        p = self.spec.p
        return TPoly(self.spec, [self.c[i + j] * binom_mod_p(i + j, j, p) for i in range(len(self.c) - j)])

    hyperderiv_t = hyperderiv

    def theta_free(self) -> bool:
        """True when every coefficient is a constant of F_{q^m}."""
        return all(x.is_const() for x in self.c)

    def evaluate_const(self, z, F2=None, embed=None):
        """Evaluate a theta-free TPoly at a field element z (optionally after embedding)."""
        if not self.theta_free():
            raise ValueError("evaluation of a theta-dependent t-polynomial")
        F = self.spec.field if F2 is None else F2
        acc = F.zero()
        for x in reversed(self.c):
            v = x.const_value()
            if embed is not None:
                v = embed(v)
            acc = F.add(F.mul(acc, z), v)
        return acc
