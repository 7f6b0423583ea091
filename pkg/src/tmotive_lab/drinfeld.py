"""Drinfeld F_q[t]-modules: exponential, logarithm and quasi-periodic series.

Series coefficients are exact (``ExactCoef``).  Evaluation at a ``RamSeries``
argument is certified by degree bounds: a window of three consecutive nonzero
terms must fall strictly below the cutoff, and a recursive bound on the
coefficients beyond the computed range must stay below it too.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction


from .errors import ConvergenceNotCertified
from .ffbase import GF, ExactCoef, FieldSpec
from .series import INF, RamSeries, exact_to_series
from .twisted import TwistedPoly

NEG_INF = float("-inf")


@dataclass(frozen=True, eq=False)
class DrinfeldModule:
    """rho_t = theta + kappa_1 tau + ... + kappa_r tau^r over F_{q^m}(w)."""

    spec: FieldSpec
    kappa: tuple
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def __post_init__(self):
        if not self.kappa or self.kappa[-1].is_zero():
            raise ValueError("leading coefficient kappa_r must be nonzero")
        for k in self.kappa:
            if not isinstance(k, ExactCoef) or k.spec != self.spec:
                raise ValueError("kappa entries must be ExactCoef over the module's field spec")

    @property
    def r(self) -> int:
        return len(self.kappa)

    @property
    def F(self) -> GF:
        return self.spec.field

    @property
    def q(self) -> int:
        return self.spec.q

    def theta(self) -> ExactCoef:
        return ExactCoef.theta(self.spec)

    def rho_t(self) -> TwistedPoly:
        return TwistedPoly([self.theta(), *self.kappa])

    def kappa_at(self, i: int) -> ExactCoef:
        """kappa_i for 1 <= i <= r, zero outside."""
        if 1 <= i <= self.r:
            return self.kappa[i - 1]
        return ExactCoef.scalar(self.spec, 0)

    def kappa_twist(self, i: int, n: int) -> ExactCoef:
        key = ("kt", i, n)
        with self._lock:
            if key not in self._cache:
                self._cache[key] = self.kappa_at(i).twist(n)
            return self._cache[key]

    def is_carlitz_power(self) -> bool:
        """True for rho_t = theta + tau^r."""
        one = ExactCoef.scalar(self.spec, 1)
        return self.kappa[-1] == one and all(k.is_zero() for k in self.kappa[:-1])

    # series
    def exp_series(self, H: int) -> "EntireSeries":
        return EntireSeries("exp", tuple(self._coeffs("exp", H)), self.q, self)

    def log_series(self, H: int) -> "EntireSeries":
        return EntireSeries("log", tuple(self._coeffs("log", H)), self.q, self)

    def quasi_series(self, delta, H: int) -> "EntireSeries":
        """Quasi-periodic series of the biderivation with delta_t = sum d_i tau^i (d_0 = 0)."""
        delta = tuple(_normalize_delta(self, delta))
        return EntireSeries("quasi", tuple(self._coeffs(("quasi", delta), H)), self.q, self, delta)

    def inner_delta(self) -> tuple:
        """Coefficients of rho_t - theta."""
        return (ExactCoef.scalar(self.spec, 0), *self.kappa)

    def _coeffs(self, kind, H: int) -> list:
        key = ("series", kind)
        with self._lock:
            lst = self._cache.setdefault(key, [])
            while len(lst) <= H:
                lst.append(self._next_coeff(kind, len(lst), lst))
            return lst[: H + 1]

    def _next_coeff(self, kind, h: int, prev: list) -> ExactCoef:
        spec = self.spec
        th = self.theta()
        if kind in ("exp", "log") and h == 0:
            return ExactCoef.scalar(spec, 1)
        if kind == "exp":
            acc = ExactCoef.scalar(spec, 0)
            for i in range(1, min(h, self.r) + 1):
                k = self.kappa_at(i)
                if not k.is_zero() and not prev[h - i].is_zero():
                    acc = acc + k * prev[h - i].twist(i)
            return acc / (th.twist(h) - th)
        if kind == "log":
            acc = ExactCoef.scalar(spec, 0)
            for i in range(1, min(h, self.r) + 1):
                k = self.kappa_at(i)
                if not k.is_zero() and not prev[h - i].is_zero():
                    acc = acc + self.kappa_twist(i, h - i) * prev[h - i]
            return acc / (th - th.twist(h))
        _, delta = kind
        if h == 0:
            return ExactCoef.scalar(spec, 0)
        alphas = self._coeffs("exp", h)
        acc = ExactCoef.scalar(spec, 0)
        for j in range(1, min(h, len(delta) - 1) + 1):
            d = delta[j]
            if not d.is_zero() and not alphas[h - j].is_zero():
                acc = acc + d * alphas[h - j].twist(j)
        return acc / (th.twist(h) - th)


def _normalize_delta(rho: DrinfeldModule, delta) -> list:
    if isinstance(delta, TwistedPoly):
        delta = list(delta.c)
    delta = list(delta)
    if delta and not delta[0].is_zero():
        raise ValueError("a biderivation value must have no tau^0 term")
    if not delta:
        delta = [ExactCoef.scalar(rho.spec, 0)]
    while len(delta) > 1 and delta[-1].is_zero():
        delta.pop()
    return delta


def _deg(x: ExactCoef):
    return NEG_INF if x.is_zero() else x.degree()


@dataclass(frozen=True, eq=False)
class EntireSeries:
    """sum_h c_h z^(q^h) with exact coefficients c_0..c_H."""

    kind: str
    coeffs: tuple
    q: int
    module: DrinfeldModule | None = None
    delta: tuple | None = None

    @property
    def H(self) -> int:
        return len(self.coeffs) - 1

    def degrees(self) -> list:
        return [_deg(c) for c in self.coeffs]

    def extended(self, H: int) -> "EntireSeries":
        if self.module is None:
            raise ConvergenceNotCertified("series cannot be extended")
        if self.kind == "exp":
            return self.module.exp_series(H)
        if self.kind == "log":
            return self.module.log_series(H)
        return self.module.quasi_series(self.delta, H)

    def deg_bound(self, h: int):
        """Upper bound for deg c_h (theta units); exact for h <= H."""
        return self._bounds(h)[h]

    def _bounds(self, h: int) -> list:
        degs = self.degrees()
        if h < len(degs) or self.module is None:
            return degs
        rho, q = self.module, self.q
        kd = [None] + [_deg(k) for k in rho.kappa]
        if self.kind == "quasi":
            exp_b = rho.exp_series(self.H)._bounds(h)
            dd = [_deg(d) for d in self.delta]
        for n in range(len(degs), h + 1):
            best = NEG_INF
            if self.kind == "exp":
                for i in range(1, min(n, rho.r) + 1):
                    best = max(best, kd[i] + q**i * degs[n - i])
            elif self.kind == "log":
                for i in range(1, min(n, rho.r) + 1):
                    best = max(best, q ** (n - i) * kd[i] + degs[n - i])
            else:
                for j in range(1, min(n, len(dd) - 1) + 1):
                    best = max(best, dd[j] + q**j * exp_b[n - j])
            degs.append(best - q**n if best != NEG_INF else NEG_INF)
        return degs

    def __call__(self, u: RamSeries, prec_target=None) -> RamSeries:
        return eval_entire(self, u, prec_target)


def exp_coeffs(rho: DrinfeldModule, H: int) -> EntireSeries:
    return rho.exp_series(H)


def log_coeffs(rho: DrinfeldModule, H: int) -> EntireSeries:
    return rho.log_series(H)


def quasi_coeffs(rho: DrinfeldModule, j: int, H: int) -> EntireSeries:
    """Series of F_delta for the basis biderivation delta_t = tau^j."""
    if not 1 <= j:
        raise ValueError("j must be at least 1")
    spec = rho.spec
    delta = [ExactCoef.scalar(spec, 0)] * j + [ExactCoef.scalar(spec, 1)]
    return rho.quasi_series(delta, H)


MAX_TERMS = 24
# coefficient h has theta-degree about q^h; cap the exact arithmetic there
MAX_COEFF_DEGREE = 2**18


def term_limit(q: int, max_terms: int = MAX_TERMS) -> int:
    return min(max_terms, int(math.log(MAX_COEFF_DEGREE, q)))


def eval_entire(s: EntireSeries, u: RamSeries, prec_target=None, max_terms: int = MAX_TERMS) -> RamSeries:
    """sum_h c_h u^(q^h), certified to prec_target (default: u's precision)."""
    if u.is_exact_zero():
        return RamSeries.zero(u.F, u.e)
    target = u.prec if prec_target is None else prec_target
    if target == INF:
        raise ValueError("evaluation needs a finite target precision")
    target = int(target)
    e, q = u.e, s.q
    limit = term_limit(q, max_terms)
    du = Fraction(u.deg_bound(), e)
    cutoff = Fraction(-target, e)
    while True:
        degs = s.degrees()
        bounds = [d + q**h * du if d != NEG_INF else NEG_INF for h, d in enumerate(degs)]
        nz = [h for h, b in enumerate(bounds) if b != NEG_INF]
        ok = len(nz) >= 3
        if ok:
            w = [bounds[h] for h in nz[-3:]]
            ok = all(b <= cutoff for b in w) and w[0] > w[1] > w[2]
        if ok:
            ext = s._bounds(s.H + 3)
            ok = all(
                ext[h] == NEG_INF or ext[h] + q**h * du <= cutoff for h in range(s.H + 1, s.H + 4)
            )
        if ok:
            break
        tail = [b for b in bounds if b != NEG_INF][-3:]
        growing = len(tail) == 3 and tail[0] < tail[1] < tail[2] and tail[2] > cutoff
        if s.module is None or s.H + 2 > limit or growing:
            raise ConvergenceNotCertified(
                f"{s.kind} series terms do not fall below degree {cutoff} within {s.H + 1} terms"
            )
        s = s.extended(s.H + 2)
    out = None
    for h, c in enumerate(s.coeffs):
        if c.is_zero() or bounds[h] <= cutoff:
            continue
        dc = c.degree()
        need = math.ceil((target + dc * e) / q**h) + 1
        uh = u.with_prec(max(need, 1 - u.deg_bound())).twist(h)
        cprec = target + max(0, uh.deg_bound())
        cs = exact_to_series(c, e, cprec)
        term = cs * uh
        out = term if out is None else out + term
    if out is None:
        return RamSeries.zero(u.F, e, target)
    return out.with_prec(target * (out.e // e))


def log_of(rho: DrinfeldModule, alpha, prec: int, e: int = 1) -> RamSeries:
    """Log_rho(alpha) for alpha in the convergence disk."""
    if isinstance(alpha, ExactCoef):
        alpha = exact_to_series(alpha, e, prec)
    return eval_entire(rho.log_series(4), alpha, prec)


def carlitz_period(spec: FieldSpec, prec: int, power: int = 1) -> RamSeries:
    """Period of the Carlitz module for Q = q^power (i.e. of theta + tau^power).

    pi = (-theta)^(Q/(Q-1)) * prod_{i>=1} (1 - theta^(1-Q^i))^(-1), written in
    vt = theta^(1/(Q-1)).  The (Q-1)-th root of -1 is the smallest-code element
    zeta with zeta^(Q-1) = -1; a field without one raises ValueError.
    """
    F = spec.field
    Q = spec.q**power
    e = Q - 1
    zeta = F.root(F.const(-1), e)
    if zeta is None:
        raise ValueError(f"F_{F.size} has no {e}-th root of -1; enlarge m")
    top = e + 1
    relprec = prec + top
    acc = RamSeries.const(F, 1, e, prec=relprec)
    i = 1
    while e * (Q**i - 1) < relprec:
        step = e * (Q**i - 1)
        geo = RamSeries.from_terms(F, e, {-step * k: 1 for k in range(relprec // step + 1)}, prec=relprec)
        acc = acc * geo
        i += 1
    pi = acc.shift(top).scale(F.neg(zeta))
    return pi.with_prec(prec)


def carlitz_root(spec: FieldSpec, power: int = 1):
    """The normalising root of -1 used by carlitz_period."""
    F = spec.field
    return F.root(F.const(-1), spec.q**power - 1)


def verify_endo(b: TwistedPoly, rho: DrinfeldModule) -> bool:
    """True iff b * rho_t == rho_t * b exactly."""
    rt = rho.rho_t()
    return (b * rt) == (rt * b)
