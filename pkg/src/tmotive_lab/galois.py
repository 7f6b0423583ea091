"""Endomorphism matrices, Betti conjugation and the Galois-group dimension count.

Elements of F_q(t) are ``RatFunc`` objects over the module's constant field
F_{q^m} whose coefficients happen to lie in F_q.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .drinfeld import DrinfeldModule, verify_endo
from .errors import IntertwineFailed, NotRational, RankDefect
from .ffbase import GF, ExactCoef, Poly, RatFunc, TPoly
from .linalg import det, is_exact_zero, matmul, matsub
from .report import dumps
from .series import DMatrix, build_dmatrix
from .twisted import TwistedPoly

# largest auxiliary field used for resubstitution checks
AUX_FIELD_LIMIT = 2**20

# ---------------------------------------------------------------- endomorphisms


@dataclass
class EndoMatrix:
    H: list
    source: TwistedPoly
    rho: DrinfeldModule
    n: int = 0

    def prolong(self, n: int) -> DMatrix:
        return build_dmatrix(self.H, n + 1)


def _sigma_power_coords(rho: DrinfeldModule, Phi, upto: int) -> list:
    """Row vectors v_k with sigma^k = sum_l v_k[l] sigma^l, for k = 0..upto."""
    spec, r = rho.spec, rho.r
    zero, one = TPoly(spec, []), TPoly.from_int(spec, 1)
    vs = [[one if l == k else zero for l in range(r)] for k in range(min(r, upto + 1))]
    while len(vs) <= upto:
        prev = vs[-1]
        vs.append(matmul([[x.twist(-1) for x in prev]], Phi, zero)[0])
    return vs


def endo_matrix(b: TwistedPoly, rho: DrinfeldModule) -> EndoMatrix:
    """Matrix of m -> m b* on the basis 1, sigma, ..., sigma^(r-1)."""
    from .motive import phi_rho

    if not verify_endo(b, rho):
        raise IntertwineFailed("b does not commute with rho_t")
    spec, r = rho.spec, rho.r
    Phi = phi_rho(rho)
    vs = _sigma_power_coords(rho, Phi, r - 1 + b.deg)
    zero = TPoly(spec, [])
    H = []
    for i in range(r):
        row = [zero] * r
        for j, c in enumerate(b.c):
            if c.is_zero():
                continue
            coef = c.twist(-j - i)
            row = [a + TPoly.const(coef) * x for a, x in zip(row, vs[i + j])]
        H.append(row)
    ok = all((a - b_).is_zero() for a, b_ in zip(_flat(matmul(Phi, H, zero)), _flat(matmul([[x.twist(-1) for x in row] for row in H], Phi, zero))))
    if not ok:
        raise IntertwineFailed("Phi H != H^(-1) Phi")
    return EndoMatrix(H, b, rho)


def intertwines(E: EndoMatrix, n: int) -> bool:
    """d[Phi] d[H] = d[H]^(-1) d[Phi] at level n."""
    from .motive import phi_rho

    dP = build_dmatrix(phi_rho(E.rho), n + 1)
    dH = E.prolong(n)
    diff = (dP @ dH) - (dH.twist(-1) @ dP)
    return all(x.is_zero() for x in diff.entries())


def _flat(M):
    return [x for row in M for x in row]


# ---------------------------------------------------------------- F_q(t) helpers


def fqt_field(rho_or_F) -> GF:
    return rho_or_F.F if isinstance(rho_or_F, DrinfeldModule) else rho_or_F


def rational_reconstruct(F: GF, coeffs: list, bound: int | None = None) -> RatFunc:
    """P/Q with deg P, deg Q <= bound and Q(0) != 0 matching the power series mod t^(N+1).

    ``bound`` defaults to floor(N/2).  The answer is re-expanded and compared
    with every supplied coefficient before it is returned.
    """
    N = len(coeffs) - 1
    if bound is None:
        bound = N // 2
    f = Poly(F, np.asarray(coeffs, dtype=np.int64).reshape(-1, F.k)) if coeffs else Poly.zero(F)
    if f.is_zero():
        return RatFunc(Poly.zero(F))
    r0, r1 = Poly.monomial(F, N + 1), f
    v0, v1 = Poly.zero(F), Poly.const(F, F.one())
    while not r1.is_zero() and r1.deg > bound:
        qt, rem = r0.divmod(r1)
        r0, r1 = r1, rem
        v0, v1 = v1, v0 - qt * v1
    P, Q = r1, v1
    if Q.is_zero() or Q.deg > bound or F.is_zero(Q.c[0]):
        raise NotRational("no rational function of the allowed degree matches the series")
    # resubstitution: Q*f - P must vanish to order N+1
    chk = Q * f - P
    if not chk.is_zero() and np.any(chk.c[: N + 1] % F.p):
        raise NotRational("reconstructed fraction does not reproduce the series")
    return RatFunc(P, Q)


def _series_of(x: RatFunc, N: int) -> np.ndarray:
    """First N+1 power-series coefficients of a RatFunc with den(0) != 0."""
    F = x.F
    den = x.den.c
    num = x.num.c
    out = F.zero((N + 1,))
    d0inv = F.inv(den[0])
    for i in range(N + 1):
        acc = num[i] if i < len(num) else F.zero()
        for j in range(1, min(i, len(den) - 1) + 1):
            acc = F.sub(acc, F.mul(den[j], out[i - j]))
        out[i] = F.mul(acc, d0inv)
    return out


class FqEmbedding:
    """Embeds F_q from the constant field into an auxiliary field F_{q^d}."""

    def __init__(self, F: GF, degree: int = 8):
        q = F.q
        d = degree
        while d > 1 and q**d > AUX_FIELD_LIMIT:
            d -= 1
        self.degree = d
        self.src = F
        self.dst = GF(F.p, F.e * d, 1)
        g = F.fq_gen()
        self.src_log_step = (F.size - 1) // (q - 1)
        minpoly = self._minpoly(F, g)
        G = self.dst
        step = (G.size - 1) // (q - 1)
        self.image = None
        for k in range(1, q):
            if np.gcd(k, q - 1) != 1:
                continue
            y = G.vec(G.exp_table[(step * k) % (G.size - 1)])
            if not np.any(self._eval_fp_poly(minpoly, y)):
                self.image = y
                break
        if self.image is None:
            raise RuntimeError("no embedding of F_q found")

    @staticmethod
    def _minpoly(F: GF, g) -> list[int]:
        conj = [F.frob(g, i) for i in range(F.e)]
        poly = [F.one()]
        for c in conj:
            nxt = [F.zero() for _ in range(len(poly) + 1)]
            for i, a in enumerate(poly):
                nxt[i + 1] = F.add(nxt[i + 1], a)
                nxt[i] = F.sub(nxt[i], F.mul(a, c))
            poly = nxt
        ints = []
        for a in poly:
            match = [n for n in range(F.p) if np.array_equal(F.const(n), a)]
            if not match:
                raise RuntimeError("minimal polynomial not over F_p")
            ints.append(match[0])
        return ints

    def _eval_fp_poly(self, coeffs: list[int], y):
        G = self.dst
        acc = G.zero()
        for c in reversed(coeffs):
            acc = G.add(G.mul(acc, y), G.const(c))
        return acc

    def __call__(self, x):
        F, G = self.src, self.dst
        code = F.code(x)
        if code == 0:
            return G.zero()
        L = int(F.log_table[code])
        if L % self.src_log_step:
            raise NotRational("coefficient outside F_q")
        return G.power(self.image, L // self.src_log_step)

    def eval_poly(self, P: Poly, z):
        G = self.dst
        acc = G.zero()
        for c in reversed(list(P.c)):
            acc = G.add(G.mul(acc, z), self(c))
        return acc

    def eval_rat(self, x: RatFunc, z):
        G = self.dst
        d = self.eval_poly(x.den, z)
        if not np.any(d):
            return None
        return G.mul(self.eval_poly(x.num, z), G.inv(d))


def _trace(M):
    acc = M[0][0]
    for i in range(1, len(M)):
        acc = acc + M[i][i]
    return acc


# ---------------------------------------------------------------- Betti matrices


@dataclass
class BettiResult:
    matrix: list
    n: int
    t_deg: int
    reconstruction_ok: bool
    checks: dict = field(default_factory=dict)


def betti(E: EndoMatrix, Psi, n: int = 0, seed: int = 0) -> BettiResult:
    """h^B = d[Psi]^-1 d[H] d[Psi], reconstructed over F_q(t).

    ``Psi`` is a MotiveMatrices bundle at any level.  Each t-coefficient must be
    a certified constant of F_q.  The reconstruction is re-expanded against the
    series, and tr((h^B)^k) is compared with tr(H^k) for k = 1..size at three
    random points of an auxiliary field.
    """
    from .motive import prolong

    F = E.rho.F
    level = prolong(Psi, n)
    dH = E.prolong(n)
    conj = level.Psi_inv @ dH @ level.Psi
    full = conj.full()
    out = []
    for row in full:
        out_row = []
        for x in row:
            if x.prec != float("inf") and x.prec <= 0:
                raise NotRational("Betti entry has no certified constant term; raise prec")
            nz = np.flatnonzero(x.c.any(axis=(0, 2))) if x.c.size else np.array([], dtype=np.int64)
            if nz.size and any(x.top - int(k) != 0 for k in nz):
                raise NotRational("Betti entry depends on theta within precision")
            coeffs = [x.coeff(i).coeff(0) for i in range(x.tdeg + 1)]
            if not all(F.in_fq(c) for c in coeffs):
                raise NotRational("Betti entry has coefficients outside F_q")
            out_row.append(rational_reconstruct(F, coeffs))
        out.append(out_row)
    tdeg = min(x.tdeg for row in full for x in row)
    checks = {"reexpansion": True}
    checks["trace_powers"] = _trace_check(dH.full(), out, F, seed)
    if not checks["trace_powers"]:
        raise NotRational("traces of powers disagree with the endomorphism matrix")
    return BettiResult(out, n, tdeg, True, checks)


def _trace_check(Hfull, hB, F: GF, seed: int) -> bool:
    emb = FqEmbedding(F)
    G = emb.dst
    rng = np.random.default_rng(seed)
    size = len(hB)
    Hp, Bp = Hfull, hB
    for k in range(1, size + 1):
        if k > 1:
            Hp = matmul(Hp, Hfull)
            Bp = matmul(Bp, hB)
        tH, tB = _trace(Hp), _trace(Bp)
        if not tH.theta_free():
            return False
        done = 0
        tries = 0
        while done < 3:
            tries += 1
            if tries > 50:
                return False
            z = G.vec(int(rng.integers(1, G.size)))
            vB = emb.eval_rat(tB, z)
            if vB is None:
                continue
            vH = emb.eval_poly(Poly(F, np.asarray([c.const_value() for c in tH.c], dtype=np.int64).reshape(-1, F.k)) if tH.c else Poly.zero(F), z)
            if not np.array_equal(vB, vH):
                return False
            done += 1
    return True


# ---------------------------------------------------------------- linear systems over F_q(t)


def _lcm_poly(a: Poly, b: Poly) -> Poly:
    from .ffbase import poly_gcd

    return (a * b) // poly_gcd(a, b)


def bareiss_rank(rows: list[list[RatFunc]], F: GF) -> int:
    """Rank over F_q(t) by fraction-free elimination on cleared rows."""
    M = []
    for row in rows:
        den = Poly.const(F, F.one())
        for x in row:
            if not x.is_zero():
                den = _lcm_poly(den, x.den)
        prow = [(x.num * (den // x.den)) if not x.is_zero() else Poly.zero(F) for x in row]
        if any(not p.is_zero() for p in prow):
            M.append(prow)
    if not M:
        return 0
    ncols = len(M[0])
    rank = 0
    prev = Poly.const(F, F.one())
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if not M[i][c].is_zero()), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][c]
        for i in range(rank + 1, len(M)):
            a = M[i][c]
            M[i] = [(p * M[i][j] - a * M[rank][j]).exact_div(prev) for j in range(ncols)]
        prev = p
        rank += 1
        if rank == len(M):
            break
    return rank


@dataclass
class GaloisSystem:
    r: int
    n: int
    B: list
    rankB: int
    gens: list = field(default_factory=list)
    reconstruction_ok: bool = True
    prolonged_rank: int | None = None

    @property
    def F(self) -> GF:
        if self.B:
            return self.B[0][0].F
        return self.gens[0][0][0].F if self.gens else None

    @property
    def s(self) -> Fraction | None:
        free = self.r**2 - self.rankB
        return Fraction(self.r**2, free) if free else None

    @property
    def integral_s(self) -> bool:
        s = self.s
        return s is not None and s.denominator == 1

    @property
    def dim(self) -> int:
        return (self.n + 1) * (self.r**2 - self.rankB)

    def to_dict(self) -> dict:
        s = self.s
        return {
            "r": self.r,
            "n": self.n,
            "rankB": self.rankB,
            "dim": self.dim,
            "s": None if s is None else (int(s) if s.denominator == 1 else str(s)),
            "integral_s": self.integral_s,
            "reconstruction_ok": self.reconstruction_ok,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def centralizer_rows(gens: list, r: int, F: GF) -> list[list[RatFunc]]:
    """Rows of X g - g X = 0 in vec(X) (column-major) for each generator g."""
    zero = RatFunc(Poly.zero(F))
    rows = []
    for g in gens:
        for a in range(r):
            for b in range(r):
                row = [zero] * (r * r)
                for i in range(r):
                    for j in range(r):
                        v = zero
                        if a == i:
                            v = v + g[j][b]
                        if b == j:
                            v = v - g[a][i]
                        row[j * r + i] = v
                if any(not x.is_zero() for x in row):
                    rows.append(row)
    return rows


def centralizer_system(gens: list, r: int, F: GF | None = None) -> GaloisSystem:
    if F is None:
        if not gens:
            raise ValueError("field required when no generators are given")
        F = gens[0][0][0].F
    for g in gens:
        if len(g) != r or any(len(row) != r for row in g):
            raise ValueError("generators must be r x r")
    B = centralizer_rows(gens, r, F)
    rank = bareiss_rank(B, F) if B else 0
    return GaloisSystem(r, 0, B, rank, list(gens))


def prolonged_matrix(B: list, n: int) -> list:
    """d_{t,n+1}[B]: block (i, i+k) is the k-th t-hyperderivative of B."""
    if not B:
        return []
    return build_dmatrix(B, n + 1).full()


def prolong_system(sysm: GaloisSystem, n: int) -> GaloisSystem:
    dB = prolonged_matrix(sysm.B, n)
    F = sysm.F
    rank = bareiss_rank(dB, F) if dB else 0
    if rank != (n + 1) * sysm.rankB:
        raise RankDefect(f"rank d[B] = {rank}, expected {(n + 1) * sysm.rankB}")
    out = GaloisSystem(sysm.r, n, sysm.B, sysm.rankB, sysm.gens, sysm.reconstruction_ok, rank)
    return out


# ---------------------------------------------------------------- group element shape


def _is_zero_entry(x) -> bool:
    if isinstance(x, (int, np.integer, Fraction)):
        return x == 0
    if isinstance(x, np.ndarray):
        return not np.any(x)
    return x.is_zero()


def _equal(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(a, b)
    return _is_zero_entry(a - b)


def check_group_shape(M: list, r: int, n: int) -> bool:
    """Block upper-triangular, block-Toeplitz with invertible diagonal block."""
    size = r * (n + 1)
    if len(M) != size or any(len(row) != size for row in M):
        return False

    def blk(I, J):
        return [row[J * r : (J + 1) * r] for row in M[I * r : (I + 1) * r]]

    for I in range(n + 1):
        for J in range(n + 1):
            B = blk(I, J)
            if I > J:
                if not all(_is_zero_entry(x) for row in B for x in row):
                    return False
            else:
                ref = blk(0, J - I)
                if not all(_equal(x, y) for ra, rb in zip(B, ref) for x, y in zip(ra, rb)):
                    return False
    g0 = blk(0, 0)
    try:
        d = det(g0)
    except Exception:
        return False
    return not _is_zero_entry(d)


# ---------------------------------------------------------------- pipeline


def betti_generators(rho: DrinfeldModule, endos: list[TwistedPoly], Psi, seed: int = 0) -> tuple[list, bool]:
    """Base-level Betti matrices of the given endomorphisms (identity always included)."""
    F = rho.F
    one = RatFunc(Poly.const(F, F.one()))
    zero = RatFunc(Poly.zero(F))
    gens = [[[one if i == j else zero for j in range(rho.r)] for i in range(rho.r)]]
    for b in endos:
        E = endo_matrix(b, rho)
        gens.append(betti(E, Psi, 0, seed).matrix)
    return gens, True


def galois_dimension(rho: DrinfeldModule, endos: list[TwistedPoly], Psi, levels, seed: int = 0) -> list[GaloisSystem]:
    gens, ok = betti_generators(rho, endos, Psi, seed)
    base = centralizer_system(gens, rho.r, rho.F)
    base.reconstruction_ok = ok
    return [prolong_system(base, n) if n else base for n in levels]


def fqt_from_ints(F: GF, num: list[int], den: list[int] | None = None) -> RatFunc:
    """F_q(t) element from coefficient lists of F_q codes (low degree first)."""
    elts = F.fq_elements()
    codes = sorted(int(c) for c in F.code(elts))

    def poly(cs):
        if not cs:
            return Poly.zero(F)
        return Poly(F, np.stack([F.vec(codes[c % len(codes)]) if c else F.zero() for c in cs]))

    return RatFunc(poly(num), poly(den) if den else None)


__all__ = [
    "BettiResult",
    "EndoMatrix",
    "FqEmbedding",
    "GaloisSystem",
    "bareiss_rank",
    "betti",
    "centralizer_system",
    "check_group_shape",
    "endo_matrix",
    "galois_dimension",
    "intertwines",
    "prolong_system",
    "prolonged_matrix",
    "rational_reconstruct",
]
