"""Dual t-motive matrices, Anderson generating functions and rigid trivializations.

Index conventions (1-based, as displayed in reports):

* ``Phi[i][i+1] = 1`` for i < r; the last row is
  ``((t - theta)/k_r^(-r), -k_1^(-1)/k_r^(-r), ..., -k_{r-1}^(-r+1)/k_r^(-r))``.
* ``Upsilon[i][j] = f_i^(j-1)`` for the generating function f_i of the i-th period.
* ``V[i][j] = k_{i+j-1}^(-(j-1))`` when i+j-1 <= r, else 0.
* ``Psi = V^-1 (Upsilon^(1))^-1`` and ``Psi^-1 = Upsilon^(1) V``.
* Prolonged objects use the basis order (D_n, ..., D_0); the d-matrix of X has
  block (i, i+k) equal to the k-th t-hyperderivative of X.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .drinfeld import NEG_INF, DrinfeldModule, carlitz_period, eval_entire
from .errors import MismatchBeyondPrecision, PrecisionExhausted, PrecisionLoss
from .ffbase import ExactCoef, TPoly
from .linalg import adjugate, det, field_inverse, is_exact_zero, matmul, matsub
from .report import Report
from .series import INF, DMatrix, RamSeries, TatePoly, build_dmatrix, exact_to_series

# ---------------------------------------------------------------- base matrices


def phi_rho(rho: DrinfeldModule) -> list[list[TPoly]]:
    """Matrix of sigma on the basis 1, sigma, ..., sigma^(r-1)."""
    spec, r = rho.spec, rho.r
    zero, one = TPoly(spec, []), TPoly.from_int(spec, 1)
    kr = rho.kappa_twist(r, -r)
    M = [[zero] * r for _ in range(r)]
    for i in range(r - 1):
        M[i][i + 1] = one
    M[r - 1][0] = (TPoly.t(spec) - TPoly.const(rho.theta())) / kr
    for j in range(1, r):
        M[r - 1][j] = TPoly.const(-(rho.kappa_twist(j, -j) / kr))
    return M


def v_matrix(rho: DrinfeldModule) -> list[list[ExactCoef]]:
    r = rho.r
    zero = ExactCoef.scalar(rho.spec, 0)
    return [[rho.kappa_twist(i + j + 1, -j) if i + j + 1 <= r else zero for j in range(r)] for i in range(r)]


def det_phi_expected(rho: DrinfeldModule) -> TPoly:
    """(-1)^(r-1) (t - theta)/k_r^(-r)."""
    spec, r = rho.spec, rho.r
    val = (TPoly.t(spec) - TPoly.const(rho.theta())) / rho.kappa_twist(r, -r)
    return val if r % 2 else -val


# ---------------------------------------------------------------- generating functions


def _isometric_tail(rho: DrinfeldModule, du: Fraction, m0: int, horizon: int = 12) -> bool:
    """Whether deg Exp(u/theta^(m+1)) = deg u - m - 1 for all m >= m0.

    Each term alpha_h z^(q^h) must sit strictly below z; the condition only
    improves as m grows, so checking m0 suffices.  Terms past the horizon are
    covered by the recursive coefficient bounds.
    """
    E = rho.exp_series(4)
    dz = du - m0 - 1
    bounds = E._bounds(horizon)
    return all(b == NEG_INF or b + (rho.q**h - 1) * dz < 0 for h, b in enumerate(bounds) if h >= 1)


def agf(rho: DrinfeldModule, u: RamSeries, N_t: int, prec: int) -> TatePoly:
    """f_u(t) = sum_m Exp(u / theta^(m+1)) t^m, truncated at t^N_t.

    Carries the majorant deg(coefficient m) <= beta - m when the tail is in the
    isometric range of the exponential.
    """
    F, e = u.F, u.e
    if u.is_exact_zero():
        return TatePoly.zero(F, e).truncate_t(N_t)
    E = rho.exp_series(4)
    coeffs = []
    for m in range(N_t + 1):
        z = u.shift(-e * (m + 1))
        coeffs.append(eval_entire(E, z, prec))
    du = Fraction(u.deg_bound(), e)
    decay = None
    if _isometric_tail(rho, du, N_t + 1):
        beta = du - 1
        for m, c in enumerate(coeffs):
            beta = max(beta, Fraction(c.deg_bound(), c.e) + m)
        decay = (beta, Fraction(1))
    return TatePoly.from_series(coeffs, exact_t=False, decay=decay)


def upsilon(fs: list[TatePoly], r: int) -> list[list[TatePoly]]:
    return [[f.twist(j) for j in range(r)] for f in fs]


def default_periods(rho: DrinfeldModule, prec: int) -> list[RamSeries]:
    """A-basis of the period lattice of rho_t = theta + tau^r.

    The lattice is F_{q^r}[theta] * pi for the Carlitz period pi of F_{q^r};
    the basis is 1, c, ..., c^(r-1) times pi with c generating F_{q^r}^x.
    """
    if not rho.is_carlitz_power():
        raise ValueError("automatic periods only exist for rho_t = theta + tau^r")
    F, r, q = rho.F, rho.r, rho.q
    if rho.spec.m % r:
        raise ValueError(f"F_(q^{r}) is not inside the constant field; use m divisible by {r}")
    pi = carlitz_period(rho.spec, prec, r)
    c = F.vec(F.exp_table[(F.size - 1) // (q**r - 1) % (F.size - 1)])
    out, b = [], F.one()
    for _ in range(r):
        out.append(pi.scale(b))
        b = F.mul(b, c)
    return out


# ---------------------------------------------------------------- trivializations


def residual_summary(entries) -> dict:
    """Largest theta-degree of any surviving residual term and the certified bound."""
    worst = None
    cert = INF
    for x in entries:
        if isinstance(x, (TPoly, ExactCoef)):
            if not x.is_zero():
                worst = Fraction(10**9) if worst is None else worst
            continue
        if not x.is_zero():
            d = Fraction(x.top, x.e)
            worst = d if worst is None or d > worst else worst
        if x.prec != INF:
            cert = min(cert, Fraction(x.prec, x.e))
    return {"max_degree": worst, "certified_valuation": cert, "vanishes": worst is None}


@dataclass
class MotiveMatrices:
    rho: DrinfeldModule
    us: list
    n: int
    t_deg: int
    prec: int
    Phi: DMatrix
    Psi: DMatrix
    Psi_inv: DMatrix
    Upsilon: list = field(default_factory=list)
    V: list = field(default_factory=list)
    agfs: list = field(default_factory=list)
    _residual: DMatrix | None = None

    @property
    def r(self) -> int:
        return self.rho.r

    def residual(self) -> DMatrix:
        """Psi^(-1) - Phi Psi at this prolongation level."""
        if self._residual is None:
            lhs = self.Psi.twist(-1, ramify=True)
            self._residual = lhs - (self.Phi @ self.Psi)
        return self._residual

    def inverse_check(self) -> DMatrix:
        """d[Psi^-1] d[Psi] - identity."""
        prod = self.Psi_inv @ self.Psi
        out = []
        for k, blk in enumerate(prod.blocks):
            rows = []
            for i, row in enumerate(blk):
                rows.append([x - 1 if (k == 0 and i == j) else x for j, x in enumerate(row)])
            out.append(rows)
        return DMatrix(out)

    def report(self) -> Report:
        rep = Report(f"Psi[{self.rho.name or 'rho'}] level n={self.n}", self.t_deg, self.prec)
        res = residual_summary(self.residual().entries())
        rep.residual_max_valuation = None if res["vanishes"] else -res["max_degree"]
        rep.add(
            "frobenius_residual",
            res["vanishes"],
            f"Psi^(-1) - Phi Psi vanishes to valuation {res['certified_valuation']}",
        )
        rep.add("det_phi", det(self.Phi.base) == det_phi_expected(self.rho), "det Phi = (-1)^(r-1) (t - theta)/k_r^(-r)")
        inv = residual_summary(self.inverse_check().entries())
        rep.add("inverse_identity", inv["vanishes"], f"d[Psi^-1] d[Psi] = 1 to valuation {inv['certified_valuation']}")
        rep.extra["certified_valuation"] = res["certified_valuation"]
        return rep


def psi_rho(rho: DrinfeldModule, us: list[RamSeries], N_t: int, prec: int) -> MotiveMatrices:
    r = rho.r
    if len(us) != r:
        raise ValueError(f"need {r} periods, got {len(us)}")
    fs = [agf(rho, u, N_t, prec) for u in us]
    Ups = upsilon(fs, r)
    Ups1 = [[x.twist(1) for x in row] for row in Ups]
    V = v_matrix(rho)
    Vinv = field_inverse(V)
    d = det(Ups1)
    if d.is_zero() or d.coeff(0).is_zero():
        raise PrecisionLoss("det Upsilon^(1) is not a unit at the working precision")
    dinv = d.inv()
    adj = adjugate(Ups1)
    U1inv = [[a * dinv for a in row] for row in adj]
    Psi = matmul(Vinv, U1inv)
    Psi_inv = matmul(Ups1, V)
    Phi = phi_rho(rho)
    return MotiveMatrices(
        rho, list(us), 0, N_t, prec,
        DMatrix([Phi]), DMatrix([Psi]), DMatrix([Psi_inv]),
        Ups, V, fs,
    )


def prolong(x, n: int):
    """d_{t,n+1}[.] of a matrix, a DMatrix base, or a MotiveMatrices bundle."""
    if isinstance(x, MotiveMatrices):
        return MotiveMatrices(
            x.rho, x.us, n, x.t_deg, x.prec,
            build_dmatrix(x.Phi.base, n + 1),
            build_dmatrix(x.Psi.base, n + 1),
            build_dmatrix(x.Psi_inv.base, n + 1),
            x.Upsilon, x.V, x.agfs,
        )
    if isinstance(x, DMatrix):
        return build_dmatrix(x.base, n + 1)
    return build_dmatrix(x, n + 1)


def prolong_projection(x, ell: int, r: int | None = None):
    """pr: D_i m -> D_{i-ell-1} m, keeping the leading n - ell blocks."""
    if isinstance(x, MotiveMatrices):
        if not 0 <= ell < x.n:
            raise ValueError("ell must lie in 0..n-1")
        m = x.n - ell - 1
        return MotiveMatrices(
            x.rho, x.us, m, x.t_deg, x.prec,
            x.Phi.truncate(m + 1), x.Psi.truncate(m + 1), x.Psi_inv.truncate(m + 1),
            x.Upsilon, x.V, x.agfs,
        )
    if isinstance(x, DMatrix):
        if not 0 <= ell < x.n - 1:
            raise ValueError("ell must lie in 0..n-1")
        return x.truncate(x.n - ell - 1)
    if r is None:
        raise ValueError("block size r is required for plain matrices")
    levels = len(x) // r
    keep = r * (levels - ell - 1)
    if keep <= 0:
        raise ValueError("ell must lie in 0..n-1")
    return [row[:keep] for row in x[:keep]]


# ---------------------------------------------------------------- prolonged t-module


@dataclass
class ProlongedTModule:
    rho: DrinfeldModule
    n: int
    dphi_t: list
    tau_coeffs: list

    def dphi_t_inverse_power(self, k: int) -> list:
        inv = field_inverse(self.dphi_t)
        out = inv
        for _ in range(k - 1):
            out = matmul(out, inv)
        return out


def prolong_tmodule(rho: DrinfeldModule, n: int) -> ProlongedTModule:
    """t acts by theta*I - (subdiagonal ones) plus diag(k_i) tau^i."""
    spec = rho.spec
    zero = ExactCoef.scalar(spec, 0)
    th = rho.theta()
    size = n + 1
    dphi = [[th if i == j else (ExactCoef.scalar(spec, -1) if i == j + 1 else zero) for j in range(size)] for i in range(size)]
    taus = [[[k if i == j else zero for j in range(size)] for i in range(size)] for k in rho.kappa]
    return ProlongedTModule(rho, n, dphi, taus)


def exp_prolong(rho: DrinfeldModule, n: int, z: list[RamSeries], prec=None) -> list[RamSeries]:
    if len(z) != n + 1:
        raise ValueError("vector length must be n+1")
    E = rho.exp_series(4)
    return [eval_entire(E, x, prec) if not x.is_exact_zero() else x for x in z]


@dataclass
class ProlongedAGF:
    closed_form: list
    direct: list
    agree: bool
    certified_valuation: object


def agf_prolong(rho: DrinfeldModule, u: RamSeries, j: int, n: int, N_t: int, prec: int) -> ProlongedAGF:
    """Generating function of the j-th coordinate vector times u on P_n rho, two ways."""
    if not 1 <= j <= n + 1:
        raise ValueError("j must lie in 1..n+1")
    F, e = u.F, u.e
    f = agf(rho, u, N_t + n, prec)
    closed = []
    for a in range(1, n + 2):
        if a < j:
            closed.append(TatePoly.zero(F, e).truncate_t(N_t))
        else:
            closed.append(f.hyperderiv_t(a - j).truncate_t(N_t))
    tm = prolong_tmodule(rho, n)
    inv = field_inverse(tm.dphi_t)
    E = rho.exp_series(4)
    power = inv
    cols = [[] for _ in range(n + 1)]
    for m in range(N_t + 1):
        for a in range(n + 1):
            c = power[a][j - 1]
            if c.is_zero():
                cols[a].append(RamSeries.zero(F, e))
            else:
                z = exact_to_series(c, e, INF) * u
                cols[a].append(eval_entire(E, z, prec))
        power = matmul(power, inv)
    direct = [TatePoly.from_series(col) for col in cols]
    ok = True
    cert = INF
    for x, y in zip(closed, direct):
        d = x - y
        ok &= d.is_zero()
        if d.prec != INF:
            cert = min(cert, Fraction(d.prec, d.e))
    if not ok:
        raise MismatchBeyondPrecision("prolonged generating function: routes disagree")
    return ProlongedAGF(closed, direct, ok, cert)


# ---------------------------------------------------------------- quasi-logarithms


def _tdeg_for(rho: DrinfeldModule, u: RamSeries, prec: int) -> int:
    q = rho.q
    du = max(Fraction(u.deg_bound(), u.e), Fraction(0))
    return max(4, math.ceil((q * du + Fraction(prec, u.e)) / (q - 1)) + 2)


@dataclass
class QuasiLog:
    value: RamSeries
    via_agf: RamSeries
    via_series: RamSeries
    expected: RamSeries
    certified_prec: int


def quasi_log(rho: DrinfeldModule, u: RamSeries, alpha, prec: int, N_t: int | None = None) -> QuasiLog:
    """F_delta(u) for delta_t = rho_t - theta, via generating functions and via its series.

    Both must equal alpha - u to the certified precision.
    """
    F, e = u.F, u.e
    if isinstance(alpha, ExactCoef):
        alpha = exact_to_series(alpha, e, prec)
    if u.is_exact_zero():
        z = RamSeries.zero(F, e)
        if not alpha.is_zero():
            raise MismatchBeyondPrecision("Exp(0) = 0 but alpha is nonzero")
        return QuasiLog(z, z, z, z, INF)
    if N_t is None:
        N_t = _tdeg_for(rho, u, prec)
    f = agf(rho, u, N_t, prec + e * N_t)
    acc = None
    for i in range(1, rho.r + 1):
        k = rho.kappa_at(i)
        if k.is_zero():
            continue
        term = (f.twist(i) * k).eval_at_theta()
        acc = term if acc is None else acc + term
    via_agf = acc.with_prec(prec)
    via_series = eval_entire(rho.quasi_series(rho.inner_delta(), 4), u, prec)
    expected = (alpha - u).with_prec(prec)
    cert = min(via_agf.prec, via_series.prec, expected.prec)
    if not via_agf.agrees(via_series, cert):
        raise MismatchBeyondPrecision("quasi-logarithm routes disagree")
    if not via_agf.agrees(expected, cert):
        raise MismatchBeyondPrecision("quasi-logarithm differs from alpha - u; is Exp(u) = alpha?")
    return QuasiLog(via_agf.with_prec(cert), via_agf, via_series, expected, cert)


# ---------------------------------------------------------------- extension motives


def s_row(rho: DrinfeldModule, f: TatePoly) -> list[TatePoly]:
    """s_k = -sum_{i=k}^{r} k_i^(-(k-1)) f^(i-k+1), k = 1..r."""
    r = rho.r
    tw = {i: f.twist(i) for i in range(1, r + 1)}
    out = []
    for k in range(1, r + 1):
        acc = None
        for i in range(k, r + 1):
            kk = rho.kappa_twist(i, -(k - 1))
            if kk.is_zero():
                continue
            term = tw[i - k + 1] * kk
            acc = term if acc is None else acc + term
        out.append(-acc if acc is not None else TatePoly.zero(f.F, f.e).truncate_t(f.tdeg))
    return out


@dataclass
class ExtensionMotive:
    base: MotiveMatrices
    hs: list
    gs: list
    s_rows: list
    Phi_ext: list
    Psi_ext: list
    report: Report

    @property
    def size(self) -> int:
        return len(self.Phi_ext)


def _periods_or_default(rho, periods, prec):
    return periods if periods is not None else default_periods(rho, prec)


def n_motive(rho: DrinfeldModule, pairs, n: int, N_t: int, prec: int, periods=None, base: MotiveMatrices | None = None) -> ExtensionMotive:
    """Extension of 1 by (P_n M)^w from pairs (u_i, alpha_i) with Exp(u_i) = alpha_i."""
    r = rho.r
    if base is None:
        base = psi_rho(rho, _periods_or_default(rho, periods, prec), N_t + n, prec)
    level = prolong(base, n)
    PhiP, PsiP = level.Phi.full(), level.Psi.full()
    size = (n + 1) * r
    w = len(pairs)
    rep = Report(f"N_n[{rho.name or 'rho'}] n={n} w={w}", N_t, prec)
    hs, gs, srows = [], [], []
    F = rho.F
    e0 = None
    for idx, (u, alpha) in enumerate(pairs):
        e = u.e
        if isinstance(alpha, ExactCoef):
            alpha = exact_to_series(alpha, e, prec)
        f = agf(rho, u, N_t + n + 1, prec)
        s = s_row(rho, f)
        srows.append(s)
        g = []
        for d in range(n + 1):
            g.extend(x.hyperderiv_t(d).truncate_t(N_t) for x in s)
        h = [TatePoly.const(alpha)] + [TatePoly.zero(F, e)] * (size - 1)
        hs.append(h)
        gs.append(g)
        lhs = matmul([[x.twist(-1, ramify=True) for x in g]], PhiP)[0]
        diff = [a - b - c for a, b, c in zip(lhs, g, h)]
        summ = residual_summary(diff)
        rep.add(f"difference_equation[{idx + 1}]", summ["vanishes"], f"g^(-1) Phi - g - h vanishes to valuation {summ['certified_valuation']}")
        first = s[0].eval_at_theta()
        target = (u - alpha)
        cert = min(first.prec, target.prec)
        rep.add(f"s_alpha_first_entry[{idx + 1}]", first.agrees(target, cert), f"s_1(theta) = u - alpha to vt-precision {cert}")
    total = size * w + 1
    zt = TatePoly.zero(F, 1)
    Phi_ext = [[zt] * total for _ in range(total)]
    Psi_ext = [[zt] * total for _ in range(total)]
    for b in range(w):
        o = b * size
        for i in range(size):
            for j in range(size):
                Phi_ext[o + i][o + j] = PhiP[i][j]
                Psi_ext[o + i][o + j] = PsiP[i][j]
        gpsi = matmul([gs[b]], PsiP)[0]
        for j in range(size):
            Phi_ext[total - 1][o + j] = hs[b][j]
            Psi_ext[total - 1][o + j] = gpsi[j]
    Phi_ext[total - 1][total - 1] = TPoly.from_int(rho.spec, 1)
    Psi_ext[total - 1][total - 1] = TatePoly.const(RamSeries.const(F, 1))
    lhs = [[x.twist(-1, ramify=True) if isinstance(x, TatePoly) else x.twist(-1) for x in row] for row in Psi_ext]
    res = matsub(lhs, matmul(Phi_ext, Psi_ext))
    summ = residual_summary([x for row in res for x in row])
    rep.residual_max_valuation = None if summ["vanishes"] else -summ["max_degree"]
    rep.add("frobenius_residual", summ["vanishes"], f"Psi^(-1) - Phi Psi vanishes to valuation {summ['certified_valuation']}")
    rep.add("block_shape", _block_shape_ok(Phi_ext, size, w), "diagonal copies of Phi_{P_n rho}, h rows last")
    rep.extra["certified_valuation"] = summ["certified_valuation"]
    return ExtensionMotive(level, hs, gs, srows, Phi_ext, Psi_ext, rep)


def _block_shape_ok(M, size, w) -> bool:
    total = len(M)
    for i in range(total - 1):
        for j in range(total):
            same_block = i // size == j // size and j < total - 1
            if not same_block and not is_exact_zero(M[i][j]):
                return False
    return True


def y_alpha(rho: DrinfeldModule, u: RamSeries, alpha, n: int, N_t: int, prec: int, periods=None, base=None) -> ExtensionMotive:
    """The extension Y_{alpha,n}: the w = 1 case of n_motive."""
    out = n_motive(rho, [(u, alpha)], n, N_t, prec, periods, base)
    out.report.object = f"Y_alpha[{rho.name or 'rho'}] n={n}"
    return out


def ensure_vanishes(rep: Report) -> Report:
    if not rep.ok:
        bad = ", ".join(c.name for c in rep.checks if not c.passed)
        raise MismatchBeyondPrecision(f"{rep.object}: failed checks {bad}")
    return rep


__all__ = [
    "ExtensionMotive",
    "MotiveMatrices",
    "PrecisionExhausted",
    "agf",
    "agf_prolong",
    "default_periods",
    "det_phi_expected",
    "exp_prolong",
    "n_motive",
    "phi_rho",
    "prolong",
    "prolong_projection",
    "prolong_tmodule",
    "psi_rho",
    "quasi_log",
    "residual_summary",
    "s_row",
    "upsilon",
    "v_matrix",
    "y_alpha",
]
