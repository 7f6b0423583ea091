import numpy as np
import pytest

from conftest import make_module
from tmotive_lab.drinfeld import log_of
from tmotive_lab.errors import MismatchBeyondPrecision
from tmotive_lab.ffbase import ExactCoef, TPoly
from tmotive_lab.linalg import det
from tmotive_lab.motive import (
    agf,
    agf_prolong,
    default_periods,
    det_phi_expected,
    n_motive,
    phi_rho,
    prolong,
    prolong_projection,
    quasi_log,
    v_matrix,
    y_alpha,
)
from tmotive_lab.series import RamSeries, TatePoly


def t_minus_theta(spec):
    return TPoly.t(spec) - TPoly.const(ExactCoef.theta(spec))


class TestBaseMatrices:
    def test_phi_examples(self, carlitz3, cm4):
        P = phi_rho(carlitz3)
        assert len(P) == 1 and P[0][0] == t_minus_theta(carlitz3.spec)
        P = phi_rho(cm4)
        spec = cm4.spec
        assert P[0][0].is_zero() and P[1][1].is_zero()
        assert P[0][1] == TPoly.from_int(spec, 1)
        assert P[1][0] == t_minus_theta(spec)

    @pytest.mark.parametrize("kappa,m", [((1,), 1), ((0, 1), 2), ((1, 1), 2), ((1, 0, 1), 3), ((1, 1, 1), 3)])
    def test_det_phi(self, kappa, m):
        rho = make_module(2, m, kappa)
        assert det(phi_rho(rho)) == det_phi_expected(rho)

    def test_v_matrix_is_anti_triangular(self):
        rho = make_module(2, 2, (1, 1))
        V = v_matrix(rho)
        assert V[1][1].is_zero()
        assert V[0][1] == rho.kappa_twist(2, -1) and V[1][0] == rho.kappa[1]


class TestGeneratingFunctions:
    def test_zero(self, carlitz3):
        assert agf(carlitz3, RamSeries.zero(carlitz3.F), 4, 20).is_zero()

    @pytest.mark.parametrize("name", ["carlitz3", "cm4"])
    def test_functional_identity(self, name, request):
        # theta f_m + sum k_i f_m^(i) equals f_(m-1), and Exp(u) for m = 0
        rho = request.getfixturevalue(name)
        F = rho.F
        u = RamSeries.from_terms(F, 1, {1: F.gen(), 0: 1}, prec=30)
        N = 6
        f = agf(rho, u, N, 30)
        exp_u = rho.exp_series(4)(u, 30)
        for m in range(N + 1):
            fm = f.coeff(m)
            lhs = fm.shift(1)
            for i in range(1, rho.r + 1):
                k = rho.kappa_at(i)
                if not k.is_zero():
                    lhs = lhs + fm.twist(i) * k
            rhs = exp_u if m == 0 else f.coeff(m - 1)
            assert lhs.agrees(rhs, 25)

    def test_period_residue(self, carlitz3):
        pi = default_periods(carlitz3, 40)[0]
        f = agf(carlitz3, pi, 16, 40)
        assert f.decay is not None
        assert f.twist(1).eval_at_theta().agrees(-pi, 10)

    def test_cm_period_identity(self, cm4):
        # sum k_i f^(i)(theta) = -u reduces to f^(2)(theta) = -lambda
        for lam in default_periods(cm4, 40):
            f = agf(cm4, lam, 16, 40)
            assert f.twist(2).eval_at_theta().agrees(-lam, 8)


class TestTrivialization:
    @pytest.mark.parametrize("name", ["psi_carlitz3", "psi_cm4"])
    def test_residual_vanishes(self, name, request):
        psi = request.getfixturevalue(name)
        rep = psi.report()
        assert rep.ok, rep.to_json()
        assert rep.extra["certified_valuation"] >= 10

    @pytest.mark.parametrize("name", ["psi_carlitz3", "psi_cm4"])
    @pytest.mark.parametrize("n", [1, 2])
    def test_prolonged_residual(self, name, n, request):
        level = prolong(request.getfixturevalue(name), n)
        assert level.n == n and level.Psi.n == n + 1
        assert level.report().ok

    def test_projection(self, psi_cm4):
        top = prolong(psi_cm4, 3)
        low = prolong_projection(top, 1)
        assert low.n == 1
        ref = prolong(psi_cm4, 1)
        for a, b in zip(low.Psi.entries(), ref.Psi.entries()):
            assert (a - b).is_zero()
        # pr_a after pr_b is pr_(a+b+1)
        twice = prolong_projection(prolong_projection(top, 0), 0)
        once = prolong_projection(top, 1)
        assert twice.n == once.n
        with pytest.raises(ValueError):
            prolong_projection(top, 3)

    def test_projection_of_plain_matrix(self, psi_carlitz3):
        full = prolong(psi_carlitz3.Psi, 2).full()
        small = prolong_projection(full, 0, r=1)
        assert len(small) == 2 and len(small[0]) == 2


class TestProlongedGeneratingFunctions:
    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_two_routes_agree(self, carlitz3, n):
        u = RamSeries.from_terms(carlitz3.F, 1, {0: 1, -2: carlitz3.F.gen()}, prec=24)
        for j in range(1, n + 2):
            out = agf_prolong(carlitz3, u, j, n, 5, 24)
            assert out.agree
            assert out.certified_valuation >= 10

    def test_bad_index(self, carlitz3):
        with pytest.raises(ValueError):
            agf_prolong(carlitz3, RamSeries.const(carlitz3.F, 1, prec=10), 3, 1, 4, 10)


class TestQuasiLog:
    def test_zero(self, carlitz3):
        out = quasi_log(carlitz3, RamSeries.zero(carlitz3.F), RamSeries.zero(carlitz3.F), 20)
        assert out.value.is_zero()

    def test_log_one(self, carlitz3):
        u = log_of(carlitz3, RamSeries.const(carlitz3.F, 1, prec=40), 40)
        out = quasi_log(carlitz3, u, ExactCoef.scalar(carlitz3.spec, 1), 30)
        assert out.certified_prec >= 30

    @pytest.mark.parametrize("seed", range(4))
    def test_random_argument(self, cm4, seed):
        rng = np.random.default_rng(seed)
        F = cm4.F
        u = RamSeries(F, 1, 0, F.random(rng, (6,)), 30)
        alpha = cm4.exp_series(4)(u, 30)
        out = quasi_log(cm4, u, alpha, 24)
        assert out.via_agf.agrees(out.via_series, 24)

    def test_wrong_alpha_detected(self, carlitz3):
        u = RamSeries.const(carlitz3.F, 1, prec=30)
        with pytest.raises(MismatchBeyondPrecision):
            quasi_log(carlitz3, u, RamSeries.const(carlitz3.F, 2, prec=30), 20)


class TestExtensions:
    def test_y_alpha(self, carlitz3, psi_carlitz3):
        u = log_of(carlitz3, RamSeries.const(carlitz3.F, 1, prec=40), 40)
        ext = y_alpha(carlitz3, u, ExactCoef.scalar(carlitz3.spec, 1), 1, 8, 30, base=psi_carlitz3)
        assert ext.report.ok, ext.report.to_json()
        assert ext.size == 3

    def test_two_pairs(self, cm4, psi_cm4):
        F = cm4.F
        pairs = []
        for v in (1, F.gen()):
            alpha = RamSeries.const(F, v, prec=40)
            pairs.append((log_of(cm4, alpha, 40), alpha))
        ext = n_motive(cm4, pairs, 1, 8, 30, base=psi_cm4)
        assert ext.report.ok, ext.report.to_json()
        assert ext.size == 2 * 4 + 1
        assert isinstance(ext.Psi_ext[-1][-1], TatePoly)
