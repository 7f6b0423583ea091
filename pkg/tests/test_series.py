import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_series, random_tate, tate_equal
from tmotive_lab.errors import DivisionByZeroWithinPrecision, NonTwistable, PrecisionExhausted
from tmotive_lab.ffbase import GF, ExactCoef, FieldSpec
from tmotive_lab.series import (
    RamSeries,
    TatePoly,
    build_dmatrix,
    dzeta,
    eval_at_theta,
    exact_to_series,
    xseries_mul,
)

F9 = GF(3, 1, 2)
F4 = GF(2, 1, 2)
seeds = st.integers(0, 2**32 - 1)


class TestRamSeries:
    def test_geometric_series(self):
        # 1 / (1 - 1/theta) = sum theta^-k
        F = GF(3)
        one = RamSeries.const(F, 1)
        x = one - RamSeries.monomial(F, -1)
        inv = x.inv(prec=10)
        assert inv.prec == 10
        assert inv.terms() == [(-k, 1) for k in range(10)]

    @settings(max_examples=50, deadline=None)
    @given(seeds)
    def test_inverse_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        x = random_series(F9, rng, prec=20)
        if x.is_zero():
            return
        y = x * x.inv()
        assert y.agrees(RamSeries.const(F9, 1))

    def test_zero_has_no_inverse(self):
        with pytest.raises(DivisionByZeroWithinPrecision):
            RamSeries.zero(F9, prec=4).inv()

    def test_precision_propagates(self):
        a = RamSeries.monomial(F9, 2, prec=5)
        b = RamSeries.monomial(F9, 1, prec=7)
        # a*b known down to theta^(3-5-... ) : min(7 - 2, 5 - 1) = 4
        assert (a * b).prec == 4
        assert (a + b).prec == 5

    def test_ramified_theta_derivative(self):
        # d/dtheta of theta^(1/2) is 1/2 theta^(-1/2) = 2 theta^(-1/2) over F_3
        F = GF(3)
        v = RamSeries.monomial(F, 1, e=2)
        assert v.hyperderiv_theta(1).terms() == [(-1, 2)]

    def test_theta_derivative_matches_exact(self):
        spec = FieldSpec(3, 1, 1, 1)
        th = ExactCoef.theta(spec)
        x = th * th * th + th * 2
        s = exact_to_series(x, 1, 30)
        assert s.hyperderiv_theta(1).terms() == [(0, 2)]

    def test_twist(self):
        x = RamSeries.from_terms(F9, 1, {2: F9.gen(), 0: 1})
        y = x.twist(1)
        assert y.terms() == [(6, int(F9.code(F9.frob(F9.gen(), 1)))), (0, 1)]
        assert y.twist(-1).agrees(x)
        with pytest.raises(NonTwistable):
            RamSeries.monomial(F9, 1).twist(-1)
        z = RamSeries.monomial(F9, 1).twist(-1, ramify=True)
        assert z.e == 3 and z.terms() == [(1, 1)]

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.integers(1, 2))
    def test_twist_is_a_ring_morphism(self, seed, n):
        rng = np.random.default_rng(seed)
        a, b = random_series(F4, rng), random_series(F4, rng)
        assert (a * b).twist(n).agrees(a.twist(n) * b.twist(n))
        assert (a + b).twist(n).agrees(a.twist(n) + b.twist(n))

    @settings(max_examples=50, deadline=None)
    @given(seeds)
    def test_text_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        x = random_series(F9, rng, e=2, prec=int(rng.integers(0, 10)))
        y = RamSeries.from_text(F9, x.to_text())
        assert y.to_text() == x.to_text()
        assert y.e == x.e and y.prec == x.prec

    def test_text_rejects_garbage(self):
        with pytest.raises(ValueError):
            RamSeries.from_text(F9, "e=1; m=3; terms=[]; prec=inf")
        with pytest.raises(ValueError):
            RamSeries.from_text(F9, "nonsense")
        with pytest.raises(ValueError):
            RamSeries.from_text(F9, "e=1; m=2; terms=[(0,9)]; prec=inf")

    def test_coeff_beyond_precision(self):
        x = RamSeries.monomial(F9, 0, prec=3)
        assert F9.code(x.coeff(-2)) == 0
        with pytest.raises(PrecisionExhausted):
            x.coeff(-3)


class TestTatePoly:
    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(1, 3))
    def test_twist_commutes_with_t_derivative(self, seed, j):
        rng = np.random.default_rng(seed)
        f = random_tate(F9, rng, tdeg=4)
        assert tate_equal(f.twist(1).hyperderiv_t(j), f.hyperderiv_t(j).twist(1))

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(0, 4))
    def test_t_leibniz(self, seed, j):
        rng = np.random.default_rng(seed)
        f, g = random_tate(F4, rng, 3), random_tate(F4, rng, 2)
        acc = f.zero_like()
        for i in range(j + 1):
            acc = acc + f.hyperderiv_t(i) * g.hyperderiv_t(j - i)
        assert tate_equal((f * g).hyperderiv_t(j), acc)

    def test_eval_at_theta_of_one_plus_t(self):
        f = TatePoly.t(F9) + 1
        assert f.eval_at_theta().terms() == [(1, 1), (0, 1)]

    def test_eval_needs_a_tail_bound(self):
        f = random_tate(F9, np.random.default_rng(0), 3).truncate_t(2)
        with pytest.raises(PrecisionExhausted):
            eval_at_theta(f)
        out = eval_at_theta(f, tail_bound=-3)
        assert out.prec == 3

    def test_series_inverse(self):
        # 1/(1 - t) truncated at t^6
        f = TatePoly.t(F9) * (-1) + 1
        g = TatePoly.from_series(f.coeffs() + [RamSeries.zero(F9)] * 5).inv()
        assert g.tdeg == 6
        assert all(c.agrees(RamSeries.const(F9, 1)) for c in g.coeffs())


class TestDzeta:
    def test_of_t(self):
        zeta = F9.gen()
        out = dzeta(TatePoly.t(F9), zeta, 4)
        assert np.array_equal(out[0].coeff(0), zeta)
        assert out[1].agrees(RamSeries.const(F9, 1))
        assert out[2].is_zero() and out[3].is_zero()

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_ring_morphism(self, seed):
        rng = np.random.default_rng(seed)
        f, g = random_tate(F9, rng, 3), random_tate(F9, rng, 4)
        zeta = F9.random(rng)
        N = 9
        fz, gz = dzeta(f, zeta, N), dzeta(g, zeta, N)
        for a, b in zip(dzeta(f * g, zeta, N), xseries_mul(fz, gz, N)):
            assert a.agrees(b)
        for a, b, c in zip(dzeta(f + g, zeta, N), fz, gz):
            assert a.agrees(b + c)


class TestDMatrix:
    @settings(max_examples=30, deadline=None)
    @given(seeds, st.integers(1, 4))
    def test_homomorphism(self, seed, n):
        rng = np.random.default_rng(seed)
        A = [[random_tate(F4, rng, 2) for _ in range(2)] for _ in range(2)]
        B = [[random_tate(F4, rng, 2) for _ in range(2)] for _ in range(2)]
        AB = [[A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)] for i in range(2)]
        lhs = build_dmatrix(AB, n)
        rhs = build_dmatrix(A, n) @ build_dmatrix(B, n)
        assert all(x.is_zero() for x in (lhs - rhs).entries())

    def test_full_shape(self):
        f = TatePoly.t(F4) * TatePoly.t(F4)
        full = build_dmatrix(f, 3).full()
        assert len(full) == 3 and len(full[0]) == 3
        # d^1 t^2 = 2t = 0 in characteristic 2, d^2 t^2 = 1
        assert full[0][1].is_zero()
        assert full[0][2].coeff(0).agrees(RamSeries.const(F4, 1))
        assert full[1][0].is_zero()
