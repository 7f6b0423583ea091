import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmotive_lab.diffalg import (
    Basis,
    DiffVar,
    LinDiffPoly,
    apply_partial,
    dB_system,
    eliminate,
    eliminate_from_B,
    elimination_key,
    generate_T,
    linear_ideal_contains,
    reduce,
    var_cmp,
    x_vars,
)
from tmotive_lab.ffbase import GF, Poly, RatFunc
from tmotive_lab.galois import centralizer_system, fqt_from_ints

F2 = GF(2)
F3 = GF(3)


def rf(F, num, den=None):
    return fqt_from_ints(F, num, den)


def one(F):
    return RatFunc(Poly.const(F, F.one()))


def tt(F):
    return RatFunc(Poly.monomial(F, 1))


class TestOrdering:
    def test_block_dominates(self):
        assert var_cmp(DiffVar(1, 1, 1, 0), DiffVar(0, 2, 2, 5)) == 1

    def test_derivative_order_within_block(self):
        assert var_cmp(DiffVar(0, 1, 1, 2), DiffVar(0, 2, 2, 1)) == 1

    def test_column_then_row(self):
        assert var_cmp(DiffVar(0, 1, 2), DiffVar(0, 2, 1)) == 1
        assert var_cmp(DiffVar(0, 2, 1), DiffVar(0, 1, 1)) == 1
        assert var_cmp(DiffVar(0, 1, 1), DiffVar(0, 1, 1)) == 0

    def test_elimination_order_puts_derivatives_first(self):
        assert elimination_key(DiffVar(0, 1, 1, 1)) > elimination_key(DiffVar(3, 2, 2, 0))

    def test_x_vars_column_major(self):
        assert [(v.i, v.j) for v in x_vars(2, 0)] == [(1, 1), (2, 1), (1, 2), (2, 2)]


class TestHyperderivative:
    def test_coefficient_leibniz(self):
        F = F3
        x = DiffVar(0, 1, 1)
        P = LinDiffPoly.var(F, x, tt(F))
        out = apply_partial(1, P)
        assert out == LinDiffPoly(F, {x: one(F), x.raised(1): tt(F)})

    def test_order_raising_binomial(self):
        F = F2
        x = DiffVar(0, 1, 1, 1)
        # d^1 d^1 X = C(2,1) d^2 X = 0 in characteristic 2
        assert apply_partial(1, LinDiffPoly.var(F, x)).is_zero()
        assert apply_partial(2, LinDiffPoly.var(F, x)) == LinDiffPoly.var(F, x.raised(2), RatFunc(Poly.const(F, F.const(3 % 2))))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(0, 2), min_size=1, max_size=4), st.integers(0, 3), st.integers(0, 3))
    def test_composition(self, num, a, b):
        F = F3
        P = LinDiffPoly(F, {DiffVar(0, 1, 1): rf(F, num), DiffVar(1, 1, 1, 1): tt(F)})
        lhs = apply_partial(a, apply_partial(b, P))
        from tmotive_lab.ffbase import binom_mod_p

        c = binom_mod_p(a + b, a, 3)
        rhs = apply_partial(a + b, P).scale(RatFunc(Poly.const(F, F.const(c))))
        assert lhs == rhs

    def test_constant_term(self):
        F = F3
        P = LinDiffPoly(F, {}, tt(F) * tt(F))
        assert apply_partial(1, P).constant == tt(F) * 2


class TestReduction:
    def test_basis_is_monic(self):
        F = F3
        v, w = DiffVar(0, 1, 1), DiffVar(0, 1, 2)
        B = Basis(F)
        assert B.add(LinDiffPoly(F, {v: tt(F), w: tt(F) * 2}))
        assert not B.add(LinDiffPoly(F, {v: one(F), w: one(F) * 2}))
        (row,) = list(B)
        assert row.terms[w] == one(F)

    def test_reduce_to_zero(self):
        F = F3
        v, w = DiffVar(0, 1, 1), DiffVar(0, 2, 1)
        G = [LinDiffPoly(F, {v: one(F), w: tt(F)})]
        P = LinDiffPoly(F, {v: tt(F), w: tt(F) * tt(F)})
        assert reduce(P, G).is_zero()

    def test_ideal_membership_needs_prolongation(self):
        F = F3
        a, b = DiffVar(0, 1, 1), DiffVar(0, 1, 2)
        S = [LinDiffPoly(F, {a: one(F), b: -tt(F)})]
        P = apply_partial(1, S[0])
        assert not linear_ideal_contains(P, S, 0)
        assert linear_ideal_contains(P, S, 1)
        with pytest.raises(ValueError):
            linear_ideal_contains(P, [LinDiffPoly(F, {a: one(F)}, one(F))], 1)


class TestElimination:
    def test_generator_count(self):
        F = F2
        B = [[one(F), rf(F, [0, 1]), rf(F, [0]), rf(F, [1])]]
        T = generate_T(B, 2, 2, 3, F)
        assert len(T) == (1 + 2 * 4) * 4
        with pytest.raises(ValueError):
            generate_T(B, 2, 2, 1, F)

    def test_dB_system_shape(self):
        F = F2
        B = [[one(F), tt(F), rf(F, [0]), rf(F, [1])]]
        rows = dB_system(B, 2, 1, F)
        assert len(rows) == 2
        assert all(v.l == 0 for P in rows for v in P.terms)

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_cm_system(self, n):
        F = F2
        t = tt(F)
        z = rf(F, [0])
        sysm = centralizer_system([[[one(F), z], [z, one(F)]], [[z, one(F)], [one(F), one(F)]]], 2, F)
        out = eliminate_from_B(sysm.B, 2, n, F)
        assert out.matches and out.rank == (n + 1) * sysm.rankB
        assert t is not None

    @settings(max_examples=10, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_random_B(self, r, seed):
        rng = np.random.default_rng(seed)
        F = F3
        rows = int(rng.integers(1, r * r + 1))
        B = [[rf(F, rng.integers(0, 3, 3).tolist(), [1, int(rng.integers(0, 3))]) for _ in range(r * r)] for _ in range(rows)]
        for n in (0, 1):
            assert eliminate_from_B(B, r, n, F).matches

    def test_empty_system(self):
        out = eliminate_from_B([], 2, 1, F2)
        assert out.matches and out.rank == 0

    def test_eliminate_without_B(self):
        F = F2
        B = [[one(F), tt(F), rf(F, [0]), rf(F, [1])]]
        out = eliminate(generate_T(B, 2, 1, None, F), 2, 1)
        assert out.matches is None and out.rank == 2
