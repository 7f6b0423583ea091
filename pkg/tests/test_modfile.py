import textwrap

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmotive_lab.cli import preset_path
from tmotive_lab.errors import ModuleParseError
from tmotive_lab.ffbase import GF, ExactCoef, FieldSpec, Poly, RatFunc
from tmotive_lab.modfile import format_fqt, load_module, parse_exact, parse_fqt, parse_module_text, parse_tau_expr
from tmotive_lab.series import RamSeries
from tmotive_lab.twisted import TwistedPoly

SPEC = FieldSpec(2, 1, 2, 2)


def parse_error(text):
    with pytest.raises(ModuleParseError) as info:
        parse_module_text(textwrap.dedent(text))
    return info.value


class TestExpressions:
    def test_tau_expression(self):
        val = parse_tau_expr("theta + g*tau^2", SPEC)
        assert isinstance(val, TwistedPoly) and val.deg == 2
        assert val.c[0] == ExactCoef.theta(SPEC)
        assert val.c[2] == ExactCoef.scalar(SPEC, SPEC.field.gen())

    def test_exact_arithmetic(self):
        th = ExactCoef.theta(SPEC)
        assert parse_exact("(theta + 1)^2 / theta", SPEC) == (th + ExactCoef.scalar(SPEC, 1)) * (th + ExactCoef.scalar(SPEC, 1)) / th
        assert parse_exact("w^4", SPEC) == th
        assert parse_exact("-1", SPEC) == ExactCoef.scalar(SPEC, 1)

    def test_tau_rejected_in_scalar(self):
        with pytest.raises(ModuleParseError):
            parse_exact("tau", SPEC)

    @pytest.mark.parametrize("text,col", [("theta +", 8), ("theta $ 1", 7), ("(theta", 7), ("foo", 1)])
    def test_error_columns(self, text, col):
        with pytest.raises(ModuleParseError) as info:
            parse_exact(text, SPEC, line=3)
        assert info.value.line == 3 and info.value.col == col


class TestFqt:
    F = GF(2, 2, 1)

    def test_examples(self):
        F = self.F
        t = RatFunc.var(F)
        one = RatFunc(Poly.const(F, F.one()))
        assert parse_fqt("t^2 + 1", F) == t * t + one
        x = parse_fqt("(z*t + 1)/(t + z)", F)
        assert format_fqt(x) == "(z*t + 1)/(t + z)"
        assert format_fqt(one) == "(1)"

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 3), max_size=4), st.lists(st.integers(0, 3), min_size=1, max_size=4))
    def test_round_trip(self, num, den):
        F = self.F
        if not any(den):
            den = [1]

        def poly(cs):
            return Poly(F, np.stack([F.vec(c) for c in cs])) if cs else Poly.zero(F)

        x = RatFunc(poly(num), poly(den))
        assert parse_fqt(format_fqt(x), F) == x


class TestModuleFiles:
    def test_presets(self):
        c = load_module(preset_path("carlitz3"))
        assert c.rho.r == 1 and c.rho.q == 3 and c.periods == "auto"
        assert len(c.endos) == 1 and c.pairs[0][1] == "log"
        m = load_module(preset_path("cm4"))
        assert m.rho.r == 2 and m.spec.D == 2 and m.name == "cm4"

    def test_explicit_period_and_u(self):
        cfg = parse_module_text(
            textwrap.dedent(
                """\
                p = 2
                r = 1
                kappa1 = 1
                period1 = e=1; m=1; terms=[(2,1),(1,1),(0,1)]; prec=3
                alpha1 = theta
                u1 = e=1; m=1; terms=[(1,1)]; prec=8
                """
            )
        )
        assert isinstance(cfg.periods[0], RamSeries)
        assert cfg.periods[0].terms() == [(2, 1), (1, 1), (0, 1)]
        assert isinstance(cfg.pairs[0][1], RamSeries)

    def test_missing_rank(self):
        err = parse_error("p = 2\nkappa1 = 1\n")
        assert "r" in str(err)

    def test_not_prime(self):
        err = parse_error("p = 4\nr = 1\nkappa1 = 1\n")
        assert err.line == 1 and err.col == 5

    def test_unknown_key(self):
        err = parse_error("p = 2\nr = 1\n  foo = 3\n")
        assert err.line == 3 and err.col == 3

    def test_duplicate_key(self):
        err = parse_error("p = 2\np = 3\n")
        assert err.line == 2

    def test_bad_expression_position(self):
        err = parse_error("p = 2\nr = 1\nkappa1 = theta +* 1\n")
        assert err.line == 3 and err.col == 17

    def test_zero_leading_coefficient(self):
        err = parse_error("p = 2\nr = 2\nkappa2 = 0\n")
        assert err.line == 3

    def test_shallow_depth(self):
        err = parse_error("p = 2\nr = 2\nD = 1\nkappa2 = 1\n")
        assert err.line == 3

    def test_line_without_equals(self):
        err = parse_error("p = 2\njunk\n")
        assert err.line == 2 and err.col == 1

    def test_u_without_alpha(self):
        err = parse_error("p = 2\nr = 1\nkappa1 = 1\nu2 = log\n")
        assert err.line == 4
