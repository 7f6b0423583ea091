"""Module definition files and the small expression language they use.

A module file holds ``key = value`` lines; ``#`` starts a comment.

Keys::

    p, e, m        characteristic, q = p^e, constants F_{q^m}
    D              twist depth (default r): theta = w^(q^D)
    r              rank
    kappa1..kappaR coefficients of rho_t = theta + kappa1 tau + ...
    periods        auto | carlitz   (lattice basis computed for theta + tau^r)
    periodK        explicit period in series text form
    endoK          endomorphism as a tau-expression, e.g. ``theta + tau`` or ``g``
    alphaK         algebraic point for quasilog checks
    uK             log (default: u = Log(alpha)) or explicit series text
    name           label used in reports

Expressions: integers, ``w``, ``theta``, ``g`` (primitive element of
F_{q^m}), ``tau``, the operators ``+ - * / ^`` and parentheses.  Exponents are
integer literals.  Division is only by tau-free expressions.

F_q(t) strings use the same operators with ``t``, integers and ``z`` (the
generator of F_q^x inside F_{q^m}); the canonical output form is
``(num)/(den)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .drinfeld import DrinfeldModule
from .errors import ModuleParseError
from .ffbase import GF, ExactCoef, FieldSpec, Poly, RatFunc, is_prime
from .series import RamSeries
from .twisted import TwistedPoly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class _Parser:
    """Recursive descent over a single expression string."""

    def __init__(self, text: str, atoms: dict, line: int = 0, col0: int = 1):
        self.text, self.atoms, self.line, self.col0 = text, atoms, line, col0
        self.toks = []
        for mt in _TOKEN.finditer(text):
            if mt.group(0).strip() == "":
                continue
            kind = "num" if mt.group(1) else "id" if mt.group(2) else "op"
            val = mt.group(1) or mt.group(2) or mt.group(3)
            self.toks.append((kind, val, mt.start(mt.lastindex)))
        self.pos = 0

    def error(self, msg: str, at: int | None = None):
        if at is None:
            at = self.toks[self.pos][2] if self.pos < len(self.toks) else len(self.text)
        raise ModuleParseError(msg, self.line, self.col0 + at)

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self):
        if not self.toks:
            self.error("empty expression")
        val = self.expr()
        if self.pos != len(self.toks):
            self.error(f"unexpected {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            val = self.atoms["+"](val, rhs) if op == "+" else self.atoms["+"](val, self.atoms["neg"](rhs))
        return val

    def term(self):
        val = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, at = self.take()
            rhs = self.unary()
            try:
                val = self.atoms["*"](val, rhs) if op == "*" else self.atoms["/"](val, rhs)
            except (ZeroDivisionError, ValueError) as exc:
                self.error(str(exc) or "division error", at)
        return val

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return self.atoms["neg"](self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            _, _, at = self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, val, at2 = self.take()
            if kind != "num":
                self.error("exponent must be an integer literal", at2)
            try:
                base = self.atoms["^"](base, sign * int(val))
            except (ZeroDivisionError, ValueError) as exc:
                self.error(str(exc) or "bad power", at)
        return base

    def atom(self):
        kind, val, at = self.take()
        if kind is None:
            self.error("unexpected end of expression", at)
        if kind == "num":
            return self.atoms["int"](int(val))
        if kind == "id":
            if val not in self.atoms["names"]:
                self.error(f"unknown name {val!r}", at)
            return self.atoms["names"][val]
        if val == "(":
            inner = self.expr()
            if self.peek()[1] != ")":
                self.error("missing ')'")
            self.take()
            return inner
        self.error(f"unexpected {val!r}", at)


# ---------------------------------------------------------------- exact / tau expressions


def _lift_tau(x):
    return x if isinstance(x, TwistedPoly) else TwistedPoly([x])


def _tau_atoms(spec: FieldSpec) -> dict:
    F = spec.field

    def add(a, b):
        if isinstance(a, TwistedPoly) or isinstance(b, TwistedPoly):
            return _lift_tau(a) + _lift_tau(b)
        return a + b

    def mul(a, b):
        if isinstance(a, TwistedPoly) or isinstance(b, TwistedPoly):
            return _lift_tau(a) * _lift_tau(b)
        return a * b

    def div(a, b):
        if isinstance(b, TwistedPoly):
            if b.deg > 0:
                raise ValueError("division by a tau-expression")
            b = b.c[0]
        if b.is_zero():
            raise ZeroDivisionError("division by zero")
        if isinstance(a, TwistedPoly):
            return TwistedPoly([c / b for c in a.c])
        return a / b

    def pw(a, k):
        if isinstance(a, TwistedPoly):
            if k < 0:
                raise ValueError("negative power of a tau-expression")
            out = TwistedPoly([ExactCoef.scalar(spec, 1)])
            for _ in range(k):
                out = out * a
            return out
        if k < 0 and a.is_zero():
            raise ZeroDivisionError("negative power of zero")
        return a**k

    def neg(a):
        return -a

    zero, one = ExactCoef.scalar(spec, 0), ExactCoef.scalar(spec, 1)
    names = {
        "w": ExactCoef.w(spec),
        "theta": ExactCoef.theta(spec),
        "g": ExactCoef.scalar(spec, F.gen()),
        "tau": TwistedPoly([zero, one]),
    }
    return {"+": add, "*": mul, "/": div, "^": pw, "neg": neg, "int": lambda n: ExactCoef.scalar(spec, n), "names": names}


def parse_tau_expr(text: str, spec: FieldSpec, line: int = 0, col0: int = 1):
    """ExactCoef for tau-free input, TwistedPoly otherwise."""
    return _Parser(text, _tau_atoms(spec), line, col0).parse()


def parse_exact(text: str, spec: FieldSpec, line: int = 0, col0: int = 1) -> ExactCoef:
    val = parse_tau_expr(text, spec, line, col0)
    if isinstance(val, TwistedPoly):
        if val.deg > 0:
            raise ModuleParseError("tau is not allowed here", line, col0)
        val = val.c[0] if val.c else ExactCoef.scalar(spec, 0)
    return val


# ---------------------------------------------------------------- F_q(t)


def parse_fqt(text: str, F: GF, line: int = 0, col0: int = 1) -> RatFunc:
    z = F.fq_gen()
    atoms = {
        "+": lambda a, b: a + b,
        "*": lambda a, b: a * b,
        "/": lambda a, b: a / b,
        "^": lambda a, k: a**k,
        "neg": lambda a: -a,
        "int": lambda n: RatFunc(Poly.const(F, F.const(n))),
        "names": {"t": RatFunc.var(F), "z": RatFunc(Poly.const(F, z))},
    }
    return _Parser(text, atoms, line, col0).parse()


def _fq_str(F: GF, c) -> str:
    code = F.code(c)
    for n in range(F.p):
        if F.code(F.const(n)) == code:
            return str(n)
    step = (F.size - 1) // (F.q - 1)
    L = int(F.log_table[code])
    if L % step:
        raise ValueError("coefficient outside F_q")
    k = L // step
    return "z" if k == 1 else f"z^{k}"


def _poly_str(P: Poly, var: str = "t") -> str:
    F = P.F
    if P.is_zero():
        return "0"
    parts = []
    for d in range(P.deg, -1, -1):
        c = P.c[d]
        if not np.any(c):
            continue
        cs = _fq_str(F, c)
        mono = "" if d == 0 else var if d == 1 else f"{var}^{d}"
        if not mono:
            parts.append(cs)
        elif cs == "1":
            parts.append(mono)
        else:
            parts.append(f"{cs}*{mono}")
    return " + ".join(parts)


def format_fqt(x: RatFunc) -> str:
    num = _poly_str(x.num)
    if x.den.deg == 0:
        return f"({num})"
    return f"({num})/({_poly_str(x.den)})"


# ---------------------------------------------------------------- module files


@dataclass
class ModuleConfig:
    spec: FieldSpec
    rho: DrinfeldModule
    periods: object = None  # None, "auto" or list[RamSeries]
    endos: list = field(default_factory=list)
    pairs: list = field(default_factory=list)  # (alpha: ExactCoef, u: "log" | RamSeries)
    name: str = ""
    path: str = ""


_KNOWN = re.compile(r"^(p|e|m|D|r|name|periods|kappa\d+|period\d+|endo\d+|alpha\d+|u\d+)$")


def _int_value(key: str, raw: str, line: int, col: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ModuleParseError(f"{key} must be an integer", line, col) from None


def parse_module_text(text: str, path: str = "") -> ModuleConfig:
    entries: dict[str, tuple[str, int, int]] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ModuleParseError("expected 'key = value'", ln, len(line) - len(line.lstrip()) + 1)
        key, val = line.split("=", 1)
        kcol = len(key) - len(key.lstrip()) + 1
        key = key.strip()
        if not _KNOWN.match(key):
            raise ModuleParseError(f"unknown key {key!r}", ln, kcol)
        if key in entries:
            raise ModuleParseError(f"duplicate key {key!r}", ln, kcol)
        vcol = line.index("=") + 2 + (len(val) - len(val.lstrip()))
        entries[key] = (val.strip(), ln, vcol)

    def need(key):
        if key not in entries:
            raise ModuleParseError(f"missing required key {key!r}", 0, 0)
        return entries[key]

    ints = {}
    for key, default in (("p", None), ("e", 1), ("m", 1), ("r", None), ("D", None)):
        if key in entries:
            raw, ln, col = entries[key]
            ints[key] = _int_value(key, raw, ln, col)
            if ints[key] < (0 if key == "D" else 1):
                raise ModuleParseError(f"{key} out of range", ln, col)
        elif default is not None:
            ints[key] = default
        elif key != "D":
            need(key)
    p, e, m, r = ints["p"], ints["e"], ints["m"], ints["r"]
    if not is_prime(p):
        raw, ln, col = entries["p"]
        raise ModuleParseError(f"p = {p} is not prime", ln, col)
    D = ints.get("D", r)
    if D < r:
        raw, ln, col = entries["D"]
        raise ModuleParseError(f"twist depth D = {D} must be at least r = {r}", ln, col)
    spec = FieldSpec(p, e, m, D)
    kappa = []
    for i in range(1, r + 1):
        key = f"kappa{i}"
        if key in entries:
            raw, ln, col = entries[key]
            kappa.append(parse_exact(raw, spec, ln, col))
        elif i == r:
            need(key)
        else:
            kappa.append(ExactCoef.scalar(spec, 0))
    for key in entries:
        if key.startswith("kappa") and int(key[5:]) > r:
            raise ModuleParseError(f"{key} exceeds rank {r}", entries[key][1], 1)
    if kappa[-1].is_zero():
        raw, ln, col = entries[f"kappa{r}"]
        raise ModuleParseError("leading coefficient must be nonzero", ln, col)
    name = entries["name"][0] if "name" in entries else Path(path).stem if path else ""
    rho = DrinfeldModule(spec, tuple(kappa), name)
    cfg = ModuleConfig(spec, rho, name=name, path=path)
    if "periods" in entries:
        raw, ln, col = entries["periods"]
        if raw not in ("auto", "carlitz"):
            raise ModuleParseError("periods must be 'auto' or 'carlitz'", ln, col)
        cfg.periods = "auto"
    explicit = sorted((int(k[6:]), k) for k in entries if k.startswith("period") and k != "periods")
    if explicit:
        if cfg.periods is not None:
            raise ModuleParseError("give either 'periods' or explicit periodK entries", entries[explicit[0][1]][1], 1)
        if [i for i, _ in explicit] != list(range(1, r + 1)):
            raise ModuleParseError(f"explicit periods must be period1..period{r}", entries[explicit[0][1]][1], 1)
        cfg.periods = [_series_value(entries[k], spec) for _, k in explicit]
    for _, k in sorted((int(k[4:]), k) for k in entries if k.startswith("endo")):
        raw, ln, col = entries[k]
        val = parse_tau_expr(raw, spec, ln, col)
        cfg.endos.append(_lift_tau(val))
    for i, k in sorted((int(k[5:]), k) for k in entries if k.startswith("alpha")):
        raw, ln, col = entries[k]
        alpha = parse_exact(raw, spec, ln, col)
        uk = f"u{i}"
        u = "log"
        if uk in entries and entries[uk][0] != "log":
            u = _series_value(entries[uk], spec)
        cfg.pairs.append((alpha, u))
    for k in entries:
        if k.startswith("u") and k[1:].isdigit() and f"alpha{k[1:]}" not in entries:
            raise ModuleParseError(f"{k} given without alpha{k[1:]}", entries[k][1], 1)
    return cfg


def _series_value(entry, spec: FieldSpec) -> RamSeries:
    raw, ln, col = entry
    try:
        s = RamSeries.from_text(spec.field, raw)
    except Exception as exc:
        raise ModuleParseError(f"bad series text: {exc}", ln, col) from None
    return s


def load_module(path) -> ModuleConfig:
    path = Path(path)
    return parse_module_text(path.read_text(), str(path))


__all__ = [
    "ModuleConfig",
    "format_fqt",
    "load_module",
    "parse_exact",
    "parse_fqt",
    "parse_module_text",
    "parse_tau_expr",
]
