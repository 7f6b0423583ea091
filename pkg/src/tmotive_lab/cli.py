"""Command-line front end: ``tmotive-lab <command> [options]``.

Exit codes: 0 all checks pass, 1 a check failed, 2 precision or convergence
could not be certified, 3 the module file did not parse.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .diffalg import eliminate_from_B
from .drinfeld import log_of
from .ffbase import Poly, RatFunc
from .errors import (
    ConvergenceNotCertified,
    ModuleParseError,
    NotRational,
    PrecisionExhausted,
    PrecisionLoss,
    TMotiveError,
)
from .galois import betti_generators, centralizer_system, prolong_system
from .modfile import ModuleConfig, format_fqt, load_module
from .motive import default_periods, n_motive, prolong, psi_rho, quasi_log, y_alpha
from .report import Check, Report, dumps
from .series import RamSeries

EXIT_OK, EXIT_FAIL, EXIT_PRECISION, EXIT_PARSE = 0, 1, 2, 3
COMMANDS = ("verify-triv", "galois-dim", "quasilog", "eliminate", "selftest")


@dataclass
class JobConfig:
    command: str
    module: str | None
    n: int
    t_deg: int
    prec: int
    as_json: bool
    seed: int
    cross_check: bool = False
    min_cert: int = 4

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.t_deg < 1 or self.prec < 1:
            raise ValueError("precision parameters must be positive")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.command != "selftest" and not self.module:
            raise ValueError(f"{self.command} needs --module")


def workers() -> int:
    raw = os.environ.get("TMOTIVE_THREADS", "")
    try:
        val = int(raw)
    except ValueError:
        val = os.cpu_count() or 1
    return max(1, min(val, 32))


def ordered_map(fn, items):
    """Run fn over items in a bounded pool and return results in input order."""
    items = list(items)
    if workers() == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers()) as pool:
        return list(pool.map(fn, items))


def preset_path(name: str) -> Path | None:
    ref = resources.files("tmotive_lab") / "presets" / f"{name}.mod"
    return Path(str(ref)) if ref.is_file() else None


def resolve_module(spec: str) -> ModuleConfig:
    path = Path(spec)
    if not path.exists():
        alt = preset_path(spec)
        if alt is None:
            raise FileNotFoundError(f"module file {spec!r} not found (presets: carlitz3, cm4)")
        path = alt
    return load_module(path)


def periods_for(cfg: ModuleConfig, prec: int) -> list[RamSeries]:
    if cfg.periods is None:
        raise ValueError("module file gives no periods; add 'periods = auto' or period1..periodR")
    if cfg.periods == "auto":
        return default_periods(cfg.rho, prec)
    return [s.with_prec(min(s.prec, prec) if s.prec != float("inf") else prec) for s in cfg.periods]


# ---------------------------------------------------------------- commands


def cmd_verify_triv(cfg: ModuleConfig, job: JobConfig) -> dict:
    base = psi_rho(cfg.rho, periods_for(cfg, job.prec), job.t_deg, job.prec)

    def level(n):
        return (prolong(base, n) if n else base).report()

    reports = ordered_map(level, range(job.n + 1))
    weakest = min(r.extra["certified_valuation"] for r in reports)
    if weakest < job.min_cert:
        raise PrecisionLoss(f"residuals are certified only to valuation {weakest}, below --min-cert {job.min_cert}")
    levels = []
    for n, rep in enumerate(reports):
        d = rep.to_dict()
        d["n"] = n
        levels.append(d)
    return {
        "command": "verify-triv",
        "module": cfg.name,
        "precision": {"t_deg": job.t_deg, "prec": job.prec},
        "levels": levels,
        "pass": all(r.ok for r in reports),
    }


def _galois_base(cfg: ModuleConfig, job: JobConfig):
    warnings = []
    if not cfg.endos:
        warnings.append("no endomorphisms given: s = 1 assumed, unverified")
        F = cfg.rho.F
        one, zero = RatFunc(Poly.const(F, F.one())), RatFunc(Poly.zero(F))
        gens = [[[one if i == j else zero for j in range(cfg.rho.r)] for i in range(cfg.rho.r)]]
        ok = True
    else:
        base = psi_rho(cfg.rho, periods_for(cfg, job.prec), job.t_deg, job.prec)
        gens, ok = betti_generators(cfg.rho, cfg.endos, base, job.seed)
    sysm = centralizer_system(gens, cfg.rho.r, cfg.rho.F)
    sysm.reconstruction_ok = ok
    return sysm, gens, warnings


def cmd_galois_dim(cfg: ModuleConfig, job: JobConfig) -> dict:
    sysm, gens, warnings = _galois_base(cfg, job)

    def level(n):
        s = prolong_system(sysm, n) if n else sysm
        d = s.to_dict()
        if job.cross_check:
            el = eliminate_from_B(sysm.B, cfg.rho.r, n, cfg.rho.F) if sysm.B else None
            d["elimination_rank"] = el.rank if el else 0
            d["elimination_matches"] = bool(el.matches) if el else True
        return d

    levels = ordered_map(level, range(job.n + 1))
    ok = all(lv.get("elimination_matches", True) for lv in levels)
    return {
        "command": "galois-dim",
        "module": cfg.name,
        "precision": {"t_deg": job.t_deg, "prec": job.prec},
        "betti": [[[format_fqt(x) for x in row] for row in g] for g in gens],
        "levels": levels,
        "warnings": warnings,
        "pass": ok and sysm.reconstruction_ok,
    }


def _pairs(cfg: ModuleConfig, prec: int) -> list:
    out = []
    for alpha, u in cfg.pairs:
        if isinstance(u, RamSeries):
            out.append((alpha, u))
        elif alpha.is_zero():
            out.append((alpha, RamSeries.zero(cfg.rho.F)))
        else:
            out.append((alpha, log_of(cfg.rho, alpha, prec)))
    return out


def cmd_quasilog(cfg: ModuleConfig, job: JobConfig) -> dict:
    pairs = _pairs(cfg, job.prec)
    if not pairs:
        raise ValueError("module file gives no alphaK entries")
    rows = []
    ok = True
    for idx, (alpha, u) in enumerate(pairs, start=1):
        ql = quasi_log(cfg.rho, u, alpha, job.prec)
        row = {
            "index": idx,
            "u": u.to_text(),
            "quasi_log": ql.value.to_text(),
            "certified_prec": ql.certified_prec,
            "two_route_agreement": True,
        }
        rows.append(row)
    extensions = []
    nonzero = [(u, a) for a, u in pairs if not u.is_exact_zero()]
    if nonzero and cfg.periods is not None:
        base = psi_rho(cfg.rho, periods_for(cfg, job.prec), job.t_deg + job.n + 1, job.prec)
        for n in range(job.n + 1):
            for i, (u, a) in enumerate(nonzero, start=1):
                rep = y_alpha(cfg.rho, u, a, n, job.t_deg, job.prec, base=base).report
                extensions.append(_ext_dict(rep, n, f"Y[{i}]"))
                ok &= rep.ok
            if len(nonzero) > 1:
                rep = n_motive(cfg.rho, nonzero, n, job.t_deg, job.prec, base=base).report
                extensions.append(_ext_dict(rep, n, "N"))
                ok &= rep.ok
    return {
        "command": "quasilog",
        "module": cfg.name,
        "precision": {"t_deg": job.t_deg, "prec": job.prec},
        "quasi_logs": rows,
        "extensions": extensions,
        "pass": ok,
    }


def _ext_dict(rep: Report, n: int, label: str) -> dict:
    d = rep.to_dict()
    d["n"] = n
    d["label"] = label
    return d


def cmd_eliminate(cfg: ModuleConfig, job: JobConfig) -> dict:
    sysm, _, warnings = _galois_base(cfg, job)
    r = cfg.rho.r
    el = eliminate_from_B(sysm.B, r, job.n, cfg.rho.F)
    from .diffalg import x_vars

    cols = [str(v) for h in range(job.n + 1) for v in x_vars(r, h)]
    rows = [[format_fqt(x) for x in row] for row in el.rows(cfg.rho.F)]
    expected = (job.n + 1) * sysm.rankB
    return {
        "command": "eliminate",
        "module": cfg.name,
        "n": job.n,
        "order_bound": el.L,
        "variables": cols,
        "system": rows,
        "rank": el.rank,
        "expected_rank": expected,
        "matches_prolonged_system": bool(el.matches),
        "warnings": warnings,
        "pass": bool(el.matches) and el.rank == expected,
    }


def cmd_selftest(cfg: ModuleConfig | None, job: JobConfig) -> dict:
    from .ffbase import GF, binom_mod_p

    rng = np.random.default_rng(job.seed)
    checks: list[Check] = []
    F = GF(3, 1, 1)
    bad = 0
    for _ in range(50):
        a = Poly(F, F.random(rng, (int(rng.integers(1, 6)),)))
        b = Poly(F, F.random(rng, (int(rng.integers(1, 6)),)))
        k = int(rng.integers(0, 5))
        lhs = (a * b).hyperderiv(k)
        rhs = Poly.zero(F)
        for i in range(k + 1):
            rhs = rhs + a.hyperderiv(i) * b.hyperderiv(k - i)
        bad += lhs != rhs
        i, j = int(rng.integers(0, 4)), int(rng.integers(0, 4))
        bad += a.hyperderiv(j).hyperderiv(i) != a.hyperderiv(i + j).scale(F.const(binom_mod_p(i + j, j, 3)))
    checks.append(Check("hyperderivative_laws", bad == 0, f"{bad} failures in 100 seeded cases"))
    mods = [cfg] if cfg is not None else [resolve_module("carlitz3"), resolve_module("cm4")]
    small = JobConfig("verify-triv", None, min(job.n, 2), job.t_deg, job.prec, True, job.seed)

    def run(mod):
        out = []
        v = cmd_verify_triv(mod, small)
        out.append(Check(f"{mod.name}:trivialization", v["pass"], f"levels 0..{small.n}"))
        if mod.endos:
            g = cmd_galois_dim(mod, small)
            dims = [lv["dim"] for lv in g["levels"]]
            out.append(Check(f"{mod.name}:galois_dim", g["pass"], f"dims {dims}"))
        if mod.pairs:
            q = cmd_quasilog(mod, JobConfig("quasilog", None, 0, job.t_deg, min(job.prec, 30), True, job.seed))
            out.append(Check(f"{mod.name}:quasilog", q["pass"], f"{len(q['quasi_logs'])} pairs"))
        return out

    for part in ordered_map(run, mods):
        checks.extend(part)
    return {
        "command": "selftest",
        "seed": job.seed,
        "precision": {"t_deg": job.t_deg, "prec": job.prec},
        "checks": [c.to_dict() for c in checks],
        "pass": all(c.passed for c in checks),
    }


HANDLERS = {
    "verify-triv": cmd_verify_triv,
    "galois-dim": cmd_galois_dim,
    "quasilog": cmd_quasilog,
    "eliminate": cmd_eliminate,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------- rendering


def render_text(result: dict) -> str:
    lines = [f"{result['command']}: {'PASS' if result['pass'] else 'FAIL'}"]
    if "module" in result:
        lines.append(f"  module {result['module']}")
    for w in result.get("warnings", []):
        lines.append(f"  warning: {w}")
    for lv in result.get("levels", []):
        if "rankB" in lv:
            extra = ""
            if "elimination_rank" in lv:
                extra = f", eliminated rank {lv['elimination_rank']} ({'match' if lv['elimination_matches'] else 'MISMATCH'})"
            lines.append(f"  n={lv['n']}: rankB={lv['rankB']} s={lv['s']} dim={lv['dim']}{extra}")
        else:
            ok = all(c["pass"] for c in lv["checks"])
            lines.append(
                f"  n={lv['n']}: {'ok' if ok else 'FAIL'}  residual max valuation {lv['residual_max_valuation']}"
                f"  certified to {lv.get('certified_valuation')}"
            )
    for row in result.get("quasi_logs", []):
        lines.append(f"  pair {row['index']}: F_delta(u) = {row['quasi_log']}  (prec {row['certified_prec']})")
    for ext in result.get("extensions", []):
        ok = all(c["pass"] for c in ext["checks"])
        lines.append(f"  {ext['label']} n={ext['n']}: {'ok' if ok else 'FAIL'}")
    if "system" in result:
        lines.append(f"  rank {result['rank']} (expected {result['expected_rank']}), order bound {result['order_bound']}")
        for row in result["system"]:
            terms = [v if c == "(1)" else f"{c}*{v}" for c, v in zip(row, result["variables"]) if c != "(0)"]
            lines.append("  " + " + ".join(terms) + " = 0")
    for c in result.get("checks", []):
        lines.append(f"  [{'PASS' if c['pass'] else 'FAIL'}] {c['name']}: {c['detail']}")
    return "\n".join(lines)


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tmotive-lab", description="Verify trivializations, Galois dimensions and quasi-logarithms of Drinfeld modules.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--module", help="module file, or a preset name (carlitz3, cm4)")
    ap.add_argument("--n", type=int, default=1, help="highest prolongation level")
    ap.add_argument("--tdeg", type=int, default=12, help="t-truncation degree")
    ap.add_argument("--prec", type=int, default=40, help="theta-adic working precision")
    ap.add_argument("--json", action="store_true", help="emit a JSON report")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    ap.add_argument("--min-cert", type=int, default=4, help="verify-triv: least acceptable certified residual valuation")
    ap.add_argument("--cross-check", action="store_true", help="galois-dim: also run the elimination")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = JobConfig(args.command, args.module, args.n, args.tdeg, args.prec, args.json, args.seed, args.cross_check, args.min_cert)
    try:
        job.validate()
        cfg = resolve_module(job.module) if job.module else None
        result = HANDLERS[job.command](cfg, job)
    except ModuleParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConvergenceNotCertified, PrecisionLoss, PrecisionExhausted) as exc:
        print(f"precision not certified: {exc}", file=sys.stderr)
        print(f"  try a larger --prec (now {job.prec}) or a smaller --tdeg (now {job.t_deg})", file=sys.stderr)
        return EXIT_PRECISION
    except NotRational as exc:
        print(f"Betti reconstruction failed: {exc}", file=sys.stderr)
        print("  raise --tdeg/--prec, or check that each endoK commutes with rho_t", file=sys.stderr)
        return EXIT_FAIL
    except (TMotiveError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(dumps(result) if job.as_json else render_text(result))
    return EXIT_OK if result["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
