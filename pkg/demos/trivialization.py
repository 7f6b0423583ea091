"""Rigid trivialization of rho_t = theta + tau^2 over F_4 and its prolongations."""
from tmotive_lab import ExactCoef, FieldSpec
from tmotive_lab.drinfeld import DrinfeldModule
from tmotive_lab.motive import default_periods, prolong, psi_rho

spec = FieldSpec(2, 1, 2, 2)
rho = DrinfeldModule(spec, (ExactCoef.scalar(spec, 0), ExactCoef.scalar(spec, 1)), "cm4")

periods = default_periods(rho, 40)
base = psi_rho(rho, periods, 12, 40)

for n in range(4):
    level = prolong(base, n) if n else base
    rep = level.report()
    status = "ok" if rep.ok else "FAILED"
    print(f"n={n}: {len(level.Psi.full())}x{len(level.Psi.full())} matrix, {status}, "
          f"certified to valuation {rep.extra['certified_valuation']}")
    for c in rep.checks:
        print(f"    {c.name}: {c.detail}")
