"""Betti matrices of endomorphisms and the Galois dimension (n+1) r^2 / s,
cross-checked against elimination of derivatives."""
from tmotive_lab import ExactCoef, FieldSpec
from tmotive_lab.diffalg import eliminate_from_B
from tmotive_lab.drinfeld import DrinfeldModule
from tmotive_lab.galois import betti_generators, centralizer_system, prolong_system
from tmotive_lab.modfile import format_fqt
from tmotive_lab.motive import default_periods, psi_rho
from tmotive_lab.twisted import TwistedPoly


def run(rho, endos, levels):
    base = psi_rho(rho, default_periods(rho, 40), 12, 40)
    gens, _ = betti_generators(rho, endos, base)
    print(f"{rho.name}: Betti matrices")
    for g in gens[1:]:
        for row in g:
            print("   ", "  ".join(format_fqt(x) for x in row))
    sysm = centralizer_system(gens, rho.r, rho.F)
    for n in levels:
        s = prolong_system(sysm, n) if n else sysm
        el = eliminate_from_B(sysm.B, rho.r, n, rho.F) if sysm.B else None
        elim = f", eliminated rank {el.rank} (match={el.matches})" if el else ""
        print(f"  n={n}: rankB={s.rankB} s={s.s} dim={s.dim}{elim}")


spec = FieldSpec(3, 1, 2, 1)
carlitz = DrinfeldModule(spec, (ExactCoef.scalar(spec, 1),), "carlitz3")
run(carlitz, [carlitz.rho_t()], range(5))

spec = FieldSpec(2, 1, 2, 2)
cm = DrinfeldModule(spec, (ExactCoef.scalar(spec, 0), ExactCoef.scalar(spec, 1)), "cm4")
run(cm, [TwistedPoly([ExactCoef.scalar(spec, spec.field.gen())])], range(4))
