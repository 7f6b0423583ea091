"""Carlitz period for q = 3: the exponential kills it, and the generating
function of the period recovers it at t = theta."""
from tmotive_lab import ExactCoef, FieldSpec
from tmotive_lab.drinfeld import DrinfeldModule, carlitz_period
from tmotive_lab.motive import agf

PREC = 40

spec = FieldSpec(3, 1, 2, 1)
rho = DrinfeldModule(spec, (ExactCoef.scalar(spec, 1),), "carlitz3")

pi = carlitz_period(spec, PREC)
print("period, leading terms (exponent in theta^(1/2), field code):")
print("  ", pi.terms()[:6])
print("valuation:", pi.valuation())

exp = rho.exp_series(4)
print("Exp(pi) vanishes to precision", PREC - 5, ":", exp(pi, PREC - 5).is_zero())

f = agf(rho, pi, 12, PREC)
value = f.twist(1).eval_at_theta()
diff = value + pi
print("f^(1)(theta) + pi vanishes:", diff.is_zero())
print("certified digits:", pi.top + diff.prec)
