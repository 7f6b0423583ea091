"""Finite-precision toolkit for Drinfeld modules, their dual t-motives and prolongations."""
from .drinfeld import DrinfeldModule, carlitz_period, eval_entire, log_of
from .errors import TMotiveError
from .ffbase import GF, ExactCoef, FieldSpec, Poly, RatFunc, TPoly
from .galois import betti, centralizer_system, endo_matrix, prolong_system
from .modfile import load_module, parse_module_text
from .motive import agf, n_motive, prolong, psi_rho, quasi_log, y_alpha
from .series import DMatrix, RamSeries, TatePoly
from .twisted import TwistedPoly

__version__ = "0.1.0"

__all__ = [
    "DMatrix",
    "DrinfeldModule",
    "ExactCoef",
    "FieldSpec",
    "GF",
    "Poly",
    "RamSeries",
    "RatFunc",
    "TMotiveError",
    "TPoly",
    "TatePoly",
    "TwistedPoly",
    "agf",
    "betti",
    "carlitz_period",
    "centralizer_system",
    "endo_matrix",
    "eval_entire",
    "load_module",
    "log_of",
    "n_motive",
    "parse_module_text",
    "prolong",
    "prolong_system",
    "psi_rho",
    "quasi_log",
    "y_alpha",
]
