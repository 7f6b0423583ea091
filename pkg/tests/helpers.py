"""Random object builders shared by the test modules."""
import numpy as np

from tmotive_lab.series import RamSeries, TatePoly


def random_series(F, rng, e=1, width=5, top_range=(-3, 3), prec=None):
    top = int(rng.integers(*top_range, endpoint=True))
    c = F.random(rng, (width,))
    return RamSeries(F, e, top, c, np.inf if prec is None else prec)


def random_tate(F, rng, tdeg=3, e=1, width=5, prec=None):
    coeffs = [random_series(F, rng, e, width, prec=prec) for _ in range(tdeg + 1)]
    return TatePoly.from_series(coeffs, exact_t=True)


def tate_equal(a, b):
    return (a - b).is_zero()


ACCEPTANCE_LINES: list[str] = []
