"""Deterministic 1-D golden-section minimisation and bisection."""

import math

from .errors import BracketError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, xtol=1e-10, max_iter=500):
    """Minimise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``.

    The interval endpoints are also compared at the end, so a minimum on
    the boundary is returned exactly.
    """
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > xtol and it < max_iter:
        if fc <= fd:  # ties move toward smaller x
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        it += 1
    x = c if fc <= fd else d
    fx = min(fc, fd)
    # ties go to the smaller abscissa
    f_lo, f_hi = f(lo), f(hi)
    if f_lo <= fx:
        x, fx = lo, f_lo
    if f_hi < fx:
        x, fx = hi, f_hi
    return x, fx


def bisect(predicate, lo, hi, xtol=1e-6, max_iter=200):
    """Locate where a boolean ``predicate`` flips from ``False`` at ``lo`` to ``True`` at ``hi``.

    Returns the midpoint of the final bracket (width ``<= xtol``).
    """
    p_lo, p_hi = predicate(lo), predicate(hi)
    if p_lo or not p_hi:
        raise BracketError(f"predicate must be False at {lo} and True at {hi} (got {p_lo}, {p_hi})")
    it = 0
    while hi - lo > xtol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
        it += 1
    return 0.5 * (lo + hi)
