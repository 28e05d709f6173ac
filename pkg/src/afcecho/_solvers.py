"""Bracketed scalar solvers with fixed tolerances.

Root bisection defers to scipy. The golden-section maximizer is local because
scipy's ``golden`` may probe outside the bracket (finesse < 2 is invalid here),
and the predicate bisection works on a boolean rather than a sign.
"""
from __future__ import annotations

import math
from typing import Callable

from scipy import optimize

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class NoBracketError(ValueError):
    """The function does not change sign over the bracket."""


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float) -> float:
    """Root of ``f`` in [lo, hi]; the bracket must straddle a sign change."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoBracketError(f"no sign change on [{lo}, {hi}]: f={flo:.6g}, {fhi:.6g}")
    return float(optimize.bisect(f, lo, hi, xtol=xtol, maxiter=200))


def bisect_predicate(pred: Callable[[float], bool], good: float, bad: float, xtol: float) -> float:
    """Boundary between ``pred`` true at ``good`` and false at ``bad``; returns the good side."""
    while abs(bad - good) > xtol:
        mid = 0.5 * (good + bad)
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def golden_max(f: Callable[[float], float], lo: float, hi: float, xtol: float) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on [lo, hi].

    Returns (x, f(x)); the bracket endpoints are also compared so a maximum sitting
    on the boundary is not lost.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    candidates = [(fc, c), (fd, d), (f(lo), lo), (f(hi), hi)]
    best_f, best_x = max(candidates)
    return best_x, best_f
