"""Scalar root finding used across the package.

Newton's method safeguarded by a sign-changing bracket: an iterate that
leaves the bracket, or any iterate after ``max_newton`` Newton steps, is
replaced by a bisection step.
"""

from __future__ import annotations

import math
from typing import Callable, Tuple

from .errors import NumericalFailureError

FDF = Callable[[float], Tuple[float, float]]


def newton_bisect(
    fdf: FDF,
    lo: float,
    hi: float,
    x0: float | None = None,
    xtol: float = 0.0,
    ftol: float = 0.0,
    steptol: float = 0.0,
    max_newton: int = 25,
    max_iter: int = 400,
) -> float:
    """Find a root of ``f`` inside ``[lo, hi]``.

    Parameters
    ----------
    fdf : callable
        Returns ``(f(x), f'(x))``.
    lo, hi : float
        Bracket with ``f(lo)`` and ``f(hi)`` of opposite sign (or zero).
    x0 : float, optional
        Starting point, defaults to the midpoint.
    xtol : float
        Absolute bracket width at which iteration stops.
    ftol : float
        Residual magnitude at which iteration stops.
    steptol : float
        A Newton step shorter than this ends the iteration (quadratic
        convergence means the new iterate is already at round-off level).
    max_newton : int
        Newton steps allowed before switching to pure bisection.
    """
    flo, _ = fdf(lo)
    fhi, _ = fdf(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NumericalFailureError(
            f"root not bracketed: f({lo!r})={flo!r}, f({hi!r})={fhi!r}"
        )
    increasing = fhi > 0
    x = 0.5 * (lo + hi) if x0 is None or not (lo < x0 < hi) else x0
    for it in range(max_iter):
        fx, dfx = fdf(x)
        if fx == 0.0 or abs(fx) <= ftol:
            return x
        if (fx > 0) == increasing:
            hi = x
        else:
            lo = x
        if hi - lo <= xtol:
            return x
        step_ok = False
        if it < max_newton and dfx != 0.0 and math.isfinite(dfx):
            xn = x - fx / dfx
            if lo < xn < hi:
                step_ok = True
                if abs(xn - x) <= steptol:
                    return xn
        if not step_ok:
            xn = 0.5 * (lo + hi)
        if xn == x:
            return x
        x = xn
    raise NumericalFailureError(
        f"no convergence after {max_iter} iterations", estimate=hi - lo
    )


def expand_upward(
    f: Callable[[float], float], start: float, factor: float = 2.0, limit: float = math.inf,
    max_steps: int = 400,
) -> float:
    """Return the first ``x = start*factor**k`` (k >= 1) with ``f(x) > 0``.

    ``f`` is assumed increasing. Raises when ``limit`` is crossed first.
    """
    x = start
    for _ in range(max_steps):
        x = min(x * factor, limit)
        if f(x) > 0:
            return x
        if x >= limit:
            break
    raise NumericalFailureError(f"could not bracket a sign change below {limit!r}")
