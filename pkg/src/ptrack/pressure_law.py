"""Convex pressure laws p(v) and the scalar functions derived from them.

A law stores a callable returning ``(p, p', p'', p''', p'''')`` at a specific
volume ``v``.  Everything else (sound speed, the Riemann-invariant function
``h``, interaction coefficients, the Bakhvalov discriminant) is computed
from those five numbers.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, interpolate

from ._roots import newton_bisect
from .errors import DomainError, InvalidParameterError, NumericalFailureError, RangeError

Derivs = Tuple[float, float, float, float, float]

QUAD_TOL = 1e-12
INV_TOL = 1e-11
# J2 normalizations, see ``j2_normalized``
NORMALIZATIONS = ("def", "blowup", "taylor")


class PressureLaw:
    """A pressure law with closed-form derivatives up to fourth order.

    Parameters
    ----------
    derivs : callable
        ``derivs(v) -> (p, p', p'', p''', p'''')``.
    domain : (float, float)
        Open interval of admissible specific volumes.
    label : str
        Human-readable identifier.
    h_exact, v_exact : callable, optional
        Closed-form ``h(v)`` and its inverse.  When absent, ``h`` is obtained
        by adaptive quadrature and inverted by safeguarded Newton.
    """

    def __init__(
        self,
        derivs: Callable[[float], Derivs],
        domain: Tuple[float, float],
        label: str,
        h_exact: Optional[Callable[[float], float]] = None,
        v_exact: Optional[Callable[[float], float]] = None,
        spec: Optional[dict] = None,
        discriminant_exact: Optional[Callable[[float], float]] = None,
    ):
        lo, hi = float(domain[0]), float(domain[1])
        if not (0.0 <= lo < hi):
            raise InvalidParameterError(f"bad domain {domain!r}")
        self._derivs = derivs
        self.domain = (lo, hi)
        self.label = label
        self._h_exact = h_exact
        self._v_exact = v_exact
        self._disc_exact = discriminant_exact
        self.spec = spec or {"kind": "custom", "label": label}
        # plain dict: single get/set are atomic under the GIL, so sharing the
        # cache between threads is safe (worst case a value is computed twice)
        self._h_cache: dict = {}

    def __repr__(self):
        return f"PressureLaw({self.label!r})"

    # -- evaluation -----------------------------------------------------
    def check(self, v: float) -> None:
        lo, hi = self.domain
        if not (lo < v < hi) or math.isnan(v):
            raise DomainError(f"v={v!r} outside domain ({lo!r}, {hi!r}) of {self.label}")

    def derivatives(self, v: float) -> Derivs:
        self.check(v)
        d = self._derivs(v)
        if __debug__:
            assert d[1] < 0.0 and d[2] > 0.0, (
                f"{self.label}: convexity/monotonicity violated at v={v!r}: "
                f"p'={d[1]!r}, p''={d[2]!r}"
            )
        return d

    def p(self, v: float) -> float:
        return self.derivatives(v)[0]

    def dp(self, v: float) -> float:
        return self.derivatives(v)[1]

    def d2p(self, v: float) -> float:
        return self.derivatives(v)[2]

    def d3p(self, v: float) -> float:
        return self.derivatives(v)[3]

    def d4p(self, v: float) -> float:
        return self.derivatives(v)[4]

    @property
    def has_closed_form_h(self) -> bool:
        return self._h_exact is not None

    def to_json(self) -> dict:
        return dict(self.spec)


# ---------------------------------------------------------------------------
# constructors

def gamma_law(gamma: float, window: Tuple[float, float] = (1e-10, 1e30)) -> PressureLaw:
    """Polytropic law ``p = v**(-gamma)`` with closed-form derivatives and h."""
    gamma = float(gamma)
    if not (gamma > 0.0) or not math.isfinite(gamma):
        raise InvalidParameterError(f"gamma must be positive, got {gamma!r}")
    g = gamma
    k1, k2, k3, k4 = -g, g * (g + 1), -g * (g + 1) * (g + 2), g * (g + 1) * (g + 2) * (g + 3)

    def derivs(v: float) -> Derivs:
        p = v ** (-g)
        return (p, k1 * p / v, k2 * p / v**2, k3 * p / v**3, k4 * p / v**4)

    sg = math.sqrt(g)
    if g == 1.0:
        def h_exact(v: float) -> float:
            return -math.log(v)

        def v_exact(h: float) -> float:
            return math.exp(-h)
    else:
        e = 0.5 * (1.0 - g)
        scale = 2.0 * sg / (g - 1.0)

        def h_exact(v: float) -> float:
            return scale * math.expm1(e * math.log(v))

        def v_exact(h: float) -> float:
            arg = h / scale
            if arg <= -1.0:
                raise RangeError(f"h={h!r} not attained by gamma-law (gamma={g})")
            return math.exp(math.log1p(arg) / e)

    # closed form keeps gamma=1 at exactly zero instead of round-off noise
    dcoef = g * g * (g + 1.0) * (g - 1.0)

    def disc(v: float) -> float:
        return dcoef * v ** (-2.0 * g - 4.0)

    label = f"gamma-law, gamma={g:g}"
    return PressureLaw(derivs, window, label, h_exact, v_exact,
                       spec={"kind": "gamma", "gamma": g}, discriminant_exact=disc)


def spline_law(knots: Sequence[Sequence[float]], degree: Optional[int] = None,
               check_points: int = 2001) -> PressureLaw:
    """Law interpolating tabulated ``(v, p)`` knots by a smooth spline.

    The spline degree defaults to 5 (so four derivatives exist) when there are
    enough knots, otherwise 3.  Derivatives are those of the spline itself.
    Convexity and monotonicity are checked on a dense grid.
    """
    arr = np.asarray(knots, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 4:
        raise InvalidParameterError("table law needs at least 4 knots of the form [v, p]")
    v, p = arr[:, 0], arr[:, 1]
    if np.any(np.diff(v) <= 0) or v[0] <= 0:
        raise InvalidParameterError("knot abscissae must be positive and increasing")
    if degree is None:
        degree = 5 if len(v) >= 6 else 3
    if degree not in (3, 5) or len(v) <= degree:
        raise InvalidParameterError(f"unsupported spline degree {degree} for {len(v)} knots")
    spl = interpolate.make_interp_spline(v, p, k=degree)
    # a cubic spline has a vanishing fourth derivative
    ders = [spl.derivative(n) if n <= degree else (lambda x, _z=np.zeros_like: _z(x))
            for n in range(1, 5)]

    def derivs(x: float) -> Derivs:
        return (float(spl(x)), *(float(d(x)) for d in ders))

    grid = np.linspace(v[0], v[-1], check_points)
    d1 = ders[0](grid)
    d2 = ders[1](grid)
    if np.any(d1 >= 0) or np.any(d2 <= 0):
        raise InvalidParameterError("tabulated law is not decreasing and convex on its knot range")
    if not (v[0] < 1.0 < v[-1]):
        raise InvalidParameterError("knot range must contain v=1 (reference point of h)")
    law = PressureLaw(derivs, (float(v[0]), float(v[-1])), f"table law ({len(v)} knots, degree {degree})",
                      spec={"kind": "table", "knots": arr.tolist()})
    return law


def law_from_json(obj: dict) -> PressureLaw:
    """Build a law from its scenario-file description."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidParameterError(f"law description must be an object with 'kind': {obj!r}")
    kind = obj["kind"]
    if kind == "gamma":
        if "gamma" not in obj:
            raise InvalidParameterError("gamma law needs a 'gamma' field")
        return gamma_law(float(obj["gamma"]))
    if kind == "table":
        knots = obj.get("knots")
        if isinstance(knots, dict):
            knots = list(zip(knots["v"], knots["p"]))
        if knots is None:
            raise InvalidParameterError("table law needs 'knots'")
        return spline_law(knots, degree=obj.get("degree"))
    raise InvalidParameterError(f"unknown law kind {kind!r}")


# ---------------------------------------------------------------------------
# derived scalars

def wave_speed(law: PressureLaw, v: float) -> float:
    """Characteristic speed magnitude c = sqrt(-p'(v))."""
    return math.sqrt(-law.derivatives(v)[1])


def _h_quad(law: PressureLaw, v: float, tol: float) -> float:
    # integrate in t = ln w so that very large or small v stay well scaled
    def f(t):
        w = math.exp(t)
        return math.sqrt(-law.derivatives(w)[1]) * w

    t0 = math.log(v)
    val, err = integrate.quad(f, t0, 0.0, epsabs=tol, epsrel=0.0, limit=500)
    if not (err <= tol) or not math.isfinite(val):
        raise NumericalFailureError(
            f"quadrature for h({v!r}) reached error estimate {err!r} > {tol!r}", estimate=err
        )
    return val


def h_of_v(law: PressureLaw, v: float, tol: Optional[float] = None) -> float:
    """h(v) = integral from v to 1 of sqrt(-p'); h(1) = 0, decreasing in v."""
    law.check(v)
    if law._h_exact is not None:
        return law._h_exact(v)
    key = (v, tol)
    hit = law._h_cache.get(key)
    if hit is not None:
        return hit
    if v == 1.0:
        val = 0.0
    else:
        val = _h_quad(law, v, QUAD_TOL if tol is None else tol)
    law._h_cache[key] = val
    return val


def h_of_v_quadrature(law: PressureLaw, v: float, tol: float = QUAD_TOL) -> float:
    """h(v) by quadrature even when a closed form exists (cross-check route)."""
    law.check(v)
    return 0.0 if v == 1.0 else _h_quad(law, v, tol)


def v_of_h(law: PressureLaw, h: float, tol: Optional[float] = None) -> float:
    """Inverse of ``h_of_v``; raises RangeError if h is not attained."""
    if not math.isfinite(h):
        raise RangeError(f"h={h!r} is not finite")
    if law._v_exact is not None:
        v = law._v_exact(h)
        try:
            law.check(v)
        except DomainError as exc:
            raise RangeError(f"h={h!r} maps outside the domain of {law.label}") from exc
        return v
    tol = INV_TOL if tol is None else tol
    lo, hi = law.domain
    # work in ln v; h is decreasing in v so g(t) = h - h(e^t) is increasing
    tlo = math.log(lo) if lo > 0 else -700.0
    thi = math.log(hi)
    margin = 1e-12 * max(1.0, abs(tlo), abs(thi))
    tlo, thi = tlo + margin, thi - margin

    def g(t):
        w = math.exp(t)
        return h - h_of_v(law, w), wave_speed(law, w) * w

    if h == 0.0:
        return 1.0
    if h > 0:
        # root at t < 0
        a, b = max(-1.0, tlo), 0.0
        while g(a)[0] > 0:
            if a <= tlo:
                raise RangeError(f"h={h!r} above the range of {law.label}")
            a, b = max(2 * a, tlo), a
    else:
        a, b = 0.0, min(1.0, thi)
        while g(b)[0] < 0:
            if b >= thi:
                raise RangeError(f"h={h!r} below the range of {law.label}")
            a, b = b, min(2 * b, thi)
    t = newton_bisect(g, a, b, xtol=1e-15, ftol=tol)
    return math.exp(t)


def j1(law: PressureLaw, v: float) -> float:
    """Cubic coefficient J1 = p''^2 / (96 (-p')^3)."""
    _, p1, p2, _, _ = law.derivatives(v)
    return p2 * p2 / (96.0 * (-p1) ** 3)


def j2(law: PressureLaw, v: float) -> float:
    """J2 = (1/32) p'' (p''^2/2 - p''' p'/3), the literal quartic coefficient.

    Evaluated as p'' D / 192 with D the Bakhvalov discriminant: the same
    expression, and it inherits the exact zero of D for gamma = 1.
    """
    return law.derivatives(v)[2] * bakhvalov_discriminant(law, v) / 192.0


def j2_blowup(law: PressureLaw, v: float) -> float:
    """Alternative normalization (1/32) p'' (3 p''^2 - 2 p' p'''), i.e. 6 * j2."""
    return law.derivatives(v)[2] * bakhvalov_discriminant(law, v) / 32.0


def j2_taylor(law: PressureLaw, v: float) -> float:
    """The actual a^4 coefficient of F(a, v): j2 * (-p')^(-9/2).

    Equals p''^3/(64 c^9) + p'' p'''/(96 c^7) with c the sound speed.
    """
    return j2(law, v) * (-law.derivatives(v)[1]) ** -4.5


def j2_normalized(law: PressureLaw, v: float, normalization: str = "taylor") -> float:
    """J2 under one of the normalizations ``"def"``, ``"blowup"``, ``"taylor"``."""
    if normalization == "def":
        return j2(law, v)
    if normalization == "blowup":
        return j2_blowup(law, v)
    if normalization == "taylor":
        return j2_taylor(law, v)
    raise InvalidParameterError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")


def bakhvalov_discriminant(law: PressureLaw, v: float) -> float:
    """D(v) = 3 p''^2 - 2 p' p'''; the Bakhvalov condition is D <= 0."""
    if law._disc_exact is not None:
        law.check(v)
        return law._disc_exact(v)
    _, p1, p2, p3, _ = law.derivatives(v)
    return 3.0 * p2 * p2 - 2.0 * p1 * p3


def bakhvalov_holds(law: PressureLaw, v: float) -> bool:
    return bakhvalov_discriminant(law, v) <= 0.0


def _refine_edge(law, a, b, xtol):
    """Bisect between a (D<=0) and b (D>0) down to width xtol."""
    pa = bakhvalov_discriminant(law, a) > 0
    while abs(b - a) > xtol:
        m = 0.5 * (a + b)
        if (bakhvalov_discriminant(law, m) > 0) == pa:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def find_violation_intervals(law: PressureLaw, window: Tuple[float, float], n: int = 1000,
                             xtol: float = 1e-10) -> list:
    """All maximal sub-intervals of ``window`` (on an n-point grid) where D > 0."""
    lo, hi = float(window[0]), float(window[1])
    if not (lo < hi):
        raise InvalidParameterError(f"empty window {window!r}")
    law.check(lo)
    law.check(hi)
    grid = np.linspace(lo, hi, n)
    pos = [bakhvalov_discriminant(law, float(x)) > 0 for x in grid]
    out = []
    i = 0
    while i < n:
        if not pos[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and pos[j + 1]:
            j += 1
        left = lo if i == 0 else _refine_edge(law, float(grid[i - 1]), float(grid[i]), xtol)
        right = hi if j == n - 1 else _refine_edge(law, float(grid[j + 1]), float(grid[j]), xtol)
        out.append((left, right))
        i = j + 1
    return out


def find_violation_interval(law: PressureLaw, window: Tuple[float, float], n: int = 1000,
                            xtol: float = 1e-10) -> Optional[Tuple[float, float]]:
    """The widest maximal interval inside ``window`` where D(v) > 0, or None."""
    runs = find_violation_intervals(law, window, n=n, xtol=xtol)
    if not runs:
        return None
    return max(runs, key=lambda iv: (iv[1] - iv[0], -iv[0]))
