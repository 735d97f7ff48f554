"""Exact Riemann solver for the p-system and interaction resolution.

The middle state is the intersection of the forward 1-family curve through
the left state with the backward 2-family curve through the right state.
The unknown is ``t = ln v_m``; the mismatch ``u1(v_m) - u2(v_m)`` is strictly
increasing, so a sign-changing bracket always exists when the intersection
lies in the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ._roots import newton_bisect
from .errors import DomainError, NumericalFailureError, TopologyError
from .pressure_law import PressureLaw, h_of_v, v_of_h, wave_speed
from .wave_curves import (
    CURVE_TOL,
    State,
    WaveFamily,
    WaveKind,
    char_speed,
    expected_kind,
    front_speed,
    hugoniot_radicand,
)

ROOT_TOL = 1e-11
CANCEL_TOL = 1e-13


@dataclass(frozen=True)
class Wave:
    """One outgoing wave of a Riemann problem."""

    family: WaveFamily
    kind: WaveKind
    left: State
    right: State
    strength: float
    speed: float
    fan: tuple  # characteristic speeds on the (left, right) sides

    @property
    def signed_a(self) -> float:
        return self.left.h - self.right.h


@dataclass(frozen=True)
class RiemannSolution:
    middle: State
    wave1: Wave
    wave2: Wave

    @property
    def waves(self) -> tuple:
        return (self.wave1, self.wave2)


def _u_from_left(law: PressureLaw, left: State, v: float, hv: float, simple: bool):
    """u and du/dv on the 1-family curve through ``left``."""
    if v >= left.v or simple:
        return left.u + left.h - hv, wave_speed(law, v)
    pl = law.p(left.v)
    pv, dpv = law.derivatives(v)[:2]
    q = (v - left.v) * (pl - pv)
    dq = (pl - pv) - (v - left.v) * dpv
    if q <= 0.0:
        return left.u, wave_speed(law, v)
    rq = math.sqrt(q)
    return left.u - rq, -dq / (2.0 * rq)


def _u_from_right(law: PressureLaw, right: State, v: float, hv: float, simple: bool):
    """u and du/dv of the state on the left of a 2-wave ending at ``right``."""
    if v >= right.v or simple:
        return right.u - right.h + hv, -wave_speed(law, v)
    pr = law.p(right.v)
    pv, dpv = law.derivatives(v)[:2]
    q = (right.v - v) * (pv - pr)
    dq = -(pv - pr) + (right.v - v) * dpv
    if q <= 0.0:
        return right.u, -wave_speed(law, v)
    rq = math.sqrt(q)
    return right.u + rq, dq / (2.0 * rq)


def _make_wave(law: PressureLaw, family: WaveFamily, left: State, right: State, simple: bool) -> Wave:
    kind = expected_kind(family, left.v, right.v, simple)
    if left.v == right.v:
        kind = WaveKind.RAREFACTION if simple else WaveKind.SHOCK
        speed = char_speed(law, family, left.v)
    else:
        speed = front_speed(law, family, kind, left, right)
    fan = (char_speed(law, family, left.v), char_speed(law, family, right.v))
    return Wave(family, kind, left, right, abs(left.h - right.h), speed, fan)


def solve(
    law: PressureLaw,
    left: State,
    right: State,
    simple: Sequence[bool] = (False, False),
    tol: Optional[float] = None,
) -> RiemannSolution:
    """Solve the Riemann problem (left, right).

    Parameters
    ----------
    simple : (bool, bool)
        Per family, resolve compressive waves on the integral curve
        (a compression front) instead of the shock curve.
    tol : float, optional
        Residual tolerance in u, relative to max(1, |u_left|, |u_right|);
        defaults to the module-level ROOT_TOL.
    """
    if tol is None:
        tol = ROOT_TOL
    s1, s2 = bool(simple[0]), bool(simple[1])
    if left.v == right.v and left.u == right.u:
        w1 = _make_wave(law, WaveFamily.FIRST, left, left, s1)
        w2 = _make_wave(law, WaveFamily.SECOND, left, right, s2)
        return RiemannSolution(left, w1, w2)
    if s1 and s2:
        # both waves on integral curves: the invariants give the middle state directly
        h_m = 0.5 * (left.s - right.r)
        middle = State(0.5 * (left.s + right.r), v_of_h(law, h_m), h_m)
        return RiemannSolution(
            middle,
            _make_wave(law, WaveFamily.FIRST, left, middle, True),
            _make_wave(law, WaveFamily.SECOND, middle, right, True),
        )

    def f(t: float):
        v = math.exp(t)
        hv = h_of_v(law, v)
        u1, d1 = _u_from_left(law, left, v, hv, s1)
        u2, d2 = _u_from_right(law, right, v, hv, s2)
        return u1 - u2, v * (d1 - d2)

    lo_dom, hi_dom = law.domain
    t_min = math.log(lo_dom) if lo_dom > 0 else -745.0
    t_max = math.log(hi_dom) if math.isfinite(hi_dom) else 709.0
    # two-rarefaction guess: exact when both waves are simple
    h0 = 0.5 * (left.s - right.r)
    try:
        t0 = math.log(v_of_h(law, h0))
    except (DomainError, ValueError):
        t0 = 0.5 * (math.log(left.v) + math.log(right.v))
    t0 = min(max(t0, t_min + 1e-9), t_max - 1e-9)
    f0 = f(t0)[0]
    lo, hi = t0, t0
    step = 0.25
    if f0 > 0:
        while True:
            lo = max(t0 - step, t_min + 1e-12)
            if f(lo)[0] <= 0:
                break
            if lo <= t_min + 1e-12:
                raise DomainError(
                    f"Riemann problem has no middle state with v > {lo_dom!r} "
                    f"(bracket [{math.exp(lo)!r}, {math.exp(t0)!r}])"
                )
            hi, step = lo, step * 2
    elif f0 < 0:
        while True:
            hi = min(t0 + step, t_max - 1e-12)
            if f(hi)[0] >= 0:
                break
            if hi >= t_max - 1e-12:
                raise DomainError(
                    f"Riemann problem has no middle state with v < {hi_dom!r} "
                    f"(bracket [{math.exp(t0)!r}, {math.exp(hi)!r}])"
                )
            lo, step = hi, step * 2
    scale = max(1.0, abs(left.u), abs(right.u))
    if f0 == 0.0:
        t = t0
    else:
        t = newton_bisect(f, lo, hi, x0=t0, xtol=4e-16 * max(1.0, abs(t0)),
                          ftol=0.0, steptol=1e-15 * max(1.0, abs(t0)))
    v_m = math.exp(t)
    h_m = h_of_v(law, v_m)
    u1, _ = _u_from_left(law, left, v_m, h_m, s1)
    u2, _ = _u_from_right(law, right, v_m, h_m, s2)
    if abs(u1 - u2) > tol * scale:
        raise NumericalFailureError(
            f"Riemann iteration stalled with mismatch {abs(u1 - u2)!r}", estimate=abs(u1 - u2)
        )
    # take u from the side whose base velocity is smaller in magnitude: the
    # absolute rounding error of the curve evaluation scales with it
    u_m = u1 if abs(left.u) <= abs(right.u) else u2
    if v_m == left.v:
        middle = State(u_m, left.v, left.h)
    elif v_m == right.v:
        middle = State(u_m, right.v, right.h)
    else:
        middle = State(u_m, v_m, h_m)
    w1 = _make_wave(law, WaveFamily.FIRST, left, middle, s1)
    w2 = _make_wave(law, WaveFamily.SECOND, middle, right, s2)
    return RiemannSolution(middle, w1, w2)


def traversal_residual(law: PressureLaw, left: State, right: State, sol: RiemannSolution) -> float:
    """max(|du|, |dv|/v) after walking left -> wave1 -> middle -> wave2 -> right."""
    from .wave_curves import curve_u

    w1, w2 = sol.wave1, sol.wave2
    u_mid = curve_u(law, w1.kind, 1, left, sol.middle.v)
    mid = State(u_mid, sol.middle.v, sol.middle.h)
    u_r = curve_u(law, w2.kind, 2, mid, right.v)
    return max(abs(u_mid - sol.middle.u), abs(u_r - right.u))


def check_chain(fronts: Sequence, tol: float = CURVE_TOL) -> None:
    """Raise TopologyError unless consecutive fronts share their inner state."""
    for a, b in zip(fronts, fronts[1:]):
        scale = max(1.0, abs(a.right.u))
        if abs(a.right.u - b.left.u) > tol * scale or abs(a.right.v - b.left.v) > tol * max(1.0, a.right.v):
            raise TopologyError(
                f"inner states disagree: ({a.right.u!r}, {a.right.v!r}) vs ({b.left.u!r}, {b.left.v!r})"
            )


def resolve_interaction(
    law: PressureLaw,
    incoming: Sequence,
    simple: Sequence[bool] = (False, False),
    cancel_tol: float = CANCEL_TOL,
) -> list:
    """Outgoing waves of a collision of ``incoming`` fronts (ordered in x).

    Any number of fronts is handled as the Riemann problem of the outermost
    states.  Waves weaker than ``cancel_tol`` are dropped.
    """
    if len(incoming) < 2:
        raise TopologyError("an interaction needs at least two fronts")
    check_chain(incoming)
    sol = solve(law, incoming[0].left, incoming[-1].right, simple)
    return [w for w in sol.waves if w.strength >= cancel_tol]
