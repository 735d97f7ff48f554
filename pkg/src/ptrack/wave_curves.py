"""States, wave families, and the rarefaction / compression / shock curves.

Conventions: a wave connects a left state (u_l, v_l) to a right state
(u_r, v_r).  Family 1 travels with speed -c, family 2 with +c.  Along a
simple wave of family 1 the invariant s = u + h is constant, along family 2
the invariant r = u - h.  Strength is |h_l - h_r|.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import BranchMismatchError, ConsistencyError, EntropyError, InvalidParameterError
from .pressure_law import (
    PressureLaw,
    h_of_v,
    j1,
    j2_normalized,
    v_of_h,
    wave_speed,
)

CURVE_TOL = 1e-9


class WaveFamily(enum.IntEnum):
    FIRST = 1   # backward, speed -c
    SECOND = 2  # forward, speed +c


class WaveKind(str, enum.Enum):
    SHOCK = "shock"
    RAREFACTION = "rarefaction"
    COMPRESSION = "compression"


@dataclass(frozen=True)
class State:
    """Constant gas state; ``h`` is stored so that it is never recomputed."""

    u: float
    v: float
    h: float

    @property
    def s(self) -> float:
        return self.u + self.h

    @property
    def r(self) -> float:
        return self.u - self.h


def make_state(law: PressureLaw, u: float, v: float) -> State:
    return State(float(u), float(v), h_of_v(law, v))


def state_from_uh(law: PressureLaw, u: float, h: float) -> State:
    """State with prescribed (u, h); v is recovered by inverting h."""
    return State(float(u), v_of_h(law, h), float(h))


def char_speed(law: PressureLaw, family: int, v: float) -> float:
    c = wave_speed(law, v)
    return -c if family == WaveFamily.FIRST else c


# ---------------------------------------------------------------------------
# strength coordinate

def a_of(law: PressureLaw, v: float, v_bar: float) -> float:
    """a(v, v_bar) = h(v_bar) - h(v); increasing in v."""
    return h_of_v(law, v_bar) - h_of_v(law, v)


def v_of_a(law: PressureLaw, a: float, v_bar: float) -> float:
    return v_of_h(law, h_of_v(law, v_bar) - a)


def hugoniot_radicand(law: PressureLaw, v: float, v_bar: float) -> float:
    """(v - v_bar)(p(v_bar) - p(v)), non-negative for a decreasing pressure."""
    return (v - v_bar) * (law.p(v_bar) - law.p(v))


def F(law: PressureLaw, a: float, v_bar: float) -> float:
    """Velocity jump sqrt((v - v_bar)(p(v_bar) - p(v))) at v = v(a, v_bar)."""
    v = v_of_a(law, a, v_bar)
    q = hugoniot_radicand(law, v, v_bar)
    if q < 0.0:
        if q < -1e-14:
            raise ConsistencyError(f"negative Rankine-Hugoniot radicand {q!r}")
        q = 0.0
    return math.sqrt(q)


def v_taylor(law: PressureLaw, a: float, v_bar: float) -> float:
    """Cubic expansion of v(a, v_bar) - v_bar in the strength coordinate.

    The constant term is zero: v(0, v_bar) = v_bar.
    """
    _, p1, p2, p3, _ = law.derivatives(v_bar)
    m = -p1
    return (m ** -0.5 * a + 0.25 * p2 / (m * m) * a * a
            + (p2 * p2 - 0.5 * p1 * p3) / 6.0 * m ** -3.5 * a ** 3)


def F_taylor(law: PressureLaw, a: float, v_bar: float, order: int = 4,
             normalization: str = "taylor") -> float:
    """Truncated expansion sign(a) a (1 + J1 a^2 [+ J2 a^3]).

    ``normalization`` selects which J2 enters the quartic term; ``"taylor"``
    is the coefficient that makes the remainder O(a^5).
    """
    if order not in (3, 4):
        raise InvalidParameterError(f"order must be 3 or 4, got {order!r}")
    if a == 0.0:
        return 0.0
    inner = 1.0 + j1(law, v_bar) * a * a
    if order == 4:
        inner += j2_normalized(law, v_bar, normalization) * a ** 3
    return math.copysign(1.0, a) * a * inner


# ---------------------------------------------------------------------------
# curves through a left state

def integral_u(law: PressureLaw, family: int, left: State, v: float, h: float | None = None) -> float:
    """u on the integral (rarefaction/compression) curve of ``family`` through ``left``."""
    hv = h_of_v(law, v) if h is None else h
    if family == WaveFamily.FIRST:
        return left.u + left.h - hv
    return left.u + hv - left.h


def shock_u(law: PressureLaw, left: State, v: float) -> float:
    """u on the admissible shock branch through ``left`` (both families)."""
    q = hugoniot_radicand(law, v, left.v)
    return left.u - math.sqrt(max(q, 0.0))


_BRANCH_SIGN = {
    # (family, kind) -> required sign of v_right - v_left
    (WaveFamily.FIRST, WaveKind.RAREFACTION): 1,
    (WaveFamily.FIRST, WaveKind.COMPRESSION): -1,
    (WaveFamily.FIRST, WaveKind.SHOCK): -1,
    (WaveFamily.SECOND, WaveKind.RAREFACTION): -1,
    (WaveFamily.SECOND, WaveKind.COMPRESSION): 1,
    (WaveFamily.SECOND, WaveKind.SHOCK): 1,
}


def expected_kind(family: int, v_left: float, v_right: float, simple: bool = False) -> WaveKind:
    """Kind of the wave of ``family`` joining v_left to v_right."""
    grows = v_right > v_left
    expanding = grows if family == WaveFamily.FIRST else not grows
    if expanding:
        return WaveKind.RAREFACTION
    return WaveKind.COMPRESSION if simple else WaveKind.SHOCK


def curve_u(law: PressureLaw, kind: WaveKind, family: int, left: State, v_right: float) -> float:
    """u_right on the named branch through ``left``.

    Raises BranchMismatchError when the direction of v_right - v_left does
    not belong to the requested (kind, family) branch.
    """
    kind = WaveKind(kind)
    family = WaveFamily(family)
    if v_right == left.v:
        return left.u
    need = _BRANCH_SIGN[(family, kind)]
    have = 1 if v_right > left.v else -1
    if need != have:
        rel = ">" if need > 0 else "<"
        raise BranchMismatchError(
            f"{family.name.lower()}-family {kind.value} requires v_right {rel} v_left "
            f"(got v_right={v_right!r}, v_left={left.v!r})"
        )
    if kind == WaveKind.SHOCK:
        return shock_u(law, left, v_right)
    return integral_u(law, family, left, v_right)


def _scale(*xs: float) -> float:
    return max(1.0, *(abs(x) for x in xs))


def shock_speed(law: PressureLaw, left: State, right: State, family: int,
                check: bool = True, tol: float = CURVE_TOL) -> float:
    """Rankine-Hugoniot speed of a shock of ``family``.

    With ``check`` the pair must lie on the admissible branch (within a
    tolerance scaled by max(1, |u|)) and satisfy the Lax inequalities.
    """
    family = WaveFamily(family)
    dv = right.v - left.v
    if dv == 0.0:
        raise ConsistencyError("shock with zero jump in v")
    pl, pr = law.p(left.v), law.p(right.v)
    sig = math.sqrt(-(pr - pl) / dv)
    if family == WaveFamily.FIRST:
        sig = -sig
    if check:
        try:
            u_on = curve_u(law, WaveKind.SHOCK, family, left, right.v)
        except BranchMismatchError as exc:
            raise EntropyError(str(exc)) from exc
        if abs(u_on - right.u) > tol * _scale(left.u, right.u):
            raise ConsistencyError(
                f"states not on the {family.name.lower()}-shock curve: |du|={abs(u_on - right.u):.3e}"
            )
        cl, cr = wave_speed(law, left.v), wave_speed(law, right.v)
        lo, hi = (cl, cr) if family == WaveFamily.FIRST else (cr, cl)
        slack = 1e-12 * hi
        if not (lo - slack <= abs(sig) <= hi + slack):
            raise EntropyError(f"Lax condition fails: {lo!r} < |sigma|={abs(sig)!r} < {hi!r}")
    return sig


def rh_residuals(law: PressureLaw, left: State, right: State, sigma: float) -> tuple[float, float]:
    """(sigma [u] - [p], sigma [v] + [u]) for a candidate shock."""
    du = right.u - left.u
    dv = right.v - left.v
    dp = law.p(right.v) - law.p(left.v)
    return sigma * du - dp, sigma * dv + du


def front_speed(law: PressureLaw, family: int, kind: WaveKind, left: State, right: State) -> float:
    """Speed policy: RH speed for shocks, mean characteristic speed otherwise."""
    if kind == WaveKind.SHOCK:
        return shock_speed(law, left, right, family, check=False)
    return 0.5 * (char_speed(law, family, left.v) + char_speed(law, family, right.v))
