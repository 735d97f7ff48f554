"""Periodic interaction patterns, the small-wave train, and BV-growth runs.

Geometry (x increasing to the right, one period)::

    U_l | S1 | A2 | inner 2-shock | C | inner 1-shock | A1 | S2 | U_r

The inner shocks cross and leave D between them; each then merges into the
large shock of its own family, which reflects a rarefaction (B1 -> D on the
left, D -> B2 on the right).  The two rarefactions cross and leave C; when
they reach the large shocks the reflected waves are the inner shocks again.
U_l is the unique state whose 1-shock curve contains both B1 and A2, U_r the
mirror image for B2 and A1.

The asymmetric variant splits the rarefaction reflected at S1 into a
trailing piece B1 -> E and a small leading piece E -> D.  The leading piece
overtakes the inner 2-shock and weakens it by about ``delta`` before it
reaches S2, so B2 is lowered in h and S2 becomes a stronger reflector.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field, replace
from typing import List, Optional, Sequence, Tuple

from ._roots import newton_bisect
from .engine import (
    CollisionEvent,
    FrontField,
    SimulationTrace,
    WaveFront,
    min_specific_volume,
    next_collision,
    resolve_event,
    total_strength,
)
from .errors import (
    ConstructionError,
    DomainError,
    InvalidParameterError,
    LemmaPreconditionError,
    NumericalFailureError,
    RangeError,
    SeedingError,
)
from .pressure_law import (
    PressureLaw,
    find_violation_interval,
    h_of_v,
    j2_taylor,
    law_from_json,
    v_of_h,
    wave_speed,
)
from .riemann import solve
from .wave_curves import State, WaveFamily, WaveKind, hugoniot_radicand, make_state, state_from_uh

LEMMA_TOL = 1e-10


# ---------------------------------------------------------------------------
# left boundary state

def _mirror(st: State) -> State:
    return State(-st.u, st.v, st.h)


def _sqrt_pos(x: float) -> float:
    return math.sqrt(x) if x > 0.0 else 0.0


def lemma_G(law: PressureLaw, b1: State, a2: State, v: float) -> float:
    """G(v) = sqrt((p1 - p)(v - v1)) - sqrt((p2 - p)(v - v2)), cancellation-free."""
    p1, p2, p = law.p(b1.v), law.p(a2.v), law.p(v)
    ra = _sqrt_pos((p1 - p) * (v - b1.v))
    rb = _sqrt_pos((p2 - p) * (v - a2.v))
    num = (p1 - p2) * v - p1 * b1.v + p2 * a2.v + p * (b1.v - a2.v)
    den = ra + rb
    return num / den if den > 0.0 else 0.0


def _lemma_dG(law: PressureLaw, b1: State, a2: State, v: float) -> float:
    p, dp = law.derivatives(v)[:2]
    out = 0.0
    for st in (b1, a2):
        pa = law.p(st.v)
        q = (pa - p) * (v - st.v)
        if q <= 0.0:
            return math.inf
        term = (-dp * (v - st.v) + pa - p) / (2.0 * math.sqrt(q))
        out += term if st is b1 else -term
    return out


def lemma_hstar(law: PressureLaw, b1: State, u_target: float) -> float:
    """h of the state on the 1-shock curve with right state ``b1`` and u = u_target."""
    if u_target <= b1.u:
        raise LemmaPreconditionError("target velocity must exceed u(B1)")
    p1 = law.p(b1.v)

    def f(t):
        v = math.exp(t)
        p, dp = law.derivatives(v)[:2]
        q = (v - b1.v) * (p1 - p)
        rq = math.sqrt(max(q, 0.0))
        dq = (p1 - p) - (v - b1.v) * dp
        return b1.u + rq - u_target, v * dq / (2.0 * rq) if rq > 0 else math.inf

    lo = math.log(b1.v)
    hi = lo + 0.5
    hi_dom = math.log(law.domain[1])
    while f(hi)[0] < 0.0:
        if hi >= hi_dom:
            raise DomainError("no state on the 1-shock curve reaches the target velocity")
        lo, hi = hi, min(hi + 2.0 * (hi - lo + 0.5), hi_dom - 1e-12)
    t = newton_bisect(f, lo, hi, steptol=1e-15 * max(1.0, abs(hi)))
    return h_of_v(law, math.exp(t))


def check_lemma_hypotheses(law: PressureLaw, b1: State, a2: State) -> None:
    """Raise LemmaPreconditionError unless hypotheses (i) and (ii) hold."""
    if not (b1.u < a2.u and b1.h > a2.h):
        raise LemmaPreconditionError(
            f"need u1 < u2 and h1 > h2, got B1=({b1.u!r}, {b1.h!r}), A2=({a2.u!r}, {a2.h!r})"
        )
    # (ii) h2* < h2  <=>  G(v2) < u2 - u1
    g2 = math.sqrt(max((law.p(b1.v) - law.p(a2.v)) * (a2.v - b1.v), 0.0))
    if not g2 < a2.u - b1.u:
        raise LemmaPreconditionError(
            f"hypothesis (ii) fails: G(v2)={g2!r} >= u2 - u1={a2.u - b1.u!r}"
        )


def solve_left_state(law: PressureLaw, b1: State, a2: State) -> State:
    """State U_l whose 1-shock curve passes through both ``b1`` and ``a2``.

    Solves G(v_l) = u2 - u1 on (v2, v_max) by bracketing upward in log v and
    safeguarded Newton; then u_l = u1 + sqrt((p1 - p_l)(v_l - v1)).
    """
    check_lemma_hypotheses(law, b1, a2)
    target = a2.u - b1.u
    if abs(lemma_G(law, b1, a2, a2.v) - target) == 0.0:
        return a2

    def f(t):
        v = math.exp(t)
        return lemma_G(law, b1, a2, v) - target, v * _lemma_dG(law, b1, a2, v)

    t_max = math.log(law.domain[1])
    lo = math.log(a2.v)
    hi = lo
    step = 0.5
    while True:
        hi = min(hi + step, t_max - 1e-12)
        if f(hi)[0] > 0.0:
            break
        if hi >= t_max - 1e-12:
            raise DomainError(
                f"G stays below u2 - u1 = {target!r} up to v = {law.domain[1]!r}"
            )
        lo = hi
        step *= 2.0
    t = newton_bisect(f, lo, hi, steptol=1e-15 * max(1.0, abs(hi)), xtol=1e-15 * max(1.0, abs(hi)))
    v_l = math.exp(t)
    u_l = b1.u + math.sqrt((law.p(b1.v) - law.p(v_l)) * (v_l - b1.v))
    return State(u_l, v_l, h_of_v(law, v_l))


def lemma_residuals(law: PressureLaw, ul: State, b1: State, a2: State) -> Tuple[float, float]:
    """Residuals of the two shock relations u_l - u_i = sqrt((p_i - p_l)(v_l - v_i))."""
    r1 = ul.u - b1.u - math.sqrt(max((law.p(b1.v) - law.p(ul.v)) * (ul.v - b1.v), 0.0))
    # second relation written as (u_l - u1) - (u2 - u1) - sqrt(...) = r1 + G - (u2 - u1)
    r2 = r1 + lemma_G(law, b1, a2, ul.v) - (a2.u - b1.u)
    return r1, r2


def solve_right_state(law: PressureLaw, b2: State, a1: State) -> State:
    """Mirror image of ``solve_left_state`` for the 2-shock curve into U_r."""
    return _mirror(solve_left_state(law, _mirror(b2), _mirror(a1)))


# ---------------------------------------------------------------------------
# pattern specification

PATTERNS = ("symmetric", "asymmetric")
SECANT_TOL = 1e-17
ASYM_RELATION_TOL = 1e-10


@dataclass
class PatternSpec:
    """Parameters of a periodic four-front pattern and its small waves.

    Parameters
    ----------
    law : PressureLaw
    v_c : float
        Specific volume of the centre state C.
    s_inner : float
        h-strength of the two inner shocks A2 -> C and C -> A1.
    pattern : {"symmetric", "asymmetric"}
    split : float, optional
        Asymmetric patterns only: the fraction of the symmetric h-gap
        between B2 and A1 removed by the split rarefaction piece.  0 gives
        the symmetric pattern.  Defaults to ``1 - min(s_inner, 0.5)``.
    r, s_bar, r_bar : float, optional
        Alternative asymmetry parameters in the (r, s) form; ``r`` maps to
        ``split = (s - r) / (k s^4)`` with ``s = s_inner``, and ``r_bar``,
        ``s_bar`` must satisfy ``r - s = r_bar - s_bar``.
    eps : float
        Scale of the train of small pairs (largest pair is eps/2).
    pairs : int
        Number of train pairs K.
    probe_eps : float, optional
        Strength of a single tracked 1-rarefaction probe.
    positions : sequence of 4 floats, optional
        x of S1, inner 2-shock, inner 1-shock, S2.
    rarefaction_weight : float
        Speed policy for non-shock fronts (see FrontField).
    window : (float, float), optional
        Search window for the Bakhvalov-violation interval; defaults to
        (v_c / 10, 10 v_c).
    """

    law: PressureLaw
    v_c: float = 1.0
    s_inner: float = 0.1
    pattern: str = "symmetric"
    split: Optional[float] = None
    r: Optional[float] = None
    s_bar: Optional[float] = None
    r_bar: Optional[float] = None
    eps: float = 1e-3
    pairs: int = 0
    probe_eps: Optional[float] = None
    positions: Optional[Sequence[float]] = None
    rarefaction_weight: float = 0.5
    window: Optional[Tuple[float, float]] = None
    train_center: Optional[float] = None
    train_span: float = 0.05
    train_family: int = 2

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise InvalidParameterError(f"pattern must be one of {PATTERNS}, got {self.pattern!r}")
        if not (0.0 < self.s_inner <= 0.5):
            raise InvalidParameterError(f"s_inner must lie in (0, 0.5], got {self.s_inner!r}")
        if not (self.eps > 0.0):
            raise InvalidParameterError(f"eps must be positive, got {self.eps!r}")
        if self.pairs < 0:
            raise InvalidParameterError(f"pairs must be non-negative, got {self.pairs!r}")
        if self.positions is not None and len(self.positions) != 4:
            raise InvalidParameterError("positions needs four entries (S1, inner 2-shock, inner 1-shock, S2)")

    def split_fraction(self) -> float:
        """Resolved split fraction (0 for symmetric patterns)."""
        if self.pattern == "symmetric":
            return 0.0
        if self.r is not None:
            lam = split_from_offsets(self.law, self.s_inner, self.r, self.s_bar, self.r_bar, self.v_c)
        elif self.split is not None:
            lam = float(self.split)
        else:
            lam = 1.0 - min(self.s_inner, 0.5)
        if not (0.0 <= lam < 1.0):
            raise InvalidParameterError(f"split fraction must lie in [0, 1), got {lam!r}")
        return lam

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in ("v_c", "s_inner", "pattern", "split", "r", "s_bar",
                                             "r_bar", "eps", "pairs", "probe_eps",
                                             "rarefaction_weight")}
        out["law"] = self.law.to_json()
        out["positions"] = list(self.positions) if self.positions is not None else None
        out["window"] = list(self.window) if self.window is not None else None
        return out


def split_from_offsets(law: PressureLaw, s: float, r: float, s_bar: Optional[float] = None,
                       r_bar: Optional[float] = None, v_c: float = 1.0) -> float:
    """Split fraction equivalent to right-shock offsets (r, s).

    ``r = s`` is the symmetric pattern and ``r = s - k s^4`` (k the quartic
    coefficient of the h jump) flattens the right shock chord to o(s^3),
    which corresponds to a split fraction of 1.
    """
    from .interaction_lab import quartic_h_coefficient

    if (s_bar is None) != (r_bar is None):
        raise InvalidParameterError("give both s_bar and r_bar or neither")
    if s_bar is not None and abs((r - s) - (r_bar - s_bar)) > ASYM_RELATION_TOL:
        raise InvalidParameterError(
            f"offsets inconsistent: r - s = {r - s!r} but r_bar - s_bar = {r_bar - s_bar!r}"
        )
    k = quartic_h_coefficient(law, v_c)
    return (s - r) / (k * s ** 4)


# ---------------------------------------------------------------------------
# states of the pattern

@dataclass(frozen=True)
class PatternStates:
    """Constant states of one period, plus the split size ``delta``."""

    C: State
    A1: State
    A2: State
    D: State
    B1: State
    B2: State
    U_l: State
    U_r: State
    delta: float
    split: float
    gap_symmetric: float  # h(B2) - h(A1) of the symmetric pattern

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("C", "A1", "A2", "D", "B1", "B2", "U_l", "U_r")}


def _diamond(law: PressureLaw, v_c: float, s: float):
    C = make_state(law, 0.0, v_c)
    hA = C.h + s
    vA = v_of_h(law, hA)
    q = math.sqrt(hugoniot_radicand(law, v_c, vA))
    A2 = State(C.u + q, vA, hA)
    A1 = State(C.u - q, vA, hA)
    D = solve(law, A2, A1).middle
    return C, A1, A2, D


def _corner(law: PressureLaw, s_inv: float, r_inv: float) -> State:
    """State with Riemann invariants (s, r)."""
    return state_from_uh(law, 0.5 * (s_inv + r_inv), 0.5 * (s_inv - r_inv))


def _split_state(law: PressureLaw, right: State, delta: float) -> State:
    """State on the 2-rarefaction line of ``right`` with h lowered by ``delta``."""
    h = right.h - delta
    return state_from_uh(law, right.r + h, h)


def _b2_after_split(law: PressureLaw, C: State, A1: State, D: State, delta: float) -> State:
    E = _split_state(law, D, delta)
    # the leading piece E -> D overtakes the inner 2-shock D -> A1
    E2 = solve(law, E, A1, simple=(True, False)).middle
    return _corner(law, E2.s, C.r)


def pattern_states(law: PressureLaw, v_c: float, s: float, split: float = 0.0) -> PatternStates:
    """Construct every constant state of the pattern.

    The split size ``delta`` is found by a secant iteration so that
    h(B2) - h(A1) equals ``(1 - split)`` times its symmetric value.
    """
    C, A1, A2, D = _diamond(law, v_c, s)
    B1 = _corner(law, C.s, D.r)
    B2 = _corner(law, D.s, C.r)
    gap = B2.h - A1.h
    if not (B1.h > A2.h and gap > 0.0):
        raise ConstructionError(
            f"corner states do not rise above the diamond (h(B1)-h(A2)={B1.h - A2.h!r}); "
            "the pattern needs J2 > 0"
        )
    delta = 0.0
    if split > 0.0:
        target = (1.0 - split) * gap

        def f(d):
            return _b2_after_split(law, C, A1, D, d).h - A1.h - target

        d0, d1 = 0.0, split * gap
        f0, f1 = f(d0), f(d1)
        for _ in range(60):
            if f1 == f0 or abs(f1) < SECANT_TOL:
                break
            d0, f0, d1 = d1, f1, d1 - f1 * (d1 - d0) / (f1 - f0)
            f1 = f(d1)
        if abs(f1) > 1e-14:
            raise NumericalFailureError(f"split secant stalled at residual {f1!r}", estimate=abs(f1))
        delta = d1
        B2 = _b2_after_split(law, C, A1, D, delta)
    U_l = solve_left_state(law, B1, A2)
    U_r = solve_right_state(law, B2, A1)
    return PatternStates(C, A1, A2, D, B1, B2, U_l, U_r, delta, split, gap)


def violation_bounds(spec: PatternSpec) -> Tuple[float, float]:
    """(v_L, v_U) around v_c; ConstructionError when the law has none there."""
    law = spec.law
    window = spec.window or (spec.v_c / 10.0, spec.v_c * 10.0)
    iv = find_violation_interval(law, window)
    if iv is None:
        raise ConstructionError(f"{law.label}: Bakhvalov condition holds on {window}, no pattern exists")
    if not (iv[0] < spec.v_c < iv[1]):
        raise ConstructionError(f"v_c={spec.v_c!r} outside the violation interval {iv}")
    return iv


# ---------------------------------------------------------------------------
# fields

class PatternField(FrontField):
    """FrontField of a constructed pattern, carrying its states and hooks."""

    spec: PatternSpec
    design: PatternStates
    bounds: Tuple[float, float]
    hooks: list

    def diamond_states_inside(self) -> bool:
        lo, hi = self.bounds
        ext = (self.design.U_l, self.design.U_r)
        return all(lo < st.v < hi for st in self.states() if st not in ext)


def _split_hook(delta: float):
    """Split the 2-rarefaction reflected when the inner 1-shock merges into S1."""

    def hook(fld: FrontField, event, incoming, outgoing):
        if not any(f.tag == "S1" for f in incoming):
            return
        if not any(f.tag == "I1" and f.family == WaveFamily.FIRST and f.kind == WaveKind.SHOCK
                   for f in incoming):
            return
        for k, fr in enumerate(fld.fronts):
            if fr in outgoing and fr.tag == "I1" and fr.family == WaveFamily.SECOND \
                    and fr.kind == WaveKind.RAREFACTION:
                mid = _split_state(fld.law, fr.right, delta)
                trailing = fld.make_front(2, WaveKind.RAREFACTION, fr.x, fr.left, mid,
                                          fr.role, fr.tag, t_ref=fr.t_ref)
                leading = fld.make_front(2, WaveKind.RAREFACTION, fr.x, mid, fr.right,
                                         fr.role, "lead", t_ref=fr.t_ref)
                fld.fronts[k:k + 1] = [trailing, leading]
                fld.invalidate()
                return
        raise ConstructionError(f"no reflected 2-rarefaction to split at t={fld.t!r}")

    return hook


def _speed_gap(law: PressureLaw, st: PatternStates) -> float:
    """Relative closing speed of the leading split piece on the inner 2-shock."""
    from .wave_curves import front_speed

    E = _split_state(law, st.D, st.delta)
    lead = 0.5 * (wave_speed(law, E.v) + wave_speed(law, st.D.v))
    shock = front_speed(law, 2, WaveKind.SHOCK, st.D, st.A1)
    return (lead - shock) / wave_speed(law, st.C.v)


def default_positions(spec: PatternSpec, st: PatternStates) -> List[float]:
    if spec.positions is not None:
        return [float(x) for x in spec.positions]
    if st.delta == 0.0:
        return [-2.0, -1.0, 1.0, 2.0]
    # inner shocks cross close to S1 so that the leading split piece
    # overtakes the inner 2-shock about a tenth of the field from S1; the
    # meeting point drifts towards S2 by O(s) per period
    d = min(0.114 * _speed_gap(spec.law, st), 0.2)
    return [-2.0, -2.0 + 0.5 * d, -2.0 + 1.5 * d, 2.0]


def _build(spec: PatternSpec) -> PatternField:
    law = spec.law
    bounds = violation_bounds(spec)
    st = pattern_states(law, spec.v_c, spec.s_inner, spec.split_fraction())
    for name, s in st.as_dict().items():
        if name not in ("U_l", "U_r") and not (bounds[0] < s.v < bounds[1]):
            raise ConstructionError(f"state {name} (v={s.v!r}) leaves the violation interval {bounds}")
    x = default_positions(spec, st)
    if not (x[0] < x[1] < x[2] < x[3]):
        raise InvalidParameterError(f"positions must increase, got {x}")
    fld = PatternField(law, st.U_l, rarefaction_weight=spec.rarefaction_weight)
    fld.spec, fld.design, fld.bounds = spec, st, bounds
    fld.set_fronts([
        fld.make_front(1, WaveKind.SHOCK, x[0], st.U_l, st.A2, "large", "S1"),
        fld.make_front(2, WaveKind.SHOCK, x[1], st.A2, st.C, "inner", "I2"),
        fld.make_front(1, WaveKind.SHOCK, x[2], st.C, st.A1, "inner", "I1"),
        fld.make_front(2, WaveKind.SHOCK, x[3], st.A1, st.U_r, "large", "S2"),
    ])
    fld.hooks = [_split_hook(st.delta)] if st.delta > 0.0 else []
    return fld


def build_symmetric_pattern(spec: PatternSpec) -> PatternField:
    """Four-front pattern whose main strengths recur after every period."""
    if spec.pattern != "symmetric":
        spec = replace(spec, pattern="symmetric")
    return _build(spec)


def build_asymmetric_pattern(spec: PatternSpec) -> PatternField:
    """Pattern whose reflected rarefaction is split so that S2 reflects more strongly."""
    if spec.pattern != "asymmetric":
        spec = replace(spec, pattern="asymmetric")
    return _build(spec)


def build_pattern(spec: PatternSpec) -> PatternField:
    return build_asymmetric_pattern(spec) if spec.pattern == "asymmetric" else build_symmetric_pattern(spec)


# ---------------------------------------------------------------------------
# small waves

def _region_a1(fld: PatternField) -> Tuple[int, float, float]:
    """Index of the inner 1-shock and the x-extent of region A1 at fld.t."""
    i1 = [k for k, f in enumerate(fld.fronts) if f.tag == "I1"]
    s2 = [k for k, f in enumerate(fld.fronts) if f.tag == "S2"]
    if len(i1) != 1 or len(s2) != 1:
        raise SeedingError("small waves are seeded into a freshly built pattern only")
    k = i1[0]
    if fld.fronts[k + 1].tag != "S2" and fld.fronts[k + 1].role not in ("probe", "train"):
        raise SeedingError("region between the inner 1-shock and S2 is not clean")
    return k, fld.fronts[k].position(fld.t), fld.fronts[s2[0]].position(fld.t)


def _check_inside(fld: PatternField, states: Sequence[State]) -> None:
    lo, hi = fld.bounds
    for st in states:
        if not (lo < st.v < hi):
            raise SeedingError(f"small-wave state v={st.v!r} leaves the violation interval ({lo}, {hi})")


def _raised_state(law: PressureLaw, base: State, eps: float) -> State:
    """State on the 1-integral line of ``base`` with h raised by eps."""
    h = base.h + eps
    return _seed_state(law, base.s - h, h)


def _seed_state(law: PressureLaw, u: float, h: float) -> State:
    try:
        return state_from_uh(law, u, h)
    except RangeError as exc:
        raise SeedingError(f"small-wave state h={h!r} is outside the law's range") from exc


def seed_probe(fld: PatternField, eps: float, x: Optional[float] = None) -> PatternField:
    """Insert a tracked 1-rarefaction P -> A1 of strength ``eps`` into region A1.

    The inner 1-shock's right state becomes P.  Default x is the midpoint
    between the inner 1-shock and S2, so the probe trails the inner shocks
    by half the field and never catches the inner 1-shock.
    """
    if not (eps > 0.0):
        raise InvalidParameterError(f"probe strength must be positive, got {eps!r}")
    k, x_lo, x_hi = _region_a1(fld)
    xp = 0.5 * (x_lo + x_hi) if x is None else float(x)
    if not (x_lo < xp < x_hi):
        raise SeedingError(f"probe position {xp!r} outside region A1 ({x_lo}, {x_hi})")
    I1 = fld.fronts[k]
    A1 = I1.right
    P = _raised_state(fld.law, A1, eps)
    _check_inside(fld, [P])
    fld.fronts[k] = fld.make_front(1, WaveKind.SHOCK, I1.position(fld.t), I1.left, P, I1.role, I1.tag)
    # anything already seeded to the right sits in A1; shift it to P
    j = k + 1
    while fld.fronts[j].role in ("probe", "train") and fld.fronts[j].position(fld.t) < xp:
        raise SeedingError("seed the probe before the train")
    fld.fronts.insert(k + 1, fld.make_front(1, WaveKind.RAREFACTION, xp, P, A1, "probe", "P"))
    fld.invalidate()
    return fld


def seed_wave_train(fld: PatternField, eps: float, K: int, span_fraction: float = 0.25,
                    x_center: Optional[float] = None, family: int = 2) -> PatternField:
    """Insert K compression/rarefaction pairs of strengths 2^-k eps into region A1.

    Pair k is A -> P_k (compression) followed by P_k -> A (rarefaction), so
    the net state change across a pair is zero.  The pairs are spread
    evenly over ``span_fraction`` of the region between the inner 1-shock
    and S2; the members of a pair sit 1e-3 of the spacing apart and, under
    the mean-speed policy, move with equal speeds.

    The default is a 2-family train centred a fifth of the region to the right
    of the inner 1-shock.  Such a train starts just ahead of the inner
    waves in the period and slowly gains on them, so it stays clear of the
    inner shocks for the longest possible number of periods.
    """
    if not (eps > 0.0) or K < 1:
        raise InvalidParameterError(f"need eps > 0 and K >= 1, got eps={eps!r}, K={K!r}")
    family = WaveFamily(family)
    k, x_lo, x_hi = _region_a1(fld)
    width = span_fraction * (x_hi - x_lo)
    if x_center is None:
        x_center = x_lo + 0.2 * (x_hi - x_lo) if family == WaveFamily.SECOND else 0.5 * (x_lo + x_hi)
    lo = float(x_center) - 0.5 * width
    if not (x_lo < lo and lo + width < x_hi):
        raise SeedingError("train cluster does not fit into region A1")
    t = fld.t
    j = k + 1
    while fld.fronts[j].tag != "S2" and fld.fronts[j].position(t) < lo:
        j += 1
    if fld.fronts[j].tag != "S2" and fld.fronts[j].position(t) < lo + width:
        raise SeedingError("train cluster overlaps another small front")
    A = fld.fronts[j].left
    step = width / K
    gap = 1e-3 * step
    new = []
    inside = []
    for n in range(1, K + 1):
        e = eps * 2.0 ** -n
        if family == WaveFamily.FIRST:
            P = _raised_state(fld.law, A, e)
        else:
            P = _seed_state(fld.law, A.r + (A.h - e), A.h - e)
        inside.append(P)
        x = lo + (n - 0.5) * step
        new.append(fld.make_front(family, WaveKind.COMPRESSION, x, A, P, "train", f"T{n}c"))
        new.append(fld.make_front(family, WaveKind.RAREFACTION, x + gap, P, A, "train", f"T{n}r"))
    _check_inside(fld, inside)
    fld.fronts[j:j] = new
    fld.invalidate()
    return fld


def train_pairs(fld: FrontField) -> List[Tuple[WaveFront, WaveFront]]:
    """Adjacent train members of the same pair index, in x order."""
    out = []
    fr = fld.fronts
    for a, b in zip(fr, fr[1:]):
        if a.role == "train" and b.role == "train" and a.tag[:-1] == b.tag[:-1] and a.family == b.family:
            out.append((a, b))
    return out


def pair_strengths(fld: FrontField) -> dict:
    """Pair index -> mean strength of its two members, wherever they are."""
    acc: dict = {}
    for f in fld.fronts:
        if f.role == "train" and f.tag.startswith("T"):
            acc.setdefault(int(f.tag[1:-1]), []).append(f.strength)
    return {k: sum(v) / len(v) for k, v in sorted(acc.items())}


GROWN_RTOL = 1e-9


def count_grown_pairs(fld: FrontField, eps: float) -> int:
    """Number of train pairs stronger than eps/2 (beyond rounding of the seed)."""
    return sum(1 for v in pair_strengths(fld).values() if v > 0.5 * eps * (1.0 + GROWN_RTOL))


def apply_partial_cancellation(fld: FrontField, eps: float, tol: float = 1e-10) -> int:
    """Shrink every adjacent train pair stronger than ``eps`` back to ``eps``.

    The middle state of the pair is moved along the integral curve through
    the pair's left state; the outer states are untouched.  Returns the
    number of pairs changed.
    """
    law = fld.law
    count = 0
    fr = fld.fronts
    k = 0
    while k + 1 < len(fr):
        a, b = fr[k], fr[k + 1]
        same_pair = (a.role == "train" and b.role == "train" and a.family == b.family
                     and a.tag[:-1] == b.tag[:-1])
        if not same_pair or max(a.strength, b.strength) <= eps * (1.0 + GROWN_RTOL):
            k += 1
            continue
        L, R = a.left, b.right
        if abs(L.u - R.u) > tol * max(1.0, abs(L.u)) or abs(L.v - R.v) > tol * max(1.0, L.v):
            k += 1
            continue
        sign = 1.0 if a.right.h > L.h else -1.0
        h = L.h + sign * eps
        if a.family == WaveFamily.FIRST:
            mid = state_from_uh(law, L.s - h, h)
        else:
            mid = state_from_uh(law, L.r + h, h)
        t = fld.t
        na = fld.make_front(a.family, a.kind, a.position(t), L, mid, a.role, a.tag)
        nb = fld.make_front(b.family, b.kind, b.position(t), mid, R, b.role, b.tag)
        fr[k:k + 2] = [na, nb]
        count += 1
        k += 2
    if count:
        fld.invalidate()
    return count


# ---------------------------------------------------------------------------
# experiment

@dataclass
class AmplificationReport:
    """Measurements of one blowup run.

    ``probe_strengths`` lists the strength of the tracked probe each time it
    leaves the left large shock; ``factors`` are the ratios of successive
    entries, i.e. the per-cycle amplification.  ``period_*`` lists are
    sampled at each crossing of the two inner shocks (the period boundary),
    the first entry being the initial configuration.
    """

    pattern: str
    gamma_label: str
    s_inner: float
    split: float
    delta: float
    eps: float
    pairs: int
    cycles: int
    probe_strengths: List[float] = dc_field(default_factory=list)
    factors: List[float] = dc_field(default_factory=list)
    reflection_left: List[float] = dc_field(default_factory=list)
    reflection_right: List[float] = dc_field(default_factory=list)
    predicted_factor: Optional[float] = None
    period_times: List[float] = dc_field(default_factory=list)
    period_totals: List[float] = dc_field(default_factory=list)
    period_train_totals: List[float] = dc_field(default_factory=list)
    period_main: List[List[float]] = dc_field(default_factory=list)
    period_pair_counts: List[int] = dc_field(default_factory=list)
    cancellations: int = 0
    events: int = 0
    min_v: float = math.inf
    v_bounds: Tuple[float, float] = (0.0, math.inf)
    confined: bool = True
    truncated: bool = False

    @property
    def factor(self) -> Optional[float]:
        """Last measured per-cycle factor."""
        return self.factors[-1] if self.factors else None

    @property
    def periodicity_error(self) -> float:
        if len(self.period_main) < 2:
            return math.nan
        ref = self.period_main[0]
        return max(abs(a - b) for row in self.period_main[1:] for a, b in zip(row, ref))

    @staticmethod
    def tan_theta(rho: float) -> float:
        """Shock-chord slope recovered from a reflection coefficient."""
        return (1.0 - rho) / (1.0 + rho)

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["v_bounds"] = list(self.v_bounds)
        out["factor"] = self.factor
        out["periodicity_error"] = self.periodicity_error
        out["tan_theta_left"] = [self.tan_theta(r) for r in self.reflection_left]
        out["tan_theta_right"] = [self.tan_theta(r) for r in self.reflection_right]
        return out


MAIN_TAGS = ("S1", "I2", "I1", "S2")


def _is_boundary(incoming) -> bool:
    tags = {(f.tag, f.kind) for f in incoming}
    return ("I1", WaveKind.SHOCK) in tags and ("I2", WaveKind.SHOCK) in tags


def _train_total(fld: FrontField) -> float:
    return math.fsum(f.strength for f in fld.fronts if f.role == "train")


def run_blowup_experiment(spec: PatternSpec, cycles: int, *, max_events: Optional[int] = None,
                          trace: Optional[SimulationTrace] = None, snapshots: bool = True,
                          cancel: bool = True):
    """Build the pattern of ``spec``, seed its small waves and run ``cycles`` periods.

    Parameters
    ----------
    cycles : int
        Number of complete periods after the first inner-shock crossing.
    snapshots : bool
        Store a full front table at every period boundary in the trace.
    cancel : bool
        Apply partial cancellation of oversized train pairs at boundaries.

    Returns
    -------
    (AmplificationReport, SimulationTrace, PatternField)
        The field is returned in its final state.
    """
    from .interaction_lab import paper_X
    from .engine import run, take_snapshot

    if cycles < 1:
        raise InvalidParameterError(f"cycles must be >= 1, got {cycles!r}")
    fld = build_pattern(spec)
    if spec.probe_eps is not None:
        seed_probe(fld, spec.probe_eps)
    if spec.pairs > 0:
        seed_wave_train(fld, spec.eps, spec.pairs, spec.train_span, spec.train_center,
                        spec.train_family)
    st = fld.design
    lo, hi = fld.bounds
    rep = AmplificationReport(spec.pattern, fld.law.label, spec.s_inner, st.split, st.delta,
                              spec.eps, spec.pairs, cycles, v_bounds=(lo, hi))
    try:
        rep.predicted_factor = 1.0 + paper_X(fld.law, spec.v_c) * spec.s_inner ** 3
    except Exception:  # the printed constant is informational only
        rep.predicted_factor = None
    exterior = (st.U_l, st.U_r)
    done = {"n": 0}
    tr = trace if trace is not None else SimulationTrace()
    if max_events is None:
        max_events = 2000 + 400 * (cycles + 1) * (1 + 2 * spec.pairs) ** 2

    def confine(fld_, event, incoming, outgoing):
        for f in outgoing:
            for s_ in (f.left, f.right):
                rep.min_v = min(rep.min_v, s_.v)
                if s_ not in exterior and not (lo < s_.v < hi):
                    rep.confined = False

    def probe(fld_, event, incoming, outgoing):
        pin = [f for f in incoming if f.tag == "P"]
        large = [f for f in incoming if f.role == "large"]
        if not pin or not large:
            return
        pout = [f for f in outgoing if f.tag == "P"]
        if not pout:
            return
        rho = pout[0].strength / pin[0].strength
        if large[0].tag == "S1":
            rep.reflection_left.append(rho)
            rep.probe_strengths.append(pout[0].strength)
            if len(rep.probe_strengths) >= 2:
                rep.factors.append(rep.probe_strengths[-1] / rep.probe_strengths[-2])
        else:
            rep.reflection_right.append(rho)

    def boundary(fld_, event, incoming, outgoing):
        if not _is_boundary(incoming):
            return
        if cancel and spec.pairs > 0 and done["n"] > 0:
            rep.cancellations += apply_partial_cancellation(fld_, spec.eps)
        main = []
        for tag in MAIN_TAGS:
            fr = [f for f in incoming if f.tag == tag] or fld_.find(tag)
            main.append(max(f.strength for f in fr) if fr else math.nan)
        rep.period_times.append(fld_.t)
        rep.period_totals.append(total_strength(fld_))
        rep.period_train_totals.append(_train_total(fld_))
        rep.period_main.append(main)
        rep.period_pair_counts.append(count_grown_pairs(fld_, spec.eps))
        if snapshots:
            take_snapshot(fld_, tr)
        done["n"] += 1

    hooks = list(fld.hooks) + [confine, probe, boundary]
    run(fld, max_events=max_events, hooks=hooks, stop=lambda f: done["n"] > cycles, trace=tr)
    rep.events = fld.event_count
    rep.truncated = tr.truncated
    return rep, tr, fld


# ---------------------------------------------------------------------------
# scenarios

_SCENARIO_KEYS = {"law", "pattern", "s_inner", "eps", "pairs", "cycles", "seed_positions",
                  "v_c", "split", "r", "s_bar", "r_bar", "probe_eps", "rarefaction_weight",
                  "window", "train_center", "train_span", "train_family"}


def scenario_from_dict(data: dict) -> Tuple[PatternSpec, int]:
    """(PatternSpec, cycles) from a scenario mapping.

    ``law`` is either a law mapping accepted by ``law_from_json`` or a bare
    number taken as the gamma exponent.
    """
    unknown = set(data) - _SCENARIO_KEYS
    if unknown:
        raise InvalidParameterError(f"unknown scenario keys: {sorted(unknown)}")
    if "law" not in data:
        raise InvalidParameterError("scenario needs a 'law' entry")
    law_spec = data["law"]
    if isinstance(law_spec, (int, float)):
        law_spec = {"kind": "gamma", "gamma": float(law_spec)}
    law = law_from_json(law_spec)
    kw = {k: data[k] for k in ("pattern", "s_inner", "eps", "pairs", "v_c", "split", "r", "s_bar",
                               "r_bar", "probe_eps", "rarefaction_weight", "train_center",
                               "train_span", "train_family") if k in data}
    if "seed_positions" in data and data["seed_positions"] is not None:
        kw["positions"] = [float(x) for x in data["seed_positions"]]
    if "window" in data and data["window"] is not None:
        kw["window"] = tuple(float(x) for x in data["window"])
    cycles = int(data.get("cycles", 1))
    return PatternSpec(law, **kw), cycles


def load_scenario(path) -> Tuple[PatternSpec, int]:
    """Read a scenario JSON file; see ``scenario_from_dict``."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InvalidParameterError(f"{path}: scenario must be a JSON object")
    return scenario_from_dict(data)
