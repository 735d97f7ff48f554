"""Event-driven front tracking for piecewise-constant p-system data.

Fronts move with constant speeds between collisions.  At a collision the
participating fronts are replaced by the exact Riemann solution of their
outermost states; only the speeds assigned to rarefaction and compression
fronts are approximate.

Every front carries a ``role`` and a ``tag`` so that constructions can
follow individual waves across interactions:

* an outgoing wave of family k inherits the tag of the strongest incoming
  wave of family k;
* a wave of a family with no incoming representative is *born*: when a
  ``large`` front takes part it is a reflection and inherits the tag of the
  strongest other participant, otherwise it is a ``byproduct``.

Fronts whose role is in ``SIMPLE_ROLES`` are resolved on integral curves, so
a compressive wave of that role becomes a compression front instead of a
shock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, List, Optional, Sequence

from .errors import ConsistencyError, PtrackError, TopologyError
from .pressure_law import PressureLaw
from .riemann import CANCEL_TOL, Wave, resolve_interaction
from .wave_curves import CURVE_TOL, State, WaveFamily, WaveKind, char_speed, front_speed

TIME_TOL = 1e-12
SIMPLE_ROLES = frozenset({"probe", "train", "byproduct"})


@dataclass
class WaveFront:
    """A moving jump; ``x`` is its position at time ``t_ref``."""

    id: int
    family: WaveFamily
    kind: WaveKind
    x: float
    t_ref: float
    speed: float
    left: State
    right: State
    role: str = "inner"
    tag: str = ""

    @property
    def strength(self) -> float:
        return abs(self.right.h - self.left.h)

    @property
    def intercept(self) -> float:
        return self.x - self.speed * self.t_ref

    def position(self, t: float) -> float:
        return self.x + self.speed * (t - self.t_ref)

    @property
    def simple(self) -> bool:
        return self.role in SIMPLE_ROLES


@dataclass(frozen=True)
class CollisionEvent:
    time: float
    position: float
    ids: tuple


@dataclass(frozen=True)
class EventRecord:
    index: int
    time: float
    position: float
    incoming: tuple  # (id, tag, family, kind, strength)
    outgoing: tuple


@dataclass
class Segment:
    """Straight piece of a front path in the x-t plane."""

    id: int
    family: int
    kind: str
    role: str
    tag: str
    x0: float
    t0: float
    x1: float
    t1: float


@dataclass
class SimulationTrace:
    times: List[float] = dc_field(default_factory=list)
    total_strength: List[float] = dc_field(default_factory=list)
    min_v: List[float] = dc_field(default_factory=list)
    front_count: List[int] = dc_field(default_factory=list)
    events: List[EventRecord] = dc_field(default_factory=list)
    segments: List[Segment] = dc_field(default_factory=list)
    snapshots: List[tuple] = dc_field(default_factory=list)  # (t, event_index, rows)
    truncated: bool = False
    record_segments: bool = True  # front paths for x-t diagrams
    record_events: bool = True    # full event log

    def record(self, fld: "FrontField") -> None:
        self.times.append(fld.t)
        self.total_strength.append(total_strength(fld))
        self.min_v.append(min_specific_volume(fld))
        self.front_count.append(len(fld.fronts))


class FrontField:
    """Ordered list of fronts plus the leftmost state and the current time.

    Parameters
    ----------
    rarefaction_weight : float
        Speed of a rarefaction or compression front is
        ``w * lambda(left) + (1 - w) * lambda(right)``; 0.5 is the mean.
    """

    def __init__(self, law: PressureLaw, left_state: State, t: float = 0.0,
                 rarefaction_weight: float = 0.5, time_tol: float = TIME_TOL,
                 cancel_tol: float = CANCEL_TOL):
        if not (0.0 <= rarefaction_weight <= 1.0):
            raise ValueError("rarefaction_weight must lie in [0, 1]")
        self.law = law
        self.left_state = left_state
        self.t = float(t)
        self.fronts: List[WaveFront] = []
        self.rarefaction_weight = rarefaction_weight
        self.time_tol = time_tol
        self.cancel_tol = cancel_tol
        self._next_id = 0
        self.event_count = 0
        self.trace: Optional[SimulationTrace] = None
        self._pair_t: List[float] = []

    # -- construction -----------------------------------------------------
    def new_id(self) -> int:
        self._next_id += 1
        return self._next_id - 1

    def speed_for(self, family: int, kind: WaveKind, left: State, right: State) -> float:
        if kind == WaveKind.SHOCK:
            return front_speed(self.law, family, kind, left, right)
        w = self.rarefaction_weight
        return w * char_speed(self.law, family, left.v) + (1.0 - w) * char_speed(self.law, family, right.v)

    def make_front(self, family: int, kind: WaveKind, x: float, left: State, right: State,
                   role: str = "inner", tag: str = "", t_ref: Optional[float] = None) -> WaveFront:
        fam = WaveFamily(family)
        kind = WaveKind(kind)
        return WaveFront(self.new_id(), fam, kind, float(x), self.t if t_ref is None else t_ref,
                         self.speed_for(fam, kind, left, right), left, right, role, tag)

    def add(self, front: WaveFront) -> WaveFront:
        """Insert a front keeping x-order (ties are appended after equal x)."""
        xs = [f.position(self.t) for f in self.fronts]
        x = front.position(self.t)
        i = 0
        while i < len(xs) and xs[i] <= x:
            i += 1
        self.fronts.insert(i, front)
        self.invalidate()
        return front

    def set_fronts(self, fronts: Sequence[WaveFront]) -> None:
        self.fronts = list(fronts)
        self.invalidate()

    def replace(self, i: int, j: int, new: Sequence[WaveFront]) -> None:
        """Replace fronts[i:j] by ``new`` and refresh the cached pair times."""
        m = len(new)
        self.fronts[i:j] = list(new)
        # pairs (i-1, i) .. (i+m-1, i+m) are new; the rest only shift
        lo = max(i - 1, 0)
        hi = min(i + m, len(self.fronts) - 1)
        old_hi = min(j, len(self._pair_t))
        self._pair_t[lo:old_hi] = [self._pair_time(k) for k in range(lo, hi)]
        assert len(self._pair_t) == max(len(self.fronts) - 1, 0)

    def invalidate(self) -> None:
        self._pair_t = [self._pair_time(k) for k in range(len(self.fronts) - 1)]

    # -- queries ----------------------------------------------------------
    def state_at(self, x: float) -> State:
        st = self.left_state
        for f in self.fronts:
            if f.position(self.t) < x:
                st = f.right
            else:
                break
        return st

    def states(self) -> List[State]:
        return [self.left_state] + [f.right for f in self.fronts]

    def find(self, tag: str) -> List[WaveFront]:
        return [f for f in self.fronts if f.tag == tag]

    def _pair_time(self, k: int) -> float:
        a, b = self.fronts[k], self.fronts[k + 1]
        ds = a.speed - b.speed
        if ds <= 0.0:
            return math.inf
        t = (b.intercept - a.intercept) / ds
        return max(t, self.t)

    def check_invariants(self, tol: float = CURVE_TOL) -> None:
        """Chaining and ordering checks; raises TopologyError."""
        prev = self.left_state
        x_prev = -math.inf
        for f in self.fronts:
            x = f.position(self.t)
            if x < x_prev - 1e-9 * max(1.0, abs(x)):
                raise TopologyError(f"fronts out of order at x={x!r}")
            x_prev = x
            if abs(prev.u - f.left.u) > tol * max(1.0, abs(prev.u)) or abs(prev.v - f.left.v) > tol * max(1.0, prev.v):
                raise TopologyError(f"state chaining broken before front {f.id}")
            prev = f.right


def total_strength(fld: FrontField) -> float:
    return math.fsum(f.strength for f in fld.fronts)


def min_specific_volume(fld: FrontField) -> float:
    return min(st.v for st in fld.states())


# ---------------------------------------------------------------------------
# events

def next_collision(fld: FrontField) -> Optional[CollisionEvent]:
    """Earliest collision among adjacent approaching fronts.

    Adjacent pairs colliding within ``time_tol`` (relative to max(1, t)) of
    the earliest one and forming a contiguous run are merged into a single
    multi-front event.
    """
    pt = fld._pair_t
    if not pt:
        return None
    k0 = min(range(len(pt)), key=pt.__getitem__)
    t0 = pt[k0]
    if not math.isfinite(t0):
        return None
    tol = fld.time_tol * max(1.0, abs(t0))
    lo = k0
    while lo > 0 and pt[lo - 1] <= t0 + tol:
        lo -= 1
    hi = k0
    while hi + 1 < len(pt) and pt[hi + 1] <= t0 + tol:
        hi += 1
    members = fld.fronts[lo:hi + 2]
    x = math.fsum(f.position(t0) for f in members) / len(members)
    return CollisionEvent(t0, x, tuple(f.id for f in members))


def _assign_tags(incoming: Sequence[WaveFront]):
    """(role, tag) for the outgoing 1-wave and 2-wave of a collision."""
    out = {}
    has_large = any(f.role == "large" for f in incoming)
    for fam in (WaveFamily.FIRST, WaveFamily.SECOND):
        same = [f for f in incoming if f.family == fam]
        if same:
            main = max(same, key=lambda f: f.strength)
            out[fam] = (main.role, main.tag)
        elif has_large:
            others = [f for f in incoming if f.role != "large"]
            src = max(others, key=lambda f: f.strength) if others else None
            out[fam] = (src.role, src.tag) if src else ("byproduct", "")
        else:
            out[fam] = ("byproduct", "")
    return out


EventHook = Callable[[FrontField, CollisionEvent, List[WaveFront], List[WaveFront]], None]


def resolve_event(fld: FrontField, event: CollisionEvent,
                  hooks: Sequence[EventHook] = ()) -> List[WaveFront]:
    """Advance to ``event.time`` and replace the participants by the exact outgoing waves."""
    ids = list(event.ids)
    idx = [k for k, f in enumerate(fld.fronts) if f.id in ids]
    if len(idx) != len(ids) or idx != list(range(idx[0], idx[0] + len(idx))):
        raise TopologyError(f"event participants {ids} are not adjacent")
    i, j = idx[0], idx[-1] + 1
    incoming = fld.fronts[i:j]
    fld.t = event.time
    tags = _assign_tags(incoming)
    simple = tuple(tags[f][0] in SIMPLE_ROLES for f in (WaveFamily.FIRST, WaveFamily.SECOND))
    try:
        waves = resolve_interaction(fld.law, incoming, simple, cancel_tol=fld.cancel_tol)
    except PtrackError as exc:
        raise type(exc)(f"at t={event.time!r}, x={event.position!r}, fronts {ids}: {exc}") from exc
    outgoing = []
    for w in waves:
        role, tag = tags[w.family]
        f = WaveFront(fld.new_id(), w.family, w.kind, event.position, event.time,
                      fld.speed_for(w.family, w.kind, w.left, w.right), w.left, w.right, role, tag)
        outgoing.append(f)
    tr = fld.trace
    if tr is not None and tr.record_segments:
        for f in incoming:
            tr.segments.append(Segment(f.id, int(f.family), f.kind.value, f.role, f.tag,
                                       _seg_start(f)[0], _seg_start(f)[1], event.position, event.time))
    fld.replace(i, j, outgoing)
    fld.event_count += 1
    if tr is not None and tr.record_events:
        tr.events.append(EventRecord(
            fld.event_count - 1, event.time, event.position,
            tuple((f.id, f.tag, int(f.family), f.kind.value, f.strength) for f in incoming),
            tuple((f.id, f.tag, int(f.family), f.kind.value, f.strength) for f in outgoing),
        ))
    for hook in hooks:
        hook(fld, event, incoming, outgoing)
    if tr is not None:
        tr.record(fld)
    return outgoing


def _seg_start(f: WaveFront):
    return f.x, f.t_ref


def run(fld: FrontField, t_end: float = math.inf, max_events: int = 1_000_000,
        hooks: Sequence[EventHook] = (), stop: Optional[Callable[[FrontField], bool]] = None,
        trace: Optional[SimulationTrace] = None) -> SimulationTrace:
    """Advance ``fld`` until ``t_end``, ``max_events`` or ``stop(fld)``.

    Exceeding ``max_events`` flags the trace as truncated rather than raising.
    """
    tr = trace if trace is not None else SimulationTrace()
    fld.trace = tr
    if not tr.times:
        tr.record(fld)
    n = 0
    while True:
        ev = next_collision(fld)
        if ev is None or ev.time > t_end:
            if math.isfinite(t_end):
                fld.t = t_end
            break
        if n >= max_events:
            tr.truncated = True
            break
        resolve_event(fld, ev, hooks)
        n += 1
        if stop is not None and stop(fld):
            break
    return tr


SNAPSHOT_COLUMNS = ("t", "event_index", "x", "family", "kind", "strength",
                    "left_u", "left_v", "right_u", "right_v")


def snapshot_rows(fld: FrontField) -> List[tuple]:
    """One row per front: (x, family, kind, strength, left_u, left_v, right_u, right_v)."""
    t = fld.t
    return [(f.position(t), int(f.family), f.kind.value, f.strength,
             f.left.u, f.left.v, f.right.u, f.right.v) for f in fld.fronts]


def take_snapshot(fld: FrontField, trace: SimulationTrace) -> None:
    trace.snapshots.append((fld.t, fld.event_count, snapshot_rows(fld)))


def close_segments(fld: FrontField, trace: SimulationTrace) -> None:
    """Append the still-open front paths up to the current time."""
    for f in fld.fronts:
        trace.segments.append(Segment(f.id, int(f.family), f.kind.value, f.role, f.tag,
                                      f.x, f.t_ref, f.position(fld.t), fld.t))
