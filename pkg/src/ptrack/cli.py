"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 a valid but negative
finding (no violation interval, a failed expansion check, a run that did
not grow).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

from . import pressure_law, riemann
from .errors import PtrackError
from .pressure_law import (
    bakhvalov_discriminant,
    find_violation_intervals,
    gamma_law,
    law_from_json,
)

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE = 0, 1, 2
PERIODIC_TOL = {"symmetric": 1e-8, "asymmetric": 1e-7}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# helpers

def _law(args):
    if getattr(args, "law", None):
        text = args.law
        if os.path.exists(text):
            text = Path(text).read_text(encoding="utf-8")
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--law is neither a file nor JSON: {exc}") from exc
        return law_from_json(obj)
    return gamma_law(args.gamma)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise UsageError(f"output directory {out} is not writable")
    return out


def _emit_json(args, obj) -> None:
    if getattr(args, "json", False):
        print(json.dumps(obj, indent=1, sort_keys=True, default=str))


def _workers() -> int:
    raw = os.environ.get("PTRACK_THREADS", "")
    try:
        n = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError as exc:
        raise UsageError(f"PTRACK_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


def parse_sweep(text: str):
    """'name=start:stop:step' -> (name, values), stop inclusive."""
    try:
        name, rng = text.split("=", 1)
        a, b, c = (float(x) for x in rng.split(":"))
    except ValueError as exc:
        raise UsageError(f"--sweep expects name=start:stop:step, got {text!r}") from exc
    if c <= 0 or b < a:
        raise UsageError(f"--sweep range must be increasing with a positive step: {text!r}")
    n = int(math.floor((b - a) / c + 1e-9)) + 1
    return name.strip(), [round(a + k * c, 12) for k in range(n)]


# ---------------------------------------------------------------------------
# subcommands

def cmd_bakhvalov_scan(args) -> int:
    law = _law(args)
    lo, hi = args.window
    n = args.points
    print(f"law: {law.label}   window: [{lo:g}, {hi:g}]")
    print(f"{'v':>12}  {'D(v)':>14}  condition")
    rows = []
    for k in range(args.table_rows):
        v = lo + (hi - lo) * k / max(args.table_rows - 1, 1)
        d = bakhvalov_discriminant(law, v)
        rows.append({"v": v, "D": d})
        print(f"{v:12.6g}  {d:14.6e}  {'holds' if d <= 0 else 'VIOLATED'}")
    ivs = find_violation_intervals(law, (lo, hi), n=n)
    report = {"law": law.to_json(), "window": [lo, hi], "table": rows,
              "violation_intervals": [list(iv) for iv in ivs]}
    if ivs:
        for a, b in ivs:
            print(f"violation interval: ({a:.10g}, {b:.10g})")
    else:
        print("condition holds everywhere on the window")
    _emit_json(args, report)
    return EXIT_OK if ivs else EXIT_NEGATIVE


def cmd_riemann(args) -> int:
    from .riemann import solve, traversal_residual
    from .wave_curves import make_state

    law = _law(args)
    left = make_state(law, *args.left)
    right = make_state(law, *args.right)
    sol = solve(law, left, right)
    res = traversal_residual(law, left, right, sol)
    m = sol.middle
    print(f"middle state: u={m.u!r} v={m.v!r}")
    waves = []
    for w in sol.waves:
        print(f"  {int(w.family)}-{w.kind.value:<12} strength={w.strength:.12g} speed={w.speed:.12g}")
        waves.append({"family": int(w.family), "kind": w.kind.value, "strength": w.strength,
                      "speed": w.speed})
    print(f"traversal residual: {res:.3e}")
    _emit_json(args, {"middle": {"u": m.u, "v": m.v}, "waves": waves, "residual": res})
    return EXIT_OK


def cmd_verify_expansions(args) -> int:
    from .interaction_lab import format_table, verify_all

    law = _law(args)
    reports = verify_all(law, v_bar=args.v_bar, backend=args.backend)
    print(format_table(reports))
    _emit_json(args, [r.to_json() for r in reports])
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NEGATIVE


def _spec_from_args(args):
    from .patterns import load_scenario

    if not args.scenario:
        raise UsageError("--scenario is required")
    if not os.path.exists(args.scenario):
        raise UsageError(f"scenario file not found: {args.scenario}")
    spec, cycles = load_scenario(args.scenario)
    if args.cycles is not None:
        cycles = args.cycles
    if args.pairs is not None:
        spec = replace(spec, pairs=args.pairs)
    return spec, cycles


def cmd_simulate(args) -> int:
    from .engine import SimulationTrace, close_segments
    from .export import event_log, write_json, write_svg, write_trace_csv
    from .patterns import run_blowup_experiment

    spec, cycles = _spec_from_args(args)
    out = _out_dir(args)
    trace = SimulationTrace()
    rep, trace, fld = run_blowup_experiment(spec, cycles, trace=trace)
    close_segments(fld, trace)
    write_trace_csv(out / "trace.csv", trace)
    if args.json:
        write_json(out / "events.json", event_log(trace))
    if args.svg:
        write_svg(out / "xt.svg", trace)
    err = rep.periodicity_error
    tol = PERIODIC_TOL[spec.pattern]
    ok = err <= tol
    print(f"{spec.pattern} pattern, s_inner={spec.s_inner:g}: {rep.events} events, {cycles} periods")
    print(f"periodicity {'PASS' if ok else 'FAIL'}: max main-strength change {err:.3e} (tol {tol:g})")
    print(f"min specific volume {rep.min_v:.6g}, confined to ({rep.v_bounds[0]:g}, {rep.v_bounds[1]:g}): "
          f"{rep.confined}")
    return EXIT_OK if ok and rep.confined else EXIT_NEGATIVE


def _payload(spec) -> dict:
    """Picklable description of a PatternSpec (laws hold closures)."""
    from dataclasses import fields

    out = {f.name: getattr(spec, f.name) for f in fields(spec) if f.name != "law"}
    out["law"] = spec.law.to_json()
    return out


def _blowup_job(payload: dict, cycles: int):
    from .patterns import PatternSpec, run_blowup_experiment

    kw = dict(payload)
    spec = PatternSpec(law_from_json(kw.pop("law")), **kw)
    rep, _, _ = run_blowup_experiment(spec, cycles, snapshots=False)
    return rep.to_json()


def _sweep_specs(spec, sweep: str):
    name, values = parse_sweep(sweep)
    specs = []
    for val in values:
        if name == "gamma":
            specs.append(replace(spec, law=gamma_law(val)))
        elif name in ("s_inner", "eps", "split", "probe_eps", "v_c"):
            specs.append(replace(spec, **{name: val}))
        elif name == "pairs":
            specs.append(replace(spec, pairs=int(val)))
        else:
            raise UsageError(f"cannot sweep over {name!r}")
    return name, values, specs


def cmd_blowup(args) -> int:
    from .engine import SimulationTrace, close_segments
    from .export import event_log, write_json, write_svg, write_trace_csv
    from .patterns import run_blowup_experiment

    spec, cycles = _spec_from_args(args)
    out = _out_dir(args)
    if args.sweep:
        name, values, specs = _sweep_specs(spec, args.sweep)
        with ProcessPoolExecutor(max_workers=min(_workers(), len(specs))) as pool:
            results = list(pool.map(_blowup_job, [_payload(x) for x in specs], [cycles] * len(specs)))
        for val, res in zip(values, results):
            print(f"{name}={val:g}: factor={res['factor']}, "
                  f"total {res['period_totals'][0]:.10g} -> {res['period_totals'][-1]:.10g}")
        write_json(out / "sweep.json", {"parameter": name, "values": values, "reports": results})
        return EXIT_OK
    trace = SimulationTrace(record_segments=bool(args.svg), record_events=bool(args.json))
    rep, trace, fld = run_blowup_experiment(spec, cycles, trace=trace)
    write_trace_csv(out / "trace.csv", trace)
    write_json(out / "report.json", rep.to_json())
    if args.json:
        write_json(out / "events.json", event_log(trace))
    if args.svg:
        close_segments(fld, trace)
        write_svg(out / "xt.svg", trace)
    totals = rep.period_totals
    grows = all(b >= a for a, b in zip(totals, totals[1:]))
    print(f"{spec.pattern} pattern, s_inner={spec.s_inner:g}, eps={spec.eps:g}, pairs={spec.pairs}: "
          f"{rep.events} events, {cycles} periods")
    if rep.factors:
        print(f"per-period factor of the tracked front: {rep.factor:.12g} "
              f"((factor-1)/s^3 = {(rep.factor - 1) / spec.s_inner ** 3:.4g})")
    print(f"total strength {totals[0]:.12g} -> {totals[-1]:.12g}; nondecreasing: {grows}")
    print(f"pairs above eps/2: {rep.period_pair_counts[0]} -> {rep.period_pair_counts[-1]}; "
          f"cancellations: {rep.cancellations}")
    return EXIT_OK if grows else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# parser

def _add_law(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gamma", type=float, default=3.0, help="gamma-law exponent (default 3)")
    g.add_argument("--law", help="law JSON (inline or file), e.g. '{\"kind\":\"gamma\",\"gamma\":2}'")


def _add_run(p):
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--out", default="ptrack_out", help="output directory")
    p.add_argument("--cycles", type=int, help="override the scenario's period count")
    p.add_argument("--pairs", type=int, help="override the number of train pairs")
    p.add_argument("--svg", action="store_true", help="write an x-t diagram")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ptrack", description="Front tracking for the p-system.")
    p.add_argument("--tol-quad", type=float, help="quadrature tolerance for h(v)")
    p.add_argument("--tol-root", type=float, help="Riemann root-finding tolerance")
    p.add_argument("--seed", type=int, default=0, help="seed for sweep jitter (core runs are deterministic)")
    p.add_argument("--json", action="store_true", help="also emit JSON")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("bakhvalov-scan", help="sign table of D(v) and violation intervals")
    _add_law(b)
    b.add_argument("--window", type=float, nargs=2, default=(0.5, 2.0), metavar=("LO", "HI"))
    b.add_argument("--points", type=int, default=1000)
    b.add_argument("--table-rows", type=int, default=11)
    b.set_defaults(func=cmd_bakhvalov_scan)

    r = sub.add_parser("riemann", help="solve one Riemann problem")
    _add_law(r)
    r.add_argument("--left", type=float, nargs=2, required=True, metavar=("U", "V"))
    r.add_argument("--right", type=float, nargs=2, required=True, metavar=("U", "V"))
    r.set_defaults(func=cmd_riemann)

    v = sub.add_parser("verify-expansions", help="convergence-ratio checks of the expansions")
    _add_law(v)
    v.add_argument("--v-bar", type=float, default=1.0)
    v.add_argument("--backend", choices=("auto", "float", "mpmath"), default="auto")
    v.set_defaults(func=cmd_verify_expansions)

    s = sub.add_parser("simulate", help="run a pattern scenario and export the trace")
    _add_run(s)
    s.set_defaults(func=cmd_simulate)

    u = sub.add_parser("blowup", help="amplification experiment with report")
    _add_run(u)
    u.add_argument("--sweep", help="parameter sweep name=start:stop:step (e.g. gamma=1.5:3.5:0.5)")
    u.set_defaults(func=cmd_blowup)

    for sp in (b, r, v, s, u):
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="also emit JSON")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help()
            return EXIT_INPUT
        for name in ("tol_quad", "tol_root"):
            val = getattr(args, name)
            if val is not None and not (val > 0):
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if args.tol_quad is not None:
            pressure_law.QUAD_TOL = args.tol_quad
        if args.tol_root is not None:
            riemann.ROOT_TOL = args.tol_root
        return args.func(args)
    except UsageError as exc:
        print(f"ptrack: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PtrackError, OSError, ValueError) as exc:
        print(f"ptrack: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
