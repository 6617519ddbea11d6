"""Command-line surface.

Subcommands: ``validate`` (hypothesis gate), ``riemann`` (single classical or
constrained solve), ``simulate`` (Cauchy run with file outputs), ``converge``
(refinement sweep), ``audit`` (offline ledger verification).

Exit codes: 0 success, 1 validation failure, 2 finiteness guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .constrained import solve_constrained
from .diagnostics import convergence_study, verify_ledger
from .model import HypothesisViolation, State, default_params
from .outputs import emit_outputs, render_report
from .riemann import discretize_rarefactions, solve_riemann
from .scenario import (
    ParseError,
    ValidationError,
    build_sim,
    parse_params,
    parse_scenario,
    random_scenario,
)
from .tracker import GuardTripped, InteractionRecord, TableViolation


def _load_scenario(args):
    if getattr(args, "scenario", None):
        scn = parse_scenario(Path(args.scenario).read_text())
    elif getattr(args, "seed", None) is not None:
        scn = random_scenario(args.seed)
    else:
        raise ValidationError("scenario", "need a scenario file or --seed")
    if getattr(args, "nu", None):
        scn.nu = args.nu
    if getattr(args, "horizon", None):
        scn.horizon = args.horizon
        scn.probes = [t for t in scn.probes if t <= scn.horizon]
    if getattr(args, "probes", None):
        scn.probes = [float(t) for t in args.probes.split(",")]
    if getattr(args, "window", None):
        lo, hi = (float(x) for x in args.window.split(","))
        scn.window = (lo, hi)
    return scn


def _state(text: str) -> State:
    rho, w = (float(x) for x in text.split(","))
    return State(rho, w)


def cmd_validate(args) -> int:
    try:
        scn = parse_scenario(Path(args.scenario).read_text())
    except HypothesisViolation as e:
        print(f"REJECTED {e}")
        return 1
    print(f"OK: parameters satisfy the structural hypotheses; "
          f"{len(scn.initial)} initial pieces, {len(scn.control)} control pieces")
    return 0


def cmd_riemann(args) -> int:
    p = default_params()
    if args.params:
        doc = json.loads(Path(args.params).read_text())
        p = parse_params(doc.get("params", doc))
    left, right = _state(args.left), _state(args.right)
    if args.constrained:
        sol = solve_constrained(p, left, right, args.ubar)
        print(f"case {sol.case}; AV speed {sol.av_speed:.17g}; "
              f"AV wave {sol.av_kind}")
        waves = sol.waves
    else:
        fan = solve_riemann(p, left, right)
        waves = fan.waves
    if args.nu:
        waves = discretize_rarefactions(p, waves, args.nu)
    if not waves:
        print("no waves (constant solution)")
    for w in waves:
        span = (f"{w.s_lo:.17g}" if w.s_lo == w.s_hi
                else f"[{w.s_lo:.17g}, {w.s_hi:.17g}]")
        print(f"{w.kind:>4}  ({w.left.rho:.17g}, {w.left.w:.17g}) -> "
              f"({w.right.rho:.17g}, {w.right.w:.17g})  speed {span}")
    return 0


def cmd_simulate(args) -> int:
    scn = _load_scenario(args)
    sim = build_sim(scn)
    sim.run_until(scn.horizon)
    if args.out_dir:
        files = emit_outputs(sim, scn, args.out_dir)
        print(f"wrote {len(files)} files to {args.out_dir}")
    else:
        print(render_report(sim), end="")
    return 0


def cmd_converge(args) -> int:
    scn = _load_scenario(args)
    nu_list = [int(x) for x in args.nu_list.split(",")]
    probes = ([float(t) for t in args.probes.split(",")]
              if args.probes else scn.probes or [scn.horizon])
    rep = convergence_study(scn, nu_list, probes)
    lines = [f"refinements: {rep.nu_list}"]
    for t in probes:
        seq = ", ".join(f"{d:.6g}" for d in rep.pairwise(t))
        mono = "non-increasing" if rep.monotone[t] else "NOT monotone"
        lines.append(f"t={t:g}: pairwise L1 [{seq}] ({mono})")
    for nu in rep.nu_list:
        lines.append(f"nu={nu}: F_w drift {rep.fw_drift[nu]:.3g}, "
                     f"constraint excess {rep.constraint_max[nu]:.3g}, "
                     f"mass drift {rep.conservation_max[nu]:.3g}, "
                     f"TV bound ok {rep.tv_bound_ok[nu]}")
    text = "\n".join(lines) + "\n"
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "convergence.txt").write_text(text)
    print(text, end="")
    return 0


def cmd_audit(args) -> int:
    path = Path(args.path)
    ledger_file = path / "ledger.jsonl" if path.is_dir() else path
    p, nu = default_params(), args.nu
    scn_file = (path / "scenario.json" if path.is_dir()
                else path.parent / "scenario.json")
    if args.params:
        scn_file = Path(args.params)
    if scn_file.exists():
        scn = parse_scenario(scn_file.read_text())
        p, nu = scn.params, nu or scn.nu
    if not nu:
        raise ValidationError("nu", "pass --nu or provide scenario.json")
    records = []
    for line in ledger_file.read_text().splitlines():
        doc = json.loads(line)
        records.append(InteractionRecord(
            doc["t"], doc["x"], doc["mechanism"], doc["row"],
            doc["d_fw"], doc["d_fv"], doc["d_n"], doc["d_xi"], doc["data"]))
    violations = verify_ledger(records, p, nu)
    print(f"{len(records)} records, {len(violations)} violations")
    for v in violations[:100]:
        print(f"  {v}")
    return 1 if violations else 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="twophase-av",
        description="Wave-front tracking for two-phase traffic with an AV "
                    "flux constraint")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check the structural hypotheses")
    v.add_argument("scenario")
    v.set_defaults(fn=cmd_validate)

    r = sub.add_parser("riemann", help="solve a single Riemann problem")
    r.add_argument("--left", required=True, metavar="RHO,W")
    r.add_argument("--right", required=True, metavar="RHO,W")
    r.add_argument("--constrained", action="store_true")
    r.add_argument("--ubar", type=float, default=0.5)
    r.add_argument("--nu", type=int, default=0,
                   help="discretize rarefactions at this refinement")
    r.add_argument("--params", help="scenario file supplying model parameters")
    r.set_defaults(fn=cmd_riemann)

    s = sub.add_parser("simulate", help="run a Cauchy problem")
    s.add_argument("scenario", nargs="?")
    s.add_argument("--seed", type=int, help="random scenario instead of a file")
    s.add_argument("--nu", type=int)
    s.add_argument("--horizon", type=float)
    s.add_argument("--probes")
    s.add_argument("--window")
    s.add_argument("--out-dir")
    s.set_defaults(fn=cmd_simulate)

    c = sub.add_parser("converge", help="refinement sweep")
    c.add_argument("scenario", nargs="?")
    c.add_argument("--seed", type=int)
    c.add_argument("--nu-list", default="10,20,40")
    c.add_argument("--probes")
    c.add_argument("--horizon", type=float)
    c.add_argument("--window")
    c.add_argument("--out-dir")
    c.set_defaults(fn=cmd_converge)

    a = sub.add_parser("audit", help="verify a ledger against the tables")
    a.add_argument("path", help="out-dir or ledger.jsonl")
    a.add_argument("--params", help="scenario file for model parameters")
    a.add_argument("--nu", type=int)
    a.set_defaults(fn=cmd_audit)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (HypothesisViolation, ParseError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (GuardTripped, TableViolation) as e:
        print(f"guard: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
