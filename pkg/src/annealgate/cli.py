"""Command-line interface.

Subcommands
-----------
simulate       one gate run, populations printed
sweep          run a sweep config (YAML) and write its CSV
spectrum       level listing of an operator config (YAML)
reproduce      run a bundled experiment preset by name
export-dwave   build a device problem JSON from a device sweep config
emulate-dwave  run a device problem JSON and print counts
"""

from __future__ import annotations

import argparse
import json
import sys

import yaml

from . import gates, harness
from .evolution import populations
from .state import parse_state


def _cmd_simulate(args) -> int:
    psi0 = parse_state(args.initial)
    if args.gate == gates.X_ROTATION:
        rep = gates.x_rotation(args.h_z, args.T, args.dt, psi0)
    elif args.gate == gates.CONTROLLED_NOT:
        rep = gates.cnot(args.a, args.b, args.h_z, args.T, args.dt, psi0)
    else:
        print(f"unknown gate {args.gate!r}", file=sys.stderr)
        return 2
    fwd = populations(rep.checkpoints["forward"])
    rev = gates.drive_populations(rep.final_state)
    print(f"gate={args.gate} h_z={args.h_z} T={args.T} dt={args.dt} initial={args.initial}")
    print("forward populations: " + ", ".join(f"{k}={v:.6f}" for k, v in fwd.items()))
    print("reverse populations: " + ", ".join(f"{k}={v:.6f}" for k, v in rev.items()))
    print(f"norm drift: {rep.norm_drift:.3e}  steps: {rep.steps}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = harness.ExperimentConfig.from_yaml(args.config)
    result = harness.run_sweep(cfg, workers=args.workers)
    out = args.out or cfg.output or f"{cfg.name}.csv"
    harness.emit_csv(result, out)
    failures = [r for r in result.rows if r.error]
    print(f"wrote {len(result.rows)} rows to {out} ({len(failures)} failed points)")
    for row in failures:
        print(f"  h_z={row.h_z} T={row.T} {row.initial_state}: {row.error}", file=sys.stderr)
    return 0 if not failures else 1


def _cmd_spectrum(args) -> int:
    with open(args.config) as fh:
        data = yaml.safe_load(fh)
    op = harness.parse_operator_config(data)
    print(harness.spectrum_report(op, tol=args.tolerance))
    return 0


def _cmd_reproduce(args) -> int:
    result = harness.run_preset(args.preset, dt=args.dt)
    out = args.out or f"{args.preset.replace('-', '_')}.csv"
    harness.emit_csv(result, out)
    failures = [r for r in result.rows if r.error]
    print(f"wrote {len(result.rows)} rows to {out} ({len(failures)} failed points)")
    return 0 if not failures else 1


def _cmd_export_dwave(args) -> int:
    cfg = harness.load_preset(args.preset) if args.preset else \
        harness.DWaveSweepConfig.from_mapping(yaml.safe_load(open(args.config)))
    if not isinstance(cfg, harness.DWaveSweepConfig):
        print("config does not describe a device sweep", file=sys.stderr)
        return 2
    problem = cfg.problem(args.h_z)
    doc = harness.export_dwave(problem, args.out)
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def _cmd_emulate_dwave(args) -> int:
    problem = harness.import_dwave(args.problem)
    counts = harness.emulate_dwave(problem, args.seed, dt=args.dt)
    for label, count in counts.items():
        print(f"{label}: {count}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="annealgate",
                                     description="annealed gate simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one gate pipeline")
    p.add_argument("--gate", default=gates.X_ROTATION,
                   choices=[gates.X_ROTATION, gates.CONTROLLED_NOT])
    p.add_argument("--h-z", dest="h_z", type=float, default=0.0)
    p.add_argument("--T", type=float, default=2000.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--a", type=float, default=0.3)
    p.add_argument("--b", type=float, default=0.5)
    p.add_argument("--initial", default="+")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run a sweep config and write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=2)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("spectrum", help="level listing of an operator config")
    p.add_argument("--config", required=True)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("reproduce", help="run a bundled experiment preset")
    p.add_argument("preset", choices=list(harness.PRESETS))
    p.add_argument("--out")
    p.add_argument("--dt", type=float, default=None,
                   help="override the preset step size (coarser = faster, less accurate)")
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("export-dwave", help="write a device problem JSON")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=["dwave-xrot", "dwave-cnot"])
    group.add_argument("--config")
    p.add_argument("--h-z", dest="h_z", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_dwave)

    p = sub.add_parser("emulate-dwave", help="run a device problem JSON")
    p.add_argument("--problem", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--dt", type=float, default=0.01)
    p.set_defaults(func=_cmd_emulate_dwave)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
