"""Command-line entry point: ``hoelderfio <subcommand> [options]``."""

import argparse
import csv
import json
import math
import os
import sys

from . import experiments, fio, grid, tf
from .growth import fit_growth_exponent
from .phases import PhaseSpec, verify_hoelder_hypotheses, verify_l2_hypotheses


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _specs(args, kind="schur_growth"):
    cfg = experiments.default_config(kind)
    user = _load_config(args.config)
    cfg.update(user)
    return PhaseSpec.from_json(cfg["phase"]), experiments.SymbolSpec.from_json(cfg["symbol"]), cfg


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(experiments._clean(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_kernel(args):
    phase, symbol, cfg = _specs(args)
    policy = fio.GridPolicy(args.points, args.half_extent)
    sl = fio.synthesize_kernel_slice(phase, symbol, args.y, policy)
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, f"kernel_y{args.y:g}")
    grid.save_binary(sl.kernel, base + ".bin")
    grid.save_csv(sl.kernel, base + ".csv")
    _write_json(base + ".json", {"y": args.y, "schur": sl.schur_value, "grid": sl.grid_policy_used.to_json(),
                                 "phase": cfg["phase"], "symbol": cfg["symbol"]})
    print(f"schur value {sl.schur_value:.12g} on N={sl.grid_policy_used.points_per_axis}")
    return 0


def cmd_schur(args):
    phase, symbol, cfg = _specs(args)
    ys = args.y or cfg["y_schedule"]
    slices = fio.schur_slices(phase, symbol, ys, None, fio.GridPolicy(), args.threads)
    pts = [(float(abs(s.y[0])), s.schur_value) for s in slices]
    os.makedirs(args.out, exist_ok=True)
    fio.write_schur_csv(pts, os.path.join(args.out, "schur.csv"))
    fio.write_sidecar(os.path.join(args.out, "schur.json"), experiments._clean(cfg),
                      [s.grid_policy_used.to_json() for s in slices])
    for y, v in pts:
        print(f"{y:12.6g} {v:.12g}")
    return 0


def cmd_growth_fit(args):
    with open(args.input) as fh:
        rows = list(csv.reader(fh))
    pts = [(float(r[0]), float(r[1])) for r in rows[1:] if r]
    fit = fit_growth_exponent(pts, (args.fit_min, args.fit_max))
    out = json.dumps(experiments._clean(fit.to_json()), sort_keys=True)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "growth_fit.json"), "w") as fh:
            fh.write(out + "\n")
    print(out)
    return 0


def cmd_l2norm(args):
    phase, symbol, cfg = _specs(args, "l2_bounded")
    g = grid.make_grid(1, args.points, args.half_extent)
    eps = tuple(2.0**-k for k in range(2, 10)) if args.concentration else ()
    plan = fio.ProbePlan(g, atoms=args.atoms, seed=args.seed or 0, epsilons=eps)
    probe = fio.l2_probe(phase, symbol, plan)
    os.makedirs(args.out, exist_ok=True)
    fio.write_profile_csv(probe.concentration_profile, os.path.join(args.out, "concentration.csv"))
    _write_json(os.path.join(args.out, "l2probe.json"), {
        "power_iteration_estimate": probe.power_iteration_estimate,
        "power_history": probe.power_history,
        "rayleigh_values": probe.rayleigh_values,
        "phase": cfg["phase"], "symbol": cfg["symbol"], "grid": {"N": args.points, "R": args.half_extent},
    })
    print(f"power-iteration estimate {probe.power_iteration_estimate:.6f}")
    return 0


def cmd_tfnorm(args):
    f = grid.load_binary(args.input)
    q = math.inf if args.q == "inf" else float(args.q)
    p = math.inf if args.p == "inf" else float(args.p)
    if args.norm == "m1":
        value = tf.m1_norm(f)
    else:
        S = tf.stft(f)
        value = tf.modulation_norm(S, p, q) if args.norm == "modulation" else tf.amalgam_norm(S, p, q)
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            tf.write_stft_csv(S, os.path.join(args.out, "stft.csv"))
    print(f"{value:.12g}")
    return 0


def cmd_verify_phase(args):
    phase, _, cfg = _specs(args)
    rep = verify_hoelder_hypotheses(phase, args.max_order, args.samples, args.seed or 0, dim=args.dim)
    l2 = verify_l2_hypotheses(phase, 1e-4, 1.0)
    out = {"hoelder": rep.__dict__, "l2": l2.__dict__, "phase": cfg["phase"]}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "verify_phase.json"), out)
    print(json.dumps(experiments._clean(out), sort_keys=True))
    return 0 if rep.passed else 1


def cmd_run(args):
    user = _load_config(args.config)
    if args.seed is not None:
        user["seed"] = args.seed
    cfg = experiments.ExperimentConfig.from_dict(args.kind, user)
    result = experiments.run_experiment(cfg, threads=args.threads)
    out = args.out or cfg.get("outputs", {}).get("dir", ".")
    paths = experiments.emit_report([result], out, stem=args.kind)
    print(f"{args.kind}: {'PASS' if result.passed else 'FAIL'} ({result.status})")
    for p in paths:
        print(f"  wrote {p}")
    return 0 if result.passed else 1


def build_parser():
    def globals_parser(defaults):
        # subcommands repeat the global flags with suppressed defaults, so a
        # flag given before the subcommand is not overwritten by its default
        p = argparse.ArgumentParser(add_help=False)
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        p.add_argument("--config", default=d(None), help="JSON configuration file")
        p.add_argument("--out", default=d("out"), help="output directory")
        p.add_argument("--seed", type=int, default=d(None))
        p.add_argument("--threads", type=int, default=d(1))
        return p

    common = globals_parser(False)
    ap = argparse.ArgumentParser(prog="hoelderfio", description=__doc__, parents=[globals_parser(True)])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", parents=[common], help="synthesize one kernel slice")
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--half-extent", type=float, default=None)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("schur", parents=[common], help="Schur integrals along a |y| schedule")
    p.add_argument("--y", type=float, nargs="*")
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("growth-fit", parents=[common], help="fit a growth exponent to a two-column CSV")
    p.add_argument("input")
    p.add_argument("--fit-min", type=float, default=4.0)
    p.add_argument("--fit-max", type=float, default=256.0)
    p.set_defaults(func=cmd_growth_fit)

    p = sub.add_parser("l2norm", parents=[common], help="L^2 probes of the operator")
    p.add_argument("--points", type=int, default=4096)
    p.add_argument("--half-extent", type=float, default=256.0)
    p.add_argument("--atoms", type=int, default=16)
    p.add_argument("--concentration", action="store_true")
    p.set_defaults(func=cmd_l2norm)

    p = sub.add_parser("tfnorm", parents=[common], help="mixed time-frequency norms of a binary sample file")
    p.add_argument("input")
    p.add_argument("--norm", choices=["modulation", "amalgam", "m1"], default="modulation")
    p.add_argument("--p", default="2")
    p.add_argument("--q", default="2")
    p.set_defaults(func=cmd_tfnorm)

    p = sub.add_parser("verify-phase", parents=[common], help="check the derivative hypotheses of a phase")
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--dim", type=int, default=1)
    p.set_defaults(func=cmd_verify_phase)

    p = sub.add_parser("run", parents=[common], help="run a claim experiment")
    p.add_argument("--kind", required=True, choices=experiments.KINDS)
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
