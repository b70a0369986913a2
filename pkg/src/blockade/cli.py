"""Command-line interface.

Subcommands:
  eigen    closed-form and numeric manifold frequencies, blockade conditions
  steady   solve one parameter point and print its observables
  sweep    run a sweep from a config file
  fig      run a named figure preset
  presets  list the available presets
"""

import argparse
import os
import sys

from . import dynamics, observables, plotting, sweep
from .model import (ModelParams, cpb_detunings, first_manifold,
                    second_manifold, tpb_detunings)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _add_common(p):
    p.add_argument("--config", metavar="PATH",
                   help="sweep config file (sections [model] [sweep] "
                        "[solver] [output])")
    p.add_argument("--preset", metavar="NAME",
                   help="figure preset name (see 'presets')")
    p.add_argument("--out", metavar="PATH", help="output file path")
    p.add_argument("--format", choices=("csv", "svg", "both"),
                   help="output format")
    p.add_argument("--trunc", type=int, metavar="N",
                   help="Fock levels per photon mode (overrides config)")
    p.add_argument("--gamma", type=float, metavar="X",
                   help="atomic decay rate in units of kappa")
    p.add_argument("--threads", type=int, metavar="K",
                   help="worker count (default: BLOCKADE_THREADS or 1)")
    p.add_argument("--solver", choices=("direct", "evolve"),
                   help="steady-state method")
    p.add_argument("--points", type=int, metavar="N",
                   help="override the number of grid points per axis")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="blockade",
        description="Photon blockade in a driven three-wave-mixing system "
                    "with an embedded two-level atom.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="manifold frequencies and blockade "
                                     "conditions")
    _add_common(p)
    p.add_argument("--g", type=float, help="three-wave-mixing coefficient")
    p.add_argument("--J", type=float, help="atom-cavity coupling")
    p.add_argument("--delta-a", type=float, dest="delta_a",
                   help="mode-a detuning")

    for name, help_ in (("steady", "solve one point"),
                        ("sweep", "run a configured sweep"),
                        ("fig", "run a figure preset")):
        p = sub.add_parser(name, help=help_)
        _add_common(p)

    sub.add_parser("presets", help="list figure presets")
    return ap


def _load_cfg(args) -> sweep.SweepConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = sweep.load_config(fh.read())
    elif args.preset:
        cfg = sweep.preset(args.preset)
    else:
        cfg = sweep.SweepConfig(base=ModelParams(),
                                axis1=sweep.Axis("delta_a", -20.0, 20.0,
                                                 201))
    overrides = {}
    if args.trunc is not None:
        overrides.update(n_a=args.trunc, n_b=args.trunc, n_c=args.trunc)
    if args.gamma is not None:
        overrides["gamma"] = args.gamma
    if overrides:
        cfg.base = cfg.base.with_(**overrides)
    if getattr(args, "solver", None):
        cfg.method = args.solver
    if args.threads is not None:
        cfg.workers = args.threads
    else:
        cfg.workers = sweep.default_workers()
    if args.out:
        cfg.out_path = args.out
    if args.format:
        cfg.out_format = args.format
    if getattr(args, "points", None):
        cfg.axis1 = sweep.Axis(cfg.axis1.name, cfg.axis1.start,
                               cfg.axis1.stop, args.points)
        if cfg.axis2 is not None:
            cfg.axis2 = sweep.Axis(cfg.axis2.name, cfg.axis2.start,
                                   cfg.axis2.stop, args.points)
    return cfg


def _print_manifolds(params: ModelParams):
    m1 = first_manifold(params)
    m2 = second_manifold(params)
    route1 = "closed form" if m1.closed_form else "numeric"
    route2 = "closed form" if m2.closed_form else "numeric"
    print(f"parameters: g={params.g} J={params.J} delta_a={params.delta_a}")
    print(f"one-excitation frequencies ({route1}): "
          + ", ".join(f"{v:.6f}" for v in m1.values))
    print(f"two-excitation frequencies ({route2}): "
          + ", ".join(f"{v:.6f}" for v in m2.values))
    cpb = cpb_detunings(params.g, params.J)
    print(f"CPB condition: delta_a = {cpb[0]:+.4f} or {cpb[1]:+.4f}")
    tpb = tpb_detunings(params.g, params.J)
    d1, d1m = tpb["plus_branch"]
    d2, d2m = tpb["minus_branch"]
    print(f"2PB condition (A+sqrt(B) branch): delta_a = {d1:+.4f} or "
          f"{d1m:+.4f}")
    print(f"2PB condition (A-sqrt(B) branch): delta_a = {d2:+.4f} or "
          f"{d2m:+.4f}")


def _print_observables(obs: observables.ObservableSet, residual: float):
    def show(v):
        return "undefined" if v is None else f"{v:.6e}"

    print(f"N_a  = {show(obs.N_a)}")
    print(f"N_b  = {show(obs.N_b)}")
    print(f"N_c  = {show(obs.N_c)}")
    print(f"g2_a = {show(obs.g2_a)}")
    print(f"g2_b = {show(obs.g2_b)}")
    print(f"g2_c = {show(obs.g2_c)}")
    print(f"g3_a = {show(obs.g3_a)}")
    print(f"tag  = {obs.tag}")
    print(f"residual = {residual:.3e}")


def _emit(cfg: sweep.SweepConfig, records) -> None:
    fmt = cfg.out_format
    base, ext = os.path.splitext(cfg.out_path)
    csv_path = cfg.out_path if ext.lower() == ".csv" else base + ".csv"
    svg_path = cfg.out_path if ext.lower() == ".svg" else base + ".svg"
    if fmt in ("csv", "both"):
        sweep.write_csv(records, csv_path)
        print(f"wrote {csv_path}")
    if fmt in ("svg", "both"):
        cols = ["g2_a", "g2_b", "g2_c", "g3_a"]
        plotting.write_svg_plot(records, cols, svg_path)
        print(f"wrote {svg_path}")
        n_path = base + "_brightness.svg"
        plotting.write_svg_plot(records, ["N_a", "N_b", "N_c"], n_path)
        print(f"wrote {n_path}")


def _run_grid(args) -> int:
    cfg = _load_cfg(args)
    records = sweep.run_sweep(cfg)
    failed = [i for i, r in enumerate(records) if r.failed]
    _emit(cfg, records)
    if failed:
        print(f"solver failed at grid indices: {failed}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cli_main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "presets":
            for name in sweep.preset_names():
                print(name)
            return EXIT_OK
        if args.command == "eigen":
            cfg = _load_cfg(args)
            p = cfg.base
            overrides = {k: getattr(args, k) for k in ("g", "J", "delta_a")
                         if getattr(args, k) is not None}
            if overrides:
                p = p.with_(**overrides)
            p = sweep.resolve_point(p, cfg.links)
            _print_manifolds(p)
            return EXIT_OK
        if args.command == "steady":
            cfg = _load_cfg(args)
            p = sweep.resolve_point(cfg.base, cfg.links)
            rho, residual = dynamics.steady_state(p, cfg.method)
            _print_observables(
                observables.compute_observables(rho, p.space()), residual)
            return EXIT_OK
        if args.command in ("sweep", "fig"):
            if args.command == "fig" and not (args.preset or args.config):
                print("fig requires --preset or --config", file=sys.stderr)
                return EXIT_USAGE
            if args.command == "sweep" and not (args.config or args.preset):
                print("sweep requires --config or --preset",
                      file=sys.stderr)
                return EXIT_USAGE
            return _run_grid(args)
    except (sweep.ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (dynamics.SteadyStateError, dynamics.ConvergenceError,
            RuntimeError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_USAGE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
