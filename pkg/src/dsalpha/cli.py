"""Command-line interface.

Subcommands: simulate, ground-state, modulation, sweep, fit.  Exit code 0
covers every scientific outcome (blow-up included); 2 flags configuration
or input-format errors, 1 unexpected I/O failures.
"""

import argparse
import json
import os
import sys

import numpy as np

from .config import load_config
from .errors import ConfigError, DsalphaError, InsufficientDataError, SnapshotFormatError
from .harness import (
    build_spec,
    format_float,
    ground_state_for,
    read_diagnostics_csv,
    run_simulation,
    sweep_alpha,
)
from .modulation import ReducedState, collapse_fit, compute_constants, integrate_reduced, solve_linearized
from .snapshots import write_snapshot


def _cmd_simulate(args):
    cfg = load_config(args.config)
    run_simulation(cfg, resume_from=args.resume)
    return 0


def _cmd_ground_state(args):
    cfg = load_config(args.config)
    if not cfg.output_dir:
        raise ConfigError("output.dir is required for ground-state solves")
    os.makedirs(cfg.output_dir, exist_ok=True)
    gs = ground_state_for(cfg)
    spec = build_spec(cfg)
    s_path = os.path.join(cfg.output_dir, "ground_S.snap")
    x_path = os.path.join(cfg.output_dir, "ground_X.snap")
    write_snapshot(s_path, _as_complex(gs.S), 0.0, spec)
    write_snapshot(x_path, _as_complex(gs.X), 0.0, spec)
    meta = {
        "lambda": gs.lam,
        "residual": gs.residual,
        "mass": gs.mass,
        "grad_S2_sq": gs.grad_S2_sq,
        "second_moment": gs.second_moment,
        "beta": gs.beta,
        "rho": gs.rho,
        "nu": gs.nu,
    }
    with open(os.path.join(cfg.output_dir, "ground_meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    print(
        f"ground state: residual={gs.residual:.3e} mass={format_float(gs.mass)} "
        f"files={s_path},{x_path}"
    )
    return 0


def _as_complex(field):
    from .fields import complex_field

    return complex_field(field.grid, field.values.astype(np.complex128))


def _cmd_modulation(args):
    cfg = load_config(args.config)
    if not cfg.output_dir:
        raise ConfigError("output.dir is required for modulation runs")
    os.makedirs(cfg.output_dir, exist_ok=True)
    spec = build_spec(cfg)
    gs = ground_state_for(cfg)
    reduced0 = ReducedState.initial(cfg.reduced_l0, cfg.reduced_lt0, cfg.alpha, b0=cfg.reduced_b0)
    consts = compute_constants(gs, spec, reduced0)

    gy = solve_linearized(gs, spec, "GY")
    hz = solve_linearized(gs, spec, "HZ")

    const_path = os.path.join(cfg.output_dir, "constants.csv")
    with open(const_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("C1,C2,C3,C4,S_mass,inner_SG,inner_SH,residual_GY,residual_HZ\n")
        fh.write(
            ",".join(
                format_float(v)
                for v in (
                    consts.C1,
                    consts.C2,
                    consts.C3,
                    consts.C4,
                    consts.S_mass,
                    gy.inner_with_S,
                    hz.inner_with_S,
                    gy.residual,
                    hz.residual,
                )
            )
            + "\n"
        )

    t_end = cfg.reduced_t_end if cfg.reduced_t_end is not None else cfg.t_end
    traj = integrate_reduced(consts, cfg.alpha, cfg.reduced_l0, cfg.reduced_lt0, t_end)
    traj_path = os.path.join(cfg.output_dir, "reduced_trajectory.csv")
    with open(traj_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,L,L_t,tau,b,eps\n")
        for s in traj.states:
            fh.write(
                ",".join(format_float(v) for v in (s.t, s.L, s.L_t, s.tau, s.b, s.eps)) + "\n"
            )
    print(
        f"modulation: C1={format_float(consts.C1)} C2={format_float(consts.C2)} "
        f"L_min={format_float(traj.l_min)} q_drift={traj.q_drift:.3e} "
        f"files={const_path},{traj_path}"
    )
    return 0


def _cmd_sweep(args):
    cfg = load_config(args.config)
    if args.alphas:
        try:
            alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
        except ValueError:
            raise ConfigError(f"--alphas: cannot parse {args.alphas!r}")
    else:
        alphas = cfg.sweep_alphas
    rows, path = sweep_alpha(cfg, alphas)
    print(f"sweep: {len(rows)} rows -> {path}")
    return 0


def _cmd_fit(args):
    records = read_diagnostics_csv(args.diagnostics)
    fit = collapse_fit(records)
    print(
        f"fit: t_star={format_float(fit.t_star)} exponent={format_float(fit.exponent)} "
        f"rms={fit.fit_rms:.3e}"
    )
    out = args.output or (os.path.splitext(args.diagnostics)[0] + "_b_of_tau.csv")
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("tau,b\n")
        for tau, b in zip(fit.tau, fit.b):
            fh.write(f"{format_float(tau)},{format_float(b)}\n")
    print(f"b(tau) table -> {out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="dsalpha",
        description="Pseudospectral simulator and modulation toolkit for the "
        "elliptic-elliptic wave-envelope systems and their Helmholtz regularizations.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one simulation from a config file")
    s.add_argument("config")
    s.add_argument("--resume", default=None, help="snapshot file to resume from")
    s.set_defaults(func=_cmd_simulate)

    s = sub.add_parser("ground-state", help="solve the steady profile pair")
    s.add_argument("config")
    s.set_defaults(func=_cmd_ground_state)

    s = sub.add_parser("modulation", help="constants, linearized solves, reduced dynamics")
    s.add_argument("config")
    s.set_defaults(func=_cmd_modulation)

    s = sub.add_parser("sweep", help="alpha sweep of the deepest focusing scale")
    s.add_argument("config")
    s.add_argument("--alphas", default=None, help="comma-separated alpha values")
    s.set_defaults(func=_cmd_sweep)

    s = sub.add_parser("fit", help="fit collapse laws from a diagnostics CSV")
    s.add_argument("diagnostics")
    s.add_argument("--output", default=None, help="b(tau) table destination")
    s.set_defaults(func=_cmd_fit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SnapshotFormatError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DsalphaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
