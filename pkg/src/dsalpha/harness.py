"""Run orchestration: initial data, diagnostics persistence, the flagship
experiments, and checkpoint/resume.

Diagnostics go to CSV with 17-significant-digit formatting so that every
f64 round-trips losslessly; identical configs produce byte-identical files.
Scientific outcomes (including blow-up) are successes: they are reported in
the status field, never through the exit code.
"""

import os
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .config import RunConfig
from .errors import ConfigError, GridMismatchError
from .fields import Field, complex_field
from .grid import Grid2D
from .ground_state import GroundState, PetviashviliConfig, solve_ground_state
from .models import ModelSpec, ModelKind
from .modulation import (
    ModulationConstants,
    ReducedState,
    compute_constants,
    integrate_reduced,
)
from .snapshots import read_snapshot, write_snapshot
from .spectral import fft2, grad_norm_spectrum
from .stepping import DiagnosticsRecord, RunOutcome, StepControl, integrate, ifrk4_step

CSV_HEADER = "t,dt,mass,hamiltonian,grad_norm,max_amp,L_est"


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_diagnostics_csv(path, records: List[DiagnosticsRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(
                ",".join(
                    format_float(v)
                    for v in (r.t, r.dt, r.mass, r.hamiltonian, r.grad_norm, r.max_amp, r.L_est)
                )
                + "\n"
            )


def read_diagnostics_csv(path) -> List[DiagnosticsRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ConfigError(f"unexpected diagnostics header in {path}: {header!r}")
        for line in fh:
            vals = [float(v) for v in line.strip().split(",")]
            records.append(DiagnosticsRecord(*vals))
    return records


def build_grid(cfg: RunConfig) -> Grid2D:
    return Grid2D(cfg.nx, cfg.ny, cfg.lx, cfg.ly)


def build_spec(cfg: RunConfig) -> ModelSpec:
    return ModelSpec(cfg.kind, cfg.beta, cfg.rho, cfg.nu, cfg.alpha)


def gaussian_state(grid: Grid2D, amplitude, width, center=(0.0, 0.0), chirp=0.0) -> Field:
    """amplitude * exp(-r^2/(2 width^2)) * exp(i chirp r^2), centered."""
    r2 = (grid.xg - center[0]) ** 2 + (grid.yg - center[1]) ** 2
    values = amplitude * np.exp(-r2 / (2.0 * width**2)) * np.exp(1j * chirp * r2)
    return complex_field(grid, values)


def gaussian_amplitude_for_mass(target_mass, width) -> float:
    """Amplitude giving |v|_2^2 = target_mass for the Gaussian above."""
    return float(np.sqrt(target_mass / (np.pi * width**2)))


def initial_state(cfg: RunConfig, grid: Grid2D) -> Field:
    if cfg.ic_kind == "gaussian":
        return gaussian_state(grid, cfg.ic_amplitude, cfg.ic_width, cfg.ic_center, cfg.ic_chirp)
    field, _, _ = read_snapshot(cfg.ic_path)
    if field.grid != grid:
        raise ConfigError(
            f"initial-condition file grid {field.grid} does not match config grid {grid}"
        )
    return field


def ground_state_for(cfg: RunConfig, grid: Optional[Grid2D] = None) -> GroundState:
    if grid is None:
        if cfg.ground_grid is not None:
            grid = Grid2D(*cfg.ground_grid)
        else:
            grid = build_grid(cfg)
    pcfg = PetviashviliConfig(
        gamma=cfg.ground_gamma,
        tol=cfg.ground_tol,
        max_iter=cfg.ground_max_iter,
        continuation_steps=cfg.ground_continuation_steps,
    )
    return solve_ground_state(grid, cfg.beta, cfg.rho, cfg.nu, pcfg)


@dataclass
class SimulationArtifacts:
    outcome: RunOutcome
    diagnostics_path: str
    final_snapshot_path: str
    snapshot_paths: List[str]


def run_simulation(
    cfg: RunConfig,
    resume_from: Optional[str] = None,
    grad_ref: Optional[float] = None,
) -> SimulationArtifacts:
    """Run one simulation as configured, writing all artifacts to disk."""
    if not cfg.output_dir:
        raise ConfigError("output.dir is required to run a simulation")
    os.makedirs(cfg.output_dir, exist_ok=True)
    if not os.access(cfg.output_dir, os.W_OK):
        raise ConfigError(f"output directory not writable: {cfg.output_dir}")

    grid = build_grid(cfg)
    spec = build_spec(cfg)

    t0 = 0.0
    if resume_from is not None:
        v0, t0, _ = read_snapshot(resume_from)
        if v0.grid != grid:
            raise ConfigError(f"checkpoint grid {v0.grid} does not match config grid {grid}")
    else:
        v0 = initial_state(cfg, grid)

    control = StepControl(
        dt=cfg.dt,
        dt_min=cfg.dt_min,
        dt_max=cfg.dt_max,
        adaptive=cfg.adaptive,
        cfl_const=cfg.cfl_const,
        t_end=max(cfg.t_end - t0, 0.0),
        amp_max=cfg.amp_max,
    )

    snapshot_paths = []

    def writer(step, t, field):
        path = os.path.join(cfg.output_dir, f"snapshot_{step:08d}.snap")
        write_snapshot(path, field, t0 + t, spec)
        snapshot_paths.append(path)

    if cfg.stepper == "ifrk4":
        outcome = _integrate_ifrk4(v0, spec, control, cfg.record_every, grad_ref)
    else:
        outcome = integrate(
            v0,
            spec,
            control,
            record_every=cfg.record_every,
            grad_ref=grad_ref,
            snapshot_every=cfg.snapshot_every,
            snapshot_writer=writer if cfg.snapshot_every > 0 else None,
        )

    # shift record times by the resume offset so files compose
    if t0 != 0.0:
        for r in outcome.records:
            r.t += t0
        outcome.t_final += t0

    diag_path = os.path.join(cfg.output_dir, "diagnostics.csv")
    write_diagnostics_csv(diag_path, outcome.records)
    final_path = os.path.join(cfg.output_dir, "final.snap")
    write_snapshot(final_path, outcome.final_state, outcome.t_final, spec)

    print(
        f"status={outcome.status.value} t_final={format_float(outcome.t_final)} "
        f"steps={outcome.steps} records={len(outcome.records)} "
        f"mass_drift={outcome.max_mass_drift:.3e}"
    )
    return SimulationArtifacts(
        outcome=outcome,
        diagnostics_path=diag_path,
        final_snapshot_path=final_path,
        snapshot_paths=snapshot_paths,
    )


def _integrate_ifrk4(v0, spec, control, record_every, grad_ref):
    """Fixed-step IFRK4 driver used for cross-validation runs."""
    from .stepping import RunStatus, _record

    g = v0.grid
    values = np.array(v0.values, dtype=np.complex128, copy=True)
    if grad_ref is None:
        grad_ref = 1.0
    t = 0.0
    steps = 0
    m0 = np.sum((values * values.conj()).real) * g.cell_area
    amp_max = control.amp_max if control.amp_max is not None else 1e6 * max(
        float(np.max(np.abs(values))), 1e-300
    )
    records = [_record(g, spec, t, control.dt, values, grad_ref)]
    status = RunStatus.REACHED_T_END
    drift = 0.0
    while t < control.t_end:
        dt = min(control.dt, control.t_end - t)
        state = ifrk4_step(Field(g, values, "physical"), spec, dt)
        values = state.values
        t = control.t_end if t + dt >= control.t_end else t + dt
        steps += 1
        if not np.isfinite(values).all():
            status = RunStatus.BLOW_UP_DETECTED
            break
        m = np.sum((values * values.conj()).real) * g.cell_area
        drift = max(drift, abs(m - m0) / m0 if m0 > 0 else 0.0)
        if float(np.max(np.abs(values))) > amp_max:
            status = RunStatus.BLOW_UP_DETECTED
            records.append(_record(g, spec, t, dt, values, grad_ref))
            break
        if steps % record_every == 0 or t >= control.t_end:
            records.append(_record(g, spec, t, dt, values, grad_ref))
    if records[-1].t != t and status is not RunStatus.BLOW_UP_DETECTED:
        records.append(_record(g, spec, t, control.dt, values, grad_ref))
    out = RunOutcome(status=status, t_final=t, records=records, max_mass_drift=drift, steps=steps)
    out.final_state = Field(g, values, "physical")
    return out


SWEEP_HEADER = "alpha,L_min_pde,L_min_reduced,C1,C2"


def sweep_alpha(cfg: RunConfig, alphas: List[float], ground: Optional[GroundState] = None):
    """One row per alpha: deepest focusing scale of the PDE run and of the
    reduced dynamics, with the constants used.  Rows are ordered by alpha.
    """
    if len(alphas) < 2:
        raise ConfigError("sweep needs at least 2 alpha values")
    if any(a <= 0 for a in alphas):
        raise ConfigError("sweep alphas must all be positive")
    if cfg.kind is ModelKind.DSE:
        raise ConfigError("sweep applies to the regularized kinds only")
    if not cfg.output_dir:
        raise ConfigError("output.dir is required for a sweep")
    os.makedirs(cfg.output_dir, exist_ok=True)

    if ground is None:
        ground = ground_state_for(cfg)
    gS = grad_norm_spectrum(fft2(ground.S.values.astype(np.complex128)), ground.grid)

    rows = []
    completed = []
    for alpha in sorted(alphas):
        try:
            sub = RunConfig(**{**cfg.__dict__, "alpha": alpha})
            sub.output_dir = os.path.join(cfg.output_dir, f"alpha_{alpha:.6g}")
            spec = build_spec(sub)
            arts = run_simulation(sub, grad_ref=gS)
            l_min_pde = min(r.L_est for r in arts.outcome.records)

            reduced0 = ReducedState.initial(
                cfg.reduced_l0, cfg.reduced_lt0, alpha, b0=cfg.reduced_b0
            )
            consts = compute_constants(ground, spec, reduced0)
            traj = integrate_reduced(
                consts,
                alpha,
                cfg.reduced_l0,
                cfg.reduced_lt0,
                cfg.reduced_t_end if cfg.reduced_t_end is not None else cfg.t_end,
            )
            rows.append((alpha, l_min_pde, traj.l_min, consts.C1, consts.C2))
            completed.append(alpha)
        except ConfigError:
            raise ConfigError(
                f"sweep aborted at alpha={alpha}; completed rows: {completed}"
            )

    path = os.path.join(cfg.output_dir, "sweep.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for row in rows:
            fh.write(",".join(format_float(v) for v in row) + "\n")
    return rows, path
