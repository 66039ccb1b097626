import os

import numpy as np
import pytest

from dsalpha import ModelKind, RunStatus
from dsalpha.cli import main as cli_main
from dsalpha.config import RunConfig, load_config
from dsalpha.harness import (
    gaussian_amplitude_for_mass,
    gaussian_state,
    read_diagnostics_csv,
    run_simulation,
    sweep_alpha,
    write_diagnostics_csv,
)
from dsalpha.snapshots import read_snapshot


def base_config(tmp_path, **overrides):
    cfg = RunConfig(
        kind=ModelKind.RDS3,
        beta=1.0,
        rho=-1.0,
        nu=1.0,
        alpha=0.2,
        nx=64,
        ny=64,
        lx=16.0,
        ly=16.0,
        dt=2e-3,
        dt_min=1e-10,
        dt_max=2e-3,
        adaptive=True,
        cfl_const=0.1,
        t_end=0.2,
        ic_amplitude=1.5,
        ic_width=1.2,
        output_dir=str(tmp_path / "out"),
        record_every=5,
    )
    for k, v in overrides.items():
        setattr(cfg, k, v)
    return cfg


class TestRunSimulation:
    def test_t_end_zero(self, tmp_path):
        cfg = base_config(tmp_path, t_end=0.0, snapshot_every=10)
        arts = run_simulation(cfg)
        assert arts.outcome.status is RunStatus.REACHED_T_END
        recs = read_diagnostics_csv(arts.diagnostics_path)
        assert len(recs) == 1 and recs[0].t == 0.0
        assert len(arts.snapshot_paths) == 1  # the t=0 snapshot
        assert os.path.exists(arts.final_snapshot_path)

    def test_determinism_byte_identical(self, tmp_path):
        cfg1 = base_config(tmp_path, output_dir=str(tmp_path / "a"))
        cfg2 = base_config(tmp_path, output_dir=str(tmp_path / "b"))
        a = run_simulation(cfg1)
        b = run_simulation(cfg2)
        with open(a.diagnostics_path, "rb") as f1, open(b.diagnostics_path, "rb") as f2:
            assert f1.read() == f2.read()

    def test_csv_round_trip_lossless(self, tmp_path):
        cfg = base_config(tmp_path)
        arts = run_simulation(cfg)
        recs = arts.outcome.records
        back = read_diagnostics_csv(arts.diagnostics_path)
        for r, s in zip(recs, back):
            assert r.t == s.t and r.mass == s.mass and r.hamiltonian == s.hamiltonian

    def test_checkpoint_resume_matches_uninterrupted(self, tmp_path):
        # full run writes snapshots; resuming from mid-run must land on the
        # same final diagnostics to 1e-12 (bit-equal state, memoryless dt law)
        full = base_config(tmp_path, output_dir=str(tmp_path / "full"),
                           t_end=0.2, snapshot_every=25)
        a = run_simulation(full)
        mid = a.snapshot_paths[len(a.snapshot_paths) // 2]

        resumed = base_config(tmp_path, output_dir=str(tmp_path / "res"),
                              t_end=0.2, snapshot_every=0)
        b = run_simulation(resumed, resume_from=mid)
        ra, rb = a.outcome.records[-1], b.outcome.records[-1]
        assert rb.t == pytest.approx(ra.t, rel=1e-12)
        for fname in ("mass", "hamiltonian", "grad_norm", "max_amp", "L_est"):
            va, vb = getattr(ra, fname), getattr(rb, fname)
            assert vb == pytest.approx(va, rel=1e-12, abs=1e-300)

    def test_final_snapshot_reloads(self, tmp_path):
        cfg = base_config(tmp_path)
        arts = run_simulation(cfg)
        field, t, meta = read_snapshot(arts.final_snapshot_path)
        assert t == pytest.approx(cfg.t_end)
        assert meta["alpha"] == cfg.alpha
        assert np.array_equal(field.values, arts.outcome.final_state.values)

    def test_ic_from_file(self, tmp_path):
        cfg = base_config(tmp_path, output_dir=str(tmp_path / "one"), t_end=0.0)
        arts = run_simulation(cfg)
        cfg2 = base_config(tmp_path, output_dir=str(tmp_path / "two"), t_end=0.0)
        cfg2.ic_kind = "file"
        cfg2.ic_path = arts.final_snapshot_path
        arts2 = run_simulation(cfg2)
        assert np.array_equal(
            arts2.outcome.final_state.values, arts.outcome.final_state.values
        )


class TestSweep:
    def test_rows_sorted_and_deterministic(self, tmp_path):
        cfg = base_config(tmp_path, t_end=0.1, reduced_t_end=1.0)
        rows, path = sweep_alpha(cfg, [0.4, 0.2, 0.2])
        assert [r[0] for r in rows] == [0.2, 0.2, 0.4]
        assert rows[0] == rows[1]  # duplicated alpha gives identical rows
        with open(path) as fh:
            header = fh.readline().strip()
        assert header == "alpha,L_min_pde,L_min_reduced,C1,C2"

    def test_reduced_l_min_positive_and_increasing_in_alpha(self, tmp_path):
        cfg = base_config(tmp_path, t_end=0.05, reduced_t_end=2.0)
        rows, _ = sweep_alpha(cfg, [0.1, 0.2, 0.4])
        lred = [r[2] for r in rows]
        assert all(v > 0 for v in lred)
        assert lred[0] < lred[1] < lred[2]

    def test_rejects_bad_alphas(self, tmp_path):
        from dsalpha import ConfigError

        cfg = base_config(tmp_path)
        with pytest.raises(ConfigError):
            sweep_alpha(cfg, [0.1])
        with pytest.raises(ConfigError):
            sweep_alpha(cfg, [0.1, -0.2])


CONFIG_TEMPLATE = """
model.kind = rds3
model.beta = 1.0
model.rho = -1.0
model.nu = 1.0
model.alpha = 0.2
grid.nx = 64
grid.ny = 64
grid.lx = 16
grid.ly = 16
step.dt = 2e-3
step.dt_max = 2e-3
step.t_end = 0.05
ic.amplitude = 1.5
ic.width = 1.2
output.record_every = 5
output.dir = {out}
"""


class TestCli:
    def test_simulate_exit_zero(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(CONFIG_TEMPLATE.format(out=tmp_path / "out"))
        assert cli_main(["simulate", str(cfg)]) == 0
        assert "status=reached_t_end" in capsys.readouterr().out

    def test_config_error_exit_two(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("model.kind = nosuch\nmodel.beta=1\nmodel.rho=1\nmodel.nu=1\n")
        assert cli_main(["simulate", str(cfg)]) == 2

    def test_fit_subcommand(self, tmp_path, capsys):
        ts = np.linspace(0.0, 0.999, 300)
        from dsalpha.stepping import DiagnosticsRecord

        recs = [
            DiagnosticsRecord(t=float(t), dt=1e-3, mass=1.0, hamiltonian=0.0,
                              grad_norm=float((1 - t) ** -0.5), max_amp=1.0,
                              L_est=float(np.sqrt(1 - t)))
            for t in ts
        ]
        path = tmp_path / "diag.csv"
        write_diagnostics_csv(path, recs)
        assert cli_main(["fit", str(path)]) == 0
        out = capsys.readouterr().out
        assert "exponent=" in out
        assert (tmp_path / "diag_b_of_tau.csv").exists()

    def test_fit_insufficient_data_exit_two(self, tmp_path):
        from dsalpha.stepping import DiagnosticsRecord

        recs = [
            DiagnosticsRecord(t=float(t), dt=1e-3, mass=1.0, hamiltonian=0.0,
                              grad_norm=1.0, max_amp=1.0, L_est=float(np.sqrt(1.01 - t)))
            for t in np.linspace(0, 1, 10)
        ]
        path = tmp_path / "short.csv"
        write_diagnostics_csv(path, recs)
        assert cli_main(["fit", str(path)]) == 2
