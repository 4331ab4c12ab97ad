import csv
import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from dgpart.cli import main
from dgpart.config import ConfigError, build_manifest, load_manifest
from dgpart.presets import preset_config, preset_manifest, preset_names

SMOKE_CFG = """\
# quick smoke experiment
experiment = smoke
mode = partition
dim = 2
n = 32
shape = torus
k = 2
variant = alg1
adaptive = false
tau0 = 0.25
seed = 0
"""


def write_cfg(tmp_path: Path, text: str) -> Path:
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return p


def strip_wall(summary: dict) -> dict:
    return {k: v for k, v in summary.items() if not k.startswith("wall")}


# ------------------------------------------------------------ configuration

def test_config_rejects_k_zero(tmp_path):
    p = write_cfg(tmp_path, SMOKE_CFG.replace("k = 2", "k = 0"))
    with pytest.raises(ConfigError, match="'k'"):
        load_manifest(p)


def test_config_reports_unknown_key_with_line(tmp_path):
    p = write_cfg(tmp_path, SMOKE_CFG + "bogus_knob = 3\n")
    with pytest.raises(ConfigError, match=r"run\.cfg:12.*bogus_knob"):
        load_manifest(p)


def test_config_rejects_malformed_line(tmp_path):
    p = write_cfg(tmp_path, "experiment test\n")
    with pytest.raises(ConfigError, match="key = value"):
        load_manifest(p)


def test_config_rejects_unknown_shape(tmp_path):
    p = write_cfg(tmp_path, SMOKE_CFG.replace("shape = torus", "shape = blob"))
    with pytest.raises(ConfigError, match="blob"):
        load_manifest(p)


def test_config_shape_params_and_seed_list(tmp_path):
    p = write_cfg(
        tmp_path,
        SMOKE_CFG.replace("shape = torus", "shape = disk\nshape.radius = 1.0")
        .replace("seed = 0", "seed_list = 3, 5"),
    )
    m = load_manifest(p)
    assert m.shape_params == {"radius": 1.0}
    assert m.seeds == (3, 5)
    assert m.metric == "euclidean"


def test_cli_exit_code_on_bad_config(tmp_path, capsys):
    p = write_cfg(tmp_path, SMOKE_CFG.replace("k = 2", "k = 0"))
    assert main(["solve", "--config", str(p)]) == 2
    assert "configuration error" in capsys.readouterr().err


# ------------------------------------------------------------ solve outputs

@pytest.fixture(scope="module")
def smoke_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("smoke")
    cfg = write_cfg(tmp, SMOKE_CFG)
    out = tmp / "out"
    rc = main(["solve", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    return out


def test_outputs_exist(smoke_run):
    seed_dir = smoke_run / "seed_0"
    for name in ("labels.pgm", "trace.csv", "summary.json", "partition.png", "energy.png"):
        assert (seed_dir / name).exists(), name
    assert (smoke_run / "summary.json").exists()


def test_pgm_parses_in_standard_viewer(smoke_run):
    img = Image.open(smoke_run / "seed_0" / "labels.pgm")
    arr = np.asarray(img)
    assert arr.shape == (32, 32)
    grays = set(np.unique(arr).tolist())
    assert grays == {0, 254}  # two regions on the full torus, no outside


def test_trace_csv_contract(smoke_run):
    with open(smoke_run / "seed_0" / "trace.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["iter", "tau", "energy", "changed_cells", "wall_ms"]
    body = rows[1:]
    assert len(body) >= 2
    taus = [float(r[1]) for r in body]
    energies = [float(r[2]) for r in body]
    for j in range(1, len(body)):
        if taus[j] == taus[j - 1]:
            assert energies[j] <= energies[j - 1] + 1e-9


def test_summary_consistency(smoke_run):
    with open(smoke_run / "seed_0" / "summary.json") as fh:
        s = json.load(fh)
    assert s["converged"] is True
    assert s["final_energy"] == pytest.approx(sum(s["per_region"]), abs=1e-10)
    assert s["k"] == 2 and s["n"] == 32


def test_rerun_is_byte_stable(smoke_run, tmp_path):
    cfg = write_cfg(tmp_path, SMOKE_CFG)
    out2 = tmp_path / "out2"
    assert main(["solve", "--config", str(cfg), "--out", str(out2)]) == 0
    a = (smoke_run / "seed_0" / "labels.pgm").read_bytes()
    b = (out2 / "seed_0" / "labels.pgm").read_bytes()
    assert a == b
    sa = strip_wall(json.loads((smoke_run / "seed_0" / "summary.json").read_text()))
    sb = strip_wall(json.loads((out2 / "seed_0" / "summary.json").read_text()))
    assert sa == sb


def test_parallel_jobs_match_serial(tmp_path):
    cfg = write_cfg(tmp_path, SMOKE_CFG.replace("seed = 0", "seeds = 2"))
    out1, out2 = tmp_path / "serial", tmp_path / "parallel"
    assert main(["solve", "--config", str(cfg), "--out", str(out1), "--jobs", "1"]) == 0
    assert main(["solve", "--config", str(cfg), "--out", str(out2), "--jobs", "2"]) == 0
    for seed in (0, 1):
        a = (out1 / f"seed_{seed}" / "labels.pgm").read_bytes()
        b = (out2 / f"seed_{seed}" / "labels.pgm").read_bytes()
        assert a == b


def test_nonconvergence_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SMOKE_CFG.replace("seed = 0", "seed = 0\nmax_outer = 2"))
    out = tmp_path / "nc"
    assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 1
    assert "did not converge" in capsys.readouterr().err
    out2 = tmp_path / "nc2"
    assert main(["solve", "--config", str(cfg), "--out", str(out2), "--allow-nonconverged"]) == 0


def test_3d_run_emits_raw_volume(tmp_path):
    text = """\
experiment = smoke3d
dim = 3
n = 16
shape = ball
shape.radius = 2.0
k = 2
tau0 = 0.19634954084936207
max_outer = 60
seed = 1
"""
    cfg = write_cfg(tmp_path, "mode = partition\n" + text)
    out = tmp_path / "out3d"
    rc = main(["solve", "--config", str(cfg), "--out", str(out), "--allow-nonconverged"])
    assert rc == 0
    raw = out / "seed_1" / "labels.raw"
    meta = json.loads((out / "seed_1" / "labels.meta.json").read_text())
    vol = np.frombuffer(raw.read_bytes(), dtype=np.uint8).reshape(meta["shape"])
    assert meta["shape"] == [16, 16, 16]
    assert meta["order"] == "C"
    assert set(np.unique(vol)) <= {0, 1, 255}
    assert (vol == 255).sum() > 0  # outside nodes present


# ------------------------------------------------------------ eigen + presets

def test_eigen_subcommand(tmp_path, capsys):
    out = tmp_path / "eig"
    rc = main(["eigen", "--shape", "square", "--n", "64", "--tol", "1e-3", "--out", str(out)])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "eigenvalue" in printed
    data = json.loads((out / "eigen.json").read_text())
    assert data["eigenvalue"] == pytest.approx(1.7725, abs=5e-3)
    assert (out / "eigenfunction.png").exists()
    assert (out / "eigen_levels.csv").exists()


def test_presets_catalog(capsys):
    assert main(["presets", "list"]) == 0
    listed = capsys.readouterr().out
    for must in ("table1", "table2-n256-tol1e-5", "table3-disk-tol1e-5",
                 "fig4-energy-decay-alg1", "fig5-adaptive-trace-alg1",
                 "fig6-adaptive", "fig6-fixed", "torus-k4", "triangle-k2",
                 "square-k2", "five_fold_star-k10", "cube-k3", "ball-k12",
                 "tetrahedron-k20", "torus3d-k8", "smoke-torus-k2"):
        assert must in listed, must
    for name in preset_names():
        preset_manifest(name)  # every preset validates


def test_presets_show_and_run(tmp_path, capsys):
    assert main(["presets", "show", "smoke-torus-k2"]) == 0
    shown = capsys.readouterr().out
    assert "n = 32" in shown
    out = tmp_path / "preset-out"
    assert main(["presets", "run", "smoke-torus-k2", "--out", str(out)]) == 0
    assert (out / "summary.json").exists()


def test_preset_configs_are_flat_schema():
    cfg = preset_config("torus-k4")
    m = build_manifest(cfg, source="test")
    assert m.k == 4 and m.shape == "torus" and len(m.seeds) == 10
    assert m.solver.adaptive and m.solver.adaptive_stop == "phi_frozen"


def test_table1_mode(tmp_path):
    cfg = write_cfg(tmp_path, "experiment = t1\nmode = table1\nn = 128\n")
    out = tmp_path / "t1"
    assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
    with open(out / "table1.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["tau", "energy", "analytic"]
    # the sampled mode runs the analytic curve to machine accuracy
    for tau, energy, analytic in rows[1:]:
        assert float(energy) == pytest.approx(float(analytic), abs=1e-10)
