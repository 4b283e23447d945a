import csv
import json

import pytest

import verify_landau
from run_config import build_config

SMALL_NM = "n_max=1\nm_min=-1\ngrid_points=80\nworkers=2\n"


def write_config(tmp_path, text):
    path = tmp_path / "lab.conf"
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_json(path):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def test_nm_basis_suite_passes(tmp_path, clean_env, capsys):
    out = tmp_path / "reports"
    code = verify_landau.main(["nm-basis", "--config", write_config(tmp_path, SMALL_NM), "--out", str(out)])
    assert code == 0
    payload = read_json(out / "nm-basis.json")
    assert payload["header"]["rows"] == 326
    assert payload["header"]["failures"] == 0
    assert payload["header"]["n_max"] == 1
    anchors = [row["anchor"] for row in payload["rows"]]
    assert anchors == sorted(anchors)
    assert "fock L_mech SymNM <1,0|.|1,0>" in anchors
    assert "[report] Saved 326 rows" in capsys.readouterr().out


def test_default_nm_basis_run_is_clean(tmp_path, clean_env):
    out = tmp_path / "reports"
    assert verify_landau.main(["nm-basis", "--out", str(out), "--quiet"]) == 0
    header = read_json(out / "nm-basis.json")["header"]
    assert (header["n_max"], header["m_min"]) == (5, -5)
    # 24 rows per (n, m', m) cell for n <= 5, m', m in [-5, n], plus 14 commutators
    assert header["rows"] == 24 * sum((n + 6) ** 2 for n in range(6)) + 14
    assert header["failures"] == 0


def test_lowest_level_mechanical_oam_row(tmp_path, clean_env):
    out = tmp_path / "reports"
    config = write_config(tmp_path, "n_max=0\nm_min=0\ngrid_points=80\n")
    assert verify_landau.main(["nm-basis", "--config", config, "--out", str(out), "--quiet"]) == 0
    rows = {row["anchor"]: row for row in read_json(out / "nm-basis.json")["rows"]}
    for engine in ("fock", "quadrature"):
        row = rows[f"{engine} L_mech SymNM <0,0|.|0,0>"]
        assert row["re"] == pytest.approx(1.0, abs=1e-8)
        assert row["pass"] is True


def test_kx_basis_suite_passes(tmp_path, clean_env):
    out = tmp_path / "reports"
    config = write_config(
        tmp_path,
        "packet_n_max=0\nkx_list=0.5\nsigma_list=1\nkernel_n_max=0\nkernel_kx_list=0\nm_min=-1\n",
    )
    assert verify_landau.main(["kx-basis", "--config", config, "--out", str(out), "--quiet"]) == 0
    payload = read_json(out / "kx-basis.json")
    # 7 packet operators in 2 columns, 2 kernel cells, 3 resummation points
    assert payload["header"]["rows"] == 19
    anchors = {row["anchor"] for row in payload["rows"]}
    assert "packet p_can Sym n=0 kx=0.5 sigma=1" in anchors
    assert "overlap kernel n=0 kx=0 m=-1" in anchors


def test_gauge_class_suite_passes(tmp_path, clean_env):
    out = tmp_path / "reports"
    config = write_config(
        tmp_path,
        "n_max=1\nm_min=-1\nchi_draws=2\nkx_list=0.5\nsigma_list=1\npacket_n_max=0\nworkers=2\n",
    )
    assert verify_landau.main(["gauge-class", "--config", config, "--out", str(out), "--quiet"]) == 0
    rows = read_json(out / "gauge-class.json")["rows"]
    anchors = {row["anchor"] for row in rows}
    assert "curl A = B base+chi#01" in anchors
    assert "p_cons residual norm SymNM(n=1,m=0)" in anchors
    separation = [row for row in rows if row["anchor"].startswith("L_cons separates classes")]
    assert len(separation) == 1
    assert separation[0]["pass"] is True


def test_eigen_residuals_cover_ten_draws(tmp_path, clean_env):
    out = tmp_path / "reports"
    config = write_config(
        tmp_path,
        "n_max=1\nm_min=-1\nchi_draws=12\nkx_list=0.5\nsigma_list=1\npacket_n_max=0\nworkers=2\n",
    )
    assert verify_landau.main(["gauge-class", "--config", config, "--out", str(out), "--quiet"]) == 0
    rows = read_json(out / "gauge-class.json")["rows"]
    deformed = [row["anchor"] for row in rows if row["anchor"].startswith("eigen ") and " chi#" in row["anchor"]]
    draws = {anchor.rsplit("chi#", 1)[1] for anchor in deformed}
    assert draws == {f"{index:02d}" for index in range(10)}
    assert any("NKx(" in anchor for anchor in deformed)
    assert any("NM(" in anchor for anchor in deformed)


def test_degenerate_packets_are_noted():
    config = build_config(
        overrides={"kx_list": "0", "sigma_list": "1", "n_max": 0, "m_min": 0}, environ={}
    )
    tasks, notes = verify_landau._class_independence_tasks(config)
    assert len(tasks) == 1
    assert len(notes) == 1
    assert notes[0].startswith("skipped L_cons separation for n=0 kx=0 sigma=1")


def test_chi_draws_follow_the_seed():
    first = verify_landau.draw_chis(build_config(overrides={"chi_draws": 3}, environ={}))
    again = verify_landau.draw_chis(build_config(overrides={"chi_draws": 3}, environ={}))
    other = verify_landau.draw_chis(build_config(overrides={"chi_draws": 3, "seed": 1}, environ={}))
    assert first == again
    assert first != other
    assert len(first) == 3


def test_classical_suite_writes_csv_and_trajectory(tmp_path, clean_env):
    out = tmp_path / "reports"
    config = write_config(tmp_path, "periods=2\nsteps_per_period=200\n")
    code = verify_landau.main(["classical", "--config", config, "--out", str(out), "--format", "csv", "--quiet"])
    assert code == 0
    with open(out / "classical.csv", newline="", encoding="utf-8") as handle:
        records = list(csv.DictReader(handle))
    anchors = {record["anchor"] for record in records}
    assert "RK4 observed order" in anchors
    assert "relative drift L_cons_z" in anchors
    assert all(record["pass"] == "true" for record in records)
    header = read_json(out / "classical_header.json")
    assert header["suite"] == "classical"
    with open(out / "trajectory.csv", newline="", encoding="utf-8") as handle:
        lines = list(csv.reader(handle))
    # 401 samples at stride 2
    assert len(lines) == 1 + 201


def test_reruns_are_byte_identical(tmp_path, clean_env):
    out = tmp_path / "reports"
    config = write_config(tmp_path, "periods=1\nsteps_per_period=200\n")
    argv = ["classical", "--config", config, "--out", str(out), "--quiet"]
    assert verify_landau.main(argv) == 0
    first = (out / "classical.json").read_bytes()
    assert verify_landau.main(argv) == 0
    assert (out / "classical.json").read_bytes() == first


def test_failures_exit_with_one(tmp_path, clean_env, capsys):
    out = tmp_path / "reports"
    config = write_config(tmp_path, "periods=1\nsteps_per_period=100\ntol_classical=1e-30\n")
    assert verify_landau.main(["classical", "--config", config, "--out", str(out), "--quiet"]) == 1
    assert "[verify] classical:" in capsys.readouterr().out
    assert read_json(out / "classical.json")["header"]["failures"] > 0


@pytest.mark.parametrize('text', ["n_max=lots\n", "colour=blue\n", "tol_fock=-1\n", "n_max 0\n"])
def test_config_errors_exit_with_two(tmp_path, clean_env, capsys, text):
    code = verify_landau.main(["nm-basis", "--config", write_config(tmp_path, text), "--out", str(tmp_path)])
    assert code == 2
    assert capsys.readouterr().out.startswith("[config]")


def test_unwritable_output_exits_with_two(tmp_path, clean_env):
    blocker = tmp_path / "taken"
    blocker.write_text("", encoding="utf-8")
    config = write_config(tmp_path, "periods=1\nsteps_per_period=200\n")
    assert verify_landau.main(["classical", "--config", config, "--out", str(blocker), "--quiet"]) == 2


def test_unknown_command(clean_env):
    with pytest.raises(SystemExit):
        verify_landau.main(["everything"])
