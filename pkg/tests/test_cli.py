import csv
import io
import json
import subprocess
import sys

import pytest

from filmcasimir.cli import CSV_COLUMNS, main, read_config
from filmcasimir.materials import load_synthetic_table


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_materials_listing(capsys):
    code, out, _ = run(capsys, "materials")
    assert code == 0
    body = [l for l in out.splitlines()[1:] if l.strip()]
    assert [l.split()[0] for l in body] == ["Au", "Ag", "Cu", "Al"]
    code, out, _ = run(capsys, "materials", "--json")
    data = json.loads(out)
    assert [d["name"] for d in data] == ["Au", "Ag", "Cu", "Al"]
    assert data[1]["plasma_frequency_eV"] == 9.66


def test_compute_signs(capsys):
    code, out, _ = run(capsys, "compute", "--film", "Ag", "--plate", "Cu", "--variant", "simple-drude", "--a", "50")
    assert code == 0
    assert out.splitlines()[0] == ",".join(CSV_COLUMNS)
    (r,) = rows(out)
    assert float(r["free_energy_J_per_m2"]) < 0
    assert r["variant"] == "simple-drude" and int(r["l_max"]) > 0
    code, out, _ = run(capsys, "compute", "--film", "Au", "--plate", "Al", "--variant", "simple-plasma", "--a", "50")
    assert float(rows(out)[0]["free_energy_J_per_m2"]) > 0


def test_csv_float_format(capsys):
    _, out, _ = run(capsys, "compute", "--film", "Ag", "--plate", "Cu", "--a", "50")
    f = rows(out)[0]["free_energy_J_per_m2"]
    mantissa = f.split("e")[0].lstrip("-")
    assert len(mantissa.replace(".", "")) == 12


def test_byte_identical_runs(tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"o{i}.csv"
        subprocess.run([sys.executable, "-m", "filmcasimir", "sweep", "--film", "Au", "--plate", "Cu",
                        "--variants", "simple-drude,simple-plasma", "--a-min", "20", "--a-max", "60",
                        "--n-points", "3", "-o", str(p)], check=True)
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert len(outs[0].decode().splitlines()) == 7


@pytest.mark.parametrize("argv", [["compute", "--film", "Au", "--a", "50"], ["bogus"], []])
def test_usage_errors_exit_2(argv):
    r = subprocess.run([sys.executable, "-m", "filmcasimir", *argv], capture_output=True, text=True)
    assert r.returncode == 2


def test_onset_plasma_exit_1(capsys):
    code, _, err = run(capsys, "onset", "--film", "Ag", "--plate", "Cu", "--variant", "simple-plasma")
    assert code == 1
    assert "no classical limit" in err


def test_unknown_metal_exit_1(capsys):
    code, _, err = run(capsys, "compute", "--film", "Xx", "--plate", "Cu")
    assert code == 1 and "Xx" in err


def test_data_variant_requires_tables():
    r = subprocess.run([sys.executable, "-m", "filmcasimir", "compute", "--film", "Au", "--plate", "Cu",
                        "--variant", "data-drude"], capture_output=True, text=True,
                       env={"PATH": "", "CASIMIR_DATA_DIR": ""})
    assert r.returncode == 2


def test_data_files_and_env_dir(capsys, tmp_path, monkeypatch):
    for m in ("Ag", "Cu"):
        load_synthetic_table(m).save(tmp_path / f"{m}.txt")
    code, out, _ = run(capsys, "compute", "--film", "Ag", "--plate", "Cu", "--variant", "data-drude",
                       "--film-data", str(tmp_path / "Ag.txt"), "--data", f"Cu={tmp_path / 'Cu.txt'}")
    assert code == 0
    explicit = rows(out)[0]["free_energy_J_per_m2"]
    monkeypatch.setenv("CASIMIR_DATA_DIR", str(tmp_path))
    code, out, _ = run(capsys, "compute", "--film", "Ag", "--plate", "Cu", "--variant", "data-drude")
    assert code == 0 and rows(out)[0]["free_energy_J_per_m2"] == explicit
    code, out, _ = run(capsys, "compute", "--film", "Ag", "--plate", "Cu", "--variant", "data-drude",
                       "--synthetic-data")
    assert rows(out)[0]["free_energy_J_per_m2"] == explicit


def test_bad_table_exit_1(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 2 3\n2 2 3\n")
    code, _, err = run(capsys, "compute", "--film", "Ag", "--plate", "Cu", "--variant", "data-drude",
                       "--film-data", str(p), "--plate-data", str(p))
    assert code == 1 and "rows" in err.lower()


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run\nfilm = Au\nplate = Al\nvariant = simple-plasma\na = 40 80\n")
    assert read_config(cfg)["a"] == "40 80"
    code, out, _ = run(capsys, "compute", "--config", str(cfg))
    r = rows(out)
    assert code == 0 and [x["thickness_nm"] for x in r] == ["4.00000000000e+01", "8.00000000000e+01"]
    assert r[0]["variant"] == "simple-plasma"
    code, out, _ = run(capsys, "compute", "--config", str(cfg), "--variant", "simple-drude", "--a", "60")
    (r,) = rows(out)
    assert r["variant"] == "simple-drude" and r["film"] == "Au" and float(r["thickness_nm"]) == 60


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    r = subprocess.run([sys.executable, "-m", "filmcasimir", "compute", "--config", str(cfg)],
                       capture_output=True, text=True)
    assert r.returncode == 2


def test_sweep_with_plot(capsys, tmp_path):
    pytest.importorskip("matplotlib")
    prefix = tmp_path / "agcu"
    code, out, _ = run(capsys, "sweep", "--film", "Ag", "--plate", "Cu", "--variants",
                       "simple-drude,simple-plasma", "--a-min", "20", "--a-max", "200", "--n-points", "4",
                       "--emit-plot", "--plot-prefix", str(prefix))
    assert code == 0
    r = rows(out)
    d = {x["thickness_nm"]: float(x["free_energy_J_per_m2"]) for x in r if x["variant"] == "simple-drude"}
    p = {x["thickness_nm"]: float(x["free_energy_J_per_m2"]) for x in r if x["variant"] == "simple-plasma"}
    last = max(d, key=float)
    assert abs(d[last]) > abs(p[last])
    for q in ("free_energy", "pressure"):
        svg = (tmp_path / f"agcu_{q}.svg").read_text()
        assert svg.lstrip().startswith("<?xml") and "simple-plasma" in svg


def test_sign_change_and_extremum_commands(capsys):
    code, _, err = run(capsys, "sign-change", "--film", "Ag", "--plate", "Cu", "--a-lo", "20", "--a-hi", "200")
    assert code == 1 and "does not change sign" in err
    code, _, _ = run(capsys, "extremum", "--film", "Ag", "--plate", "Cu", "--a-lo", "20", "--a-hi", "40")
    assert code == 1


def test_sign_change_with_synthetic_data(capsys):
    # Drude-generated tables have no interband structure, so no crossing is found
    code, _, err = run(capsys, "sign-change", "--film", "Au", "--plate", "Ag", "--variant", "data-drude",
                       "--synthetic-data", "--allow-thin")
    assert code == 1 and "sign" in err


def test_onset_command(capsys):
    code, out, _ = run(capsys, "onset", "--film", "Ag", "--plate", "Cu", "--threshold", "0.001")
    assert code == 0
    assert 130 <= float(rows(out)[0]["onset_nm"]) <= 170


def test_ratios_command(capsys):
    code, out, _ = run(capsys, "ratios", "--film", "Ag", "--plate", "Cu")
    assert code == 0
    checks = [l for l in out.splitlines() if l.startswith("CHECK")]
    assert len(checks) == 2 and all(l.endswith("status=DATA-MISSING") for l in checks)
    code, out, _ = run(capsys, "ratios", "--film", "Au", "--plate", "Ag", "--crossings")
    assert sum(l.startswith("CHECK crossing") for l in out.splitlines()) == 2
