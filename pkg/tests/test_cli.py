import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from cnropt.cli import main, parse_p_list, parse_scale

GOLDEN = Path(__file__).parent / "golden"


def run_cli(tmp_path, *args):
    return main([str(a) for a in args] + ["--out", str(tmp_path)])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def gen(tmp_path, name="inst.json", family="gaussian", n=4, seed=7, density=None):
    args = ["generate", "--family", family, "--n", n, "--seed", seed, "--name", name]
    if density is not None:
        args += ["--density", density]
    assert run_cli(tmp_path, *args) == 0
    return tmp_path / name


def test_parse_scale():
    assert parse_scale("45/2pi") == 45 / (2 * math.pi)
    assert parse_scale("45/(2*pi)") == 45 / (2 * math.pi)
    assert parse_scale("12.5") == 12.5
    with pytest.raises(Exception):
        parse_scale("45/3pi")


def test_parse_p_list():
    assert parse_p_list("4") == [4]
    assert parse_p_list("4..7") == [4, 5, 6, 7]
    assert parse_p_list("1,3,9") == [1, 3, 9]


def test_generate_deterministic_bytes(tmp_path):
    a = gen(tmp_path, "a.json")
    b = gen(tmp_path, "b.json")
    assert a.read_bytes() == b.read_bytes()
    manifest = json.loads((tmp_path / "a.json.manifest.json").read_text())
    assert manifest["schema"] == "instance-v1"
    assert manifest["config"]["seed"] == 7


def test_spectrum_golden(tmp_path):
    import hashlib

    inst = gen(tmp_path)
    assert run_cli(tmp_path, "spectrum", "--instance", inst) == 0
    got = (tmp_path / "spectrum.csv").read_bytes()
    assert got == (GOLDEN / "spectrum_gaussian_n4_seed7.csv").read_bytes()
    energies = [float(r["energy"]) for r in read_csv(tmp_path / "spectrum.csv")]
    assert len(energies) == 16
    assert energies == sorted(energies)
    manifest = json.loads((tmp_path / "spectrum.csv.manifest.json").read_text())
    assert manifest["instance"]["sha256"] == hashlib.sha256(inst.read_bytes()).hexdigest()


def test_spectrum_row_count_n10(tmp_path):
    inst = gen(tmp_path, "g10.json", n=10, seed=2026)
    assert run_cli(tmp_path, "spectrum", "--instance", inst) == 0
    assert len(read_csv(tmp_path / "spectrum.csv")) == 1024


def test_qpe_dist_golden(tmp_path):
    assert run_cli(tmp_path, "qpe-dist", "--delta", 0.2, "--t", 3) == 0
    assert (tmp_path / "qpe_dist.csv").read_bytes() == (GOLDEN / "qpe_dist_d0.2_t3.csv").read_bytes()
    rows = read_csv(tmp_path / "qpe_dist.csv")
    assert len(rows) == 8
    assert abs(sum(float(r["probability"]) for r in rows) - 1.0) < 1e-10


def test_recurse_matches_library(tmp_path):
    from cnropt import distribution_at, enumerate_spectrum, load_instance

    inst_path = gen(tmp_path)
    assert run_cli(tmp_path, "recurse", "--instance", inst_path, "--p", 3) == 0
    rows = read_csv(tmp_path / "recursion.csv")
    spec = enumerate_spectrum(load_instance(inst_path))
    want = distribution_at(spec, 3)
    assert len(rows) == spec.num_levels
    for row, prob in zip(rows, want.probs):
        assert float(row["prob"]) == prob
    complements = [float(r["cum_complement"]) for r in rows]
    prefixes = [float(r["cum_prob"]) for r in rows]
    assert all(abs(c + s - 1.0) < 1e-12 for c, s in zip(complements, prefixes))


def test_bounds_outputs(tmp_path):
    inst = gen(tmp_path)
    assert run_cli(tmp_path, "bounds", "--instance", inst, "--eps", 0.3, "--eta", 0.9) == 0
    payload = json.loads((tmp_path / "bounds.json").read_text())
    assert payload["report"]["cum_prob"] >= payload["report"]["lower_bound"]
    assert payload["report"]["cum_prob"] >= 0.9
    rows = read_csv(tmp_path / "bound_lines.csv")
    upto = payload["beta_max"] + 1
    for row in rows[:upto]:
        assert float(row["bound_line"]) >= float(row["critical_line"]) - 1e-9
        assert float(row["critical_line"]) >= float(row["energy"]) - 1e-9


def test_simulate_exact_check(tmp_path, capsys):
    inst = gen(tmp_path)
    code = run_cli(
        tmp_path, "simulate", "--instance", inst, "--p", 1, "--t", 4, "--M", "16/2pi", "--exact-check"
    )
    assert code == 0
    rows = read_csv(tmp_path / "simulate_dist.csv")
    assert len(rows) == 16
    assert abs(sum(float(r["probability"]) for r in rows) - 1.0) < 1e-10
    manifest = json.loads((tmp_path / "simulate_dist.csv.manifest.json").read_text())
    assert "tv_distance_to_recursion" in manifest["config"]


def test_emulate_table(tmp_path):
    inst = gen(tmp_path)
    code = run_cli(
        tmp_path, "emulate", "--instance", inst, "--p", "0..2", "--samples", "5e3",
        "--beta", 1, "--seed", 3,
    )
    assert code == 0
    rows = read_csv(tmp_path / "emulate_table.csv")
    assert [int(r["p"]) for r in rows] == [0, 1, 2]
    for row in rows:
        assert abs(float(row["cum_prob"]) - float(row["exact_cum"])) <= 4 * float(row["cum_se"]) + 1e-9


def test_report_reproduces_reference_column(tmp_path):
    inst = gen(tmp_path, "g10.json", n=10, seed=2026)
    assert run_cli(tmp_path, "report", "--instance", inst, "--p", "4..9", "--beta", 28) == 0
    rows = read_csv(tmp_path / "report.csv")
    assert [r["cum_prob_4dp"] for r in rows] == ["0.6066", "0.8452", "0.9760", "0.9994", "1.0000", "1.0000"]
    assert all(int(r["a_beta"]) == 58 for r in rows)
    p7 = next(r for r in rows if r["p"] == "7")
    assert abs(float(p7["cum_complement"]) - 5.7e-4) < 1e-5


def test_report_with_eps_adds_bound_row(tmp_path):
    inst = gen(tmp_path, "g8.json", n=8, seed=5)
    assert run_cli(tmp_path, "report", "--instance", inst, "--p", "3..5", "--eps", 0.2) == 0
    rows = read_csv(tmp_path / "report.csv")
    assert rows[0]["source"] == "bound_line"
    assert all(r["source"] == "true_energy" for r in rows[1:])
    assert int(rows[0]["beta_plus_1"]) <= int(rows[1]["beta_plus_1"])


def test_exit_codes(tmp_path):
    inst = gen(tmp_path)
    assert run_cli(tmp_path, "generate", "--family", "gaussian", "--n", 4, "--seed", 1, "--density", 0.5) == 2
    assert run_cli(tmp_path, "generate", "--family", "max2xor", "--n", 4, "--seed", 1) == 2
    assert run_cli(tmp_path, "simulate", "--instance", inst, "--p", 1, "--t", 4, "--M", "0.01") == 2
    g10 = gen(tmp_path, "g10.json", n=10, seed=2026)
    assert run_cli(tmp_path, "simulate", "--instance", g10, "--p", 2, "--t", 7, "--M", "45/2pi") == 3
    assert main(["nosuch"]) == 1
    assert main(["report", "--instance", str(inst), "--p", "2"]) == 2  # neither --beta nor --eps


def test_console_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "cnropt", "--version"], capture_output=True, text=True
    )
    assert out.returncode == 0
    assert "cnropt" in out.stdout
