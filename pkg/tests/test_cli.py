"""Command-line interface: exit codes, file formats, determinism, figures."""

import csv
import json

import numpy as np
import pytest

import ews3x2 as m
from ews3x2.cli import main
from ews3x2.statics import Shock

@pytest.fixture()
def e0_path(e0, tmp_path):
    p = tmp_path / "economy.json"
    p.write_text(json.dumps(e0.to_dict()))
    return str(p)


@pytest.fixture()
def obs_path(e0, tmp_path):
    obs = m.observation_from_response(e0, m.solve_linear(e0, Shock.price(1.0)))
    p = tmp_path / "obs.json"
    p.write_text(json.dumps(obs.to_dict()))
    return str(p)


# ---------------------------------------------------------------------------
# validate / ews / classify / solve / rybczynski


def test_validate_ok(e0_path, capsys):
    assert main(["validate", e0_path, "--ranking"]) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_bad_economy(e0, tmp_path, capsys):
    d = e0.to_dict()
    d["theta_share"][0][0] += 0.05
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(d))
    assert main(["validate", str(p)]) == 1
    assert "share-column-sum" in capsys.readouterr().out


def test_missing_file_is_io_error(capsys):
    assert main(["validate", "/nonexistent/economy.json"]) == 2
    assert "error" in capsys.readouterr().err


def test_malformed_json_is_io_error(tmp_path, capsys):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    assert main(["ews", str(p)]) == 2


def test_ews_payload(e0_path, capsys):
    assert main(["ews", e0_path]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["sign_triple"] == [1, 1, 1]
    assert d["determinant_identity"]["lhs"] == pytest.approx(0.287857142857)
    assert d["pair_labels"]["L-K"] == "economy-wide substitute"


def test_classify_payload(e0_path, capsys):
    assert main(["classify", e0_path]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["quadrant"] == "I"
    assert d["subregion"] == "quadrant I"
    assert d["ratio_point"][0] == pytest.approx(1.011494252873563)


def test_solve_writes_out_file(e0_path, tmp_path, capsys):
    shock = tmp_path / "shock.json"
    shock.write_text(json.dumps({"p_star": [1.0, 0.0], "v_star": [0, 0, 0]}))
    out = tmp_path / "resp.json"
    assert main(["--out", str(out), "solve", e0_path, str(shock)]) == 0
    d = json.loads(out.read_text())
    assert d["w_star"] == pytest.approx([2.18269231, -1.375, 0.83653846])
    assert d["ranking"] == "X>Z>Y"
    assert d["sign_label"] == "A"


def test_solve_malformed_shock(e0_path, tmp_path):
    shock = tmp_path / "shock.json"
    shock.write_text(json.dumps({"p_star": [1.0, 0.0]}))
    assert main(["solve", e0_path, str(shock)]) == 2


def test_rybczynski_payload(e0_path, capsys):
    assert main(["rybczynski", e0_path]) == 0
    d = json.loads(capsys.readouterr().out)
    signs = np.array(d["signs"])
    assert signs.shape == (2, 3)
    assert d["subregion"] == "quadrant I"


# ---------------------------------------------------------------------------
# estimate


def test_estimate_json(obs_path, capsys):
    assert main(["estimate", obs_path]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["quadrant_verdict"] == "inconclusive"
    assert d["a0_sign_label"] == "A"
    assert d["diagnostics"]["consistent"] is True


def test_estimate_csv_and_svg(e0, tmp_path, capsys):
    obs = m.observation_from_response(e0, m.solve_linear(e0, Shock.price(1.0)))
    th, a = obs.theta_share, obs.a_star
    row = {
        "theta_T1": th[0, 0], "theta_T2": th[0, 1],
        "theta_K1": th[1, 0], "theta_K2": th[1, 1],
        "theta_L1": th[2, 0], "theta_L2": th[2, 1],
        "theta_good1": obs.theta_good[0], "theta_good2": obs.theta_good[1],
        "p1_star": obs.p_star[0], "p2_star": obs.p_star[1],
        "wT_star": obs.w_star[0], "wK_star": obs.w_star[1],
        "wL_star": obs.w_star[2],
        "aT1_star": a[0, 0], "aT2_star": a[0, 1],
        "aK1_star": a[1, 0], "aK2_star": a[1, 1],
        "aL1_star": a[2, 0], "aL2_star": a[2, 1],
    }
    path = tmp_path / "obs.csv"
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(row))
        w.writeheader()
        w.writerow(row)
    svg = tmp_path / "fig.svg"
    assert main(["estimate", str(path), "--svg", str(svg)]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["ranking"] == "X>Z>Y"
    text = svg.read_text()
    assert text.startswith("<svg") or "<svg" in text
    assert "S'(R_L1)" in text


def test_estimate_bad_csv(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_text("theta_T1,theta_T2\n0.45,0.2\n")
    assert main(["estimate", str(path)]) == 2


# ---------------------------------------------------------------------------
# sweep


def test_sweep_requires_seed(tmp_path):
    assert main(["--out-dir", str(tmp_path), "sweep"]) == 2


def test_sweep_deterministic_csv(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["--out", str(out1), "sweep", "--seed", "9", "--count", "20"]) == 0
    assert main(["--out", str(out2), "sweep", "--seed", "9", "--count", "20"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert '"violations": 0' in capsys.readouterr().out
    with open(out1) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "row"
    assert len(rows) == 21
    for r in rows[1:]:
        assert r[14] in ("X>Y>Z", "X>Z>Y", "Z>X>Y", "Z>Y>X")
        assert r[17] == "True"


def test_sweep_quadrant4_constraint(tmp_path):
    out = tmp_path / "q4.csv"
    assert main(["--out", str(out), "sweep", "--seed", "3", "--count", "8",
                 "--constraint", "quadrant4"]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))[1:]
    assert all(r[12] == "IV" for r in rows)


# ---------------------------------------------------------------------------
# plot


def test_plot_writes_svg_and_csv(e0_path, tmp_path):
    svg = tmp_path / "fig.svg"
    coords = tmp_path / "coords.csv"
    assert main(["--out", str(svg), "plot", e0_path,
                 "--csv", str(coords)]) == 0
    text = svg.read_text()
    assert "<svg" in text
    for label in ("Q", "R_L1", "R_L2", "E"):
        assert label in text
    assert coords.read_text().splitlines()[0]  # non-empty header
