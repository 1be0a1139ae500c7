import json
import math
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticewigner import cli
from latticewigner.core import wigner_grid
from latticewigner.io import (SpecError, build_state, grid_from_csv, grid_from_json,
                              grid_to_csv, grid_to_json, parse_axis, parse_spec,
                              resolve_template)
from latticewigner.states import random_density, random_pure_state

SPECS = Path(__file__).resolve().parents[1] / "specs"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# -- spec parsing -------------------------------------------------------------

@pytest.mark.parametrize("data", [
    [],
    {"terms": []},
    {"terms": [{"type": "box", "n0": 0}]},
    {"terms": [{"type": "delta"}]},
    {"terms": [{"type": "delta", "n0": 0.5}]},
    {"terms": [{"type": "gaussian", "n0": 0}]},
    {"terms": [{"type": "gaussian", "n0": 0, "sigma_tilde": -1}]},
    {"terms": [{"type": "delta", "n0": 0, "coeff": [0, 0]}]},
    {"terms": [{"type": "delta", "n0": 0, "coeff": [1]}]},
    {"spacing": 0, "terms": [{"type": "delta", "n0": 0}]},
    {"density": {"real": "x"}},
])
def test_bad_specs(data):
    with pytest.raises(SpecError):
        parse_spec(data)


def test_spec_superposition():
    spec = parse_spec({"spacing": 0.5, "terms": [
        {"type": "delta", "n0": 0, "coeff": [1, 0]},
        {"type": "delta", "n0": 2, "coeff": [0, 1]}]})
    s = build_state(spec)
    assert s.spacing == 0.5
    assert s.amplitude(2) == pytest.approx(1j / math.sqrt(2))


def test_template_and_axis():
    tpl = {"terms": [{"n0": "-$n0"}, {"n0": "$n0", "q": "$q0a"}], "x": "$"}
    out = resolve_template(tpl, {"n0": 3, "q0a": 0.5})
    assert out == {"terms": [{"n0": -3}, {"n0": 3, "q": 0.5}], "x": "$"}
    with pytest.raises(SpecError):
        resolve_template(tpl, {"n0": 1})
    name, vals = parse_axis("n0=0:8:5")
    assert name == "n0" and vals == [0, 2, 4, 6, 8]
    with pytest.raises(SpecError):
        parse_axis("n0=0:8")


# -- grid files --------------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(-4, 4))
def test_grid_round_trip(seed, size, n_min):
    g = wigner_grid(random_pure_state(np.random.default_rng(seed), size, n_min), 16)
    back = grid_from_csv(grid_to_csv(g))
    assert np.array_equal(back.values, g.values) and back.m_start == g.m_start
    back = grid_from_json(grid_to_json(g))
    assert np.array_equal(back.values, g.values) and back.spacing == g.spacing


def test_csv_header():
    g = wigner_grid(random_pure_state(np.random.default_rng(0), 2), 8)
    assert grid_to_csv(g).splitlines()[0] == "m,k,W"
    with pytest.raises(ValueError):
        grid_from_csv("a,b,c\n")


# -- commands ------------------------------------------------------------------

def test_wigner_delta(capsys):
    code, out, _ = run(capsys, "wigner", "--spec", SPECS / "fig2_delta.json", "--nk", 8)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "m,k,W"
    assert len(lines) == 9
    assert all(float(l.split(",")[2]) == pytest.approx(1 / (2 * math.pi)) for l in lines[1:])
    assert all(l.startswith("0,") for l in lines[1:])


def test_wigner_gaussian_peak(capsys):
    code, out, _ = run(capsys, "wigner", "--spec", SPECS / "fig3_gaussian.json", "--nk", 128,
                       "--format", "json")
    data = json.loads(out)
    row = data["m_values"].index(0)
    col = data["k_values"].index(0.0)
    assert data["values"][row][col] == pytest.approx(1 / (2 * math.pi), abs=1e-12)
    assert data["meta"]["truncated"] is True


def test_wigner_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(capsys, "wigner", "--spec", SPECS / "two_gaussians.json", "--nk", 128,
                   "--out", p)[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_eta_reports(capsys):
    _, out, _ = run(capsys, "eta", "--spec", SPECS / "fig5_two_deltas.json")
    data = json.loads(out)
    assert data["eta"] == pytest.approx(2 / math.pi, abs=1e-4)
    assert data["config"] == {"n_k": 4096, "tail_eps": 1e-16, "tol": 1e-10,
                              "output_format": "csv"}
    _, out, _ = run(capsys, "eta", "--spec", SPECS / "fig3_gaussian.json", "--nk", 512)
    data = json.loads(out)
    assert data["eta"] <= 1e-9 and data["raw_negativity"] > 0
    _, out, _ = run(capsys, "eta", "--spec", SPECS / "fig2_delta.json", "--nk", 8)
    data = json.loads(out)
    assert data["eta"] == 0 and data["raw_negativity"] == 0


def test_marginals_and_reconstruct(capsys):
    code, out, _ = run(capsys, "marginals", "--spec", SPECS / "fig5_two_deltas.json",
                       "--nk", 32, "--format", "json")
    data = json.loads(out)
    pos = dict(zip(data["position"]["m_values"], data["position"]["values"]))
    assert pos[-8] == pytest.approx(0.5) and pos[8] == pytest.approx(0.5)
    code, out, _ = run(capsys, "reconstruct", "--spec", SPECS / "mixed_density.json", "--nk", 16)
    assert code == 0
    assert out.splitlines()[0] == "n1,n2,re,im"


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--spec", SPECS / "fig6_sweep_template.json",
                       "--axis", "n0=0:2:2", "--axis", "q0a=0:0:1",
                       "--axis", "sigma_tilde=1.2:1.2:1", "--nk", 256)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n0,q0a,sigma_tilde,eta,raw_negativity,quad_error"
    assert len(lines) == 3
    assert float(lines[1].split(",")[3]) < 1e-8


def test_check_passes_for_examples(capsys):
    for name in ("fig2_delta", "fig4_gaussian_displaced", "two_gaussians", "mixed_density"):
        code, out, _ = run(capsys, "check", "--spec", SPECS / f"{name}.json", "--nk", 512)
        data = json.loads(out)
        assert code == 0 and data["passed"], name
    names = {c["name"] for c in data["checks"]}
    assert {"hermiticity", "trace", "phase_relation", "reconstruction"} <= names


def test_check_fuzzed_grid_fails(tmp_path, capsys):
    grid_path = tmp_path / "grid.csv"
    run(capsys, "wigner", "--spec", SPECS / "fig4_gaussian_displaced.json", "--nk", 128,
        "--out", grid_path)
    code, out, _ = run(capsys, "check", "--grid", grid_path)
    assert code == 0
    code, out, err = run(capsys, "check", "--grid", grid_path, "--fuzz", 7)
    assert code == 1
    failed = {c["name"] for c in json.loads(out)["checks"] if not c["passed"]}
    assert "phase_relation" in failed
    assert "phase_relation" in err


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"terms": []}')
    assert run(capsys, "eta", "--spec", bad)[0] == cli.EXIT_SPEC
    bad.write_text("{not json")
    assert run(capsys, "eta", "--spec", bad)[0] == cli.EXIT_SPEC
    code, _, err = run(capsys, "wigner", "--spec", SPECS / "fig5_two_deltas.json", "--nk", 8)
    assert code == cli.EXIT_NYQUIST and "Nyquist" in err
    assert run(capsys, "wigner", "--spec", tmp_path / "missing.json")[0] == cli.EXIT_IO
    out = tmp_path / "nodir" / "x.csv"
    assert run(capsys, "wigner", "--spec", SPECS / "fig2_delta.json", "--nk", 8,
               "--out", out)[0] == cli.EXIT_IO


def test_no_partial_file_on_failure(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    run(capsys, "wigner", "--spec", SPECS / "fig5_two_deltas.json", "--nk", 8, "--out", out)
    assert not out.exists()
    assert os.listdir(tmp_path) == []


def test_check_density_spec_rejects_non_hermitian(tmp_path, capsys):
    spec = tmp_path / "rho.json"
    spec.write_text(json.dumps({"density": {"n_min": 0, "real": [[0.5, 0.2], [0.0, 0.5]]}}))
    assert run(capsys, "check", "--spec", spec)[0] == cli.EXIT_SPEC
