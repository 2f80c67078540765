"""Model files, canonical serialization, and the command-line interface."""

import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phstab.cli import main, parse_traces
from phstab.config import (
    canonical_json,
    parse_model_dict,
    serialize_model_config,
)
from phstab.errors import BadParameter, ParseError, SchemaError
from phstab.wellposed import TraceSelector


def _write_preset(tmp_path, name, params, fn=None):
    p = tmp_path / (fn or f"{name}.json")
    p.write_text(json.dumps({"preset": {"name": name, "params": params}}))
    return str(p)


# ---------------------------------------------------------------------------
# Configuration


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_canonical_float_round_trips(x):
    assert json.loads(canonical_json(x)) == x


def test_preset_round_trip_identity():
    cfg = parse_model_dict(
        {"preset": {"name": "eb-free-free-tipmass", "params": {"k1": 1.0}}}
    )
    s1 = serialize_model_config(cfg)
    s2 = serialize_model_config(parse_model_dict(json.loads(s1)))
    assert s1 == s2


def test_explicit_document_round_trip():
    cfg = parse_model_dict({"preset": {"name": "wave", "params": {"k": 2.0}}})
    doc = json.loads(serialize_model_config(cfg))
    doc.pop("preset")
    cfg2 = parse_model_dict(doc)
    assert cfg2.N == cfg.N and cfg2.d == cfg.d
    assert all(np.allclose(a, b) for a, b in zip(cfg.P, cfg2.P))
    assert np.allclose(cfg.boundary_matrix, cfg2.boundary_matrix)


def test_missing_key_is_schema_error():
    with pytest.raises(SchemaError):
        parse_model_dict({"N": 1, "d": 1})


def test_wrong_matrix_size_is_schema_error():
    doc = {
        "N": 1,
        "d": 1,
        "P": [[[0.0]], [[1.0]]],
        "H": [[[1.0]]],
        "boundary": {"form": "trace", "matrix": [[1.0, 0.0, 0.0]]},
    }
    with pytest.raises(SchemaError):
        parse_model_dict(doc)


def test_malformed_file_is_parse_error(tmp_path):
    from phstab.config import parse_model_config

    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        parse_model_config(str(p))


# ---------------------------------------------------------------------------
# CLI


def test_parse_traces():
    sel = parse_traces("0:0,0:1,1:0")
    assert isinstance(sel, TraceSelector)
    assert str(sel) == "{0:0,0:1,1:0}"
    assert str(parse_traces("0:0:1")) == "{0:0:1}"
    with pytest.raises(BadParameter):
        parse_traces("")
    with pytest.raises(BadParameter):
        parse_traces("0")


def test_certify_exit_codes(tmp_path, capsys):
    model = _write_preset(tmp_path, "wave", {"k": 1.0})
    assert main(["certify", model]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["generation_certificate"]["verdict"] == "contraction"
    assert report["validation"]["passed"] is True

    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["certify", str(bad)]) == 2

    anti = tmp_path / "anti.json"
    anti.write_text(
        json.dumps(
            {
                "N": 1,
                "d": 1,
                "P": [[[0.0]], [[1.0]]],
                "H": [[[1.0]]],
                "boundary": {"form": "trace", "matrix": [[0.0, 1.0]]},
            }
        )
    )
    assert main(["certify", str(anti)]) == 3


def test_kappa_command(tmp_path, capsys):
    model = _write_preset(tmp_path, "schrodinger", {"k": 1.0, "alpha": 2.0})
    assert main(["kappa", model, "--traces", "0:0,0:1"]) == 0
    report = json.loads(capsys.readouterr().out)
    table = {row["traces"]: row["kappa"] for row in report["kappa_table"]}
    assert table["{0:0,0:1}"] == pytest.approx(0.5, abs=1e-10)


def test_spectrum_csv_and_determinism(tmp_path, capsys):
    model = _write_preset(tmp_path, "eb-clamped-left", {"alpha1": 1.0, "alpha2": 1.0})
    out = tmp_path / "run1"
    assert main(["spectrum", model, "--grid-n", "24", "--out", str(out)]) == 0
    rep1 = capsys.readouterr().out
    csv1 = (out / "eigenvalues.csv").read_text()
    assert csv1.splitlines()[0] == "re,im"

    out2 = tmp_path / "run2"
    assert main(["spectrum", model, "--grid-n", "24", "--out", str(out2)]) == 0
    rep2 = capsys.readouterr().out
    csv2 = (out2 / "eigenvalues.csv").read_text()
    assert csv1 == csv2
    assert rep1.replace(str(out), "@") == rep2.replace(str(out2), "@")


def test_resolvent_and_energy_csv_headers(tmp_path, capsys):
    model = _write_preset(tmp_path, "wave", {"k": 1.0})
    out = tmp_path / "o"
    assert (
        main(
            ["resolvent", model, "--grid-n", "16", "--omega-max", "10",
             "--samples", "10", "--out", str(out)]
        )
        == 0
    )
    capsys.readouterr()
    assert (out / "resolvent.csv").read_text().splitlines()[0] == "omega,norm,trusted"
    assert (
        main(
            ["simulate", model, "--grid-n", "16", "--dt", "0.05",
             "--t-final", "2", "--seed", "7", "--out", str(out)]
        )
        == 0
    )
    report = json.loads(capsys.readouterr().out)
    assert (out / "energy.csv").read_text().splitlines()[0] == "t,E"
    assert report["decay"]["max_energy_increase"] <= 1e-10


def test_hybrid_command(tmp_path, capsys):
    model = _write_preset(tmp_path, "eb-free-free-tipmass", {})
    assert main(["hybrid", model, "--grid-n", "24"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["classification"]["result"] == "certified-exponential"
    assert report["generation_certificate"]["dissipative"] is True
    assert report["spectrum"]["spectral_abscissa"] < 0
    # a PDE-only model cannot run the hybrid analysis
    plain = _write_preset(tmp_path, "wave", {"k": 1.0}, fn="w2.json")
    assert main(["hybrid", plain]) == 2


def test_oracle_command(capsys):
    assert main(["oracle", "schrodinger", "--k", "1", "--alpha", "2",
                 "--beta", "1e6", "--zeta", "0.5"]) == 0
    report = json.loads(capsys.readouterr().out)
    v = report["oracle"]["value"]
    assert abs(v["im"] + 1e-6) < 1e-8
    assert main(["oracle", "nope"]) == 2
