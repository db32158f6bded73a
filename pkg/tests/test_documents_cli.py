import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bic1d.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, main
from bic1d.continuum import PeriodicMedium, band_structure
from bic1d.documents import DocumentError, GluedSpec, dump_document, load_document, parse_document, to_document
from bic1d.fixtures import random_medium, random_pt_model, ssh_model, two_layer_medium
from bic1d.lattice import HoppingModel, SIGMA1
from bic1d.lattice_interface import InterfaceSpec, ssh_interface

MODELS = Path(__file__).resolve().parent.parent / "models"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], stdout=out)
    return code, out.getvalue()


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def write(tmp_path, doc, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2) if not isinstance(doc, str) else doc)
    return path


# --- documents --------------------------------------------------------------------------


def test_all_shipped_models_load():
    for path in MODELS.glob("*.json"):
        if path.stem == "bad_lengths":
            continue
        assert load_document(path) is not None


def test_bad_lengths_line_anchored():
    with pytest.raises(DocumentError, match="lengths") as info:
        load_document(MODELS / "bad_lengths.json")
    assert info.value.line == 3


def test_schema_error_names_field(tmp_path):
    doc = {"type": "lattice", "r": 1, "A": [[[0, 0], [1, 0]]], "V": [[0, 1], [1, 0]], "Q": [1, 0], "extra": 1}
    with pytest.raises(DocumentError, match="extra"):
        load_document(write(tmp_path, doc))
    doc = {"type": "photonic", "pieces": [{"length": 1.0, "eps": -1.0, "mu": 1.0}]}
    with pytest.raises(DocumentError, match="eps") as info:
        load_document(write(tmp_path, doc))
    assert info.value.line is not None and info.value.line > 1


def test_symmetry_error_in_document(tmp_path):
    doc = {"type": "lattice", "r": 1, "A": [[[1, 0], [0, 0]]], "V": [[0, 1], [0, 0]]}
    with pytest.raises(DocumentError, match="symmetric"):
        load_document(write(tmp_path, doc))
    doc = {"type": "lattice", "r": 1, "A": [[[1, 0], [0, 0]]], "V": [[0, 0], [0, 0]], "Q": [0.5, 0.5]}
    with pytest.raises(DocumentError):
        load_document(write(tmp_path, doc))


def test_invalid_json_reports_line(tmp_path):
    with pytest.raises(DocumentError) as info:
        load_document(write(tmp_path, '{\n  "type": "lattice",\n  "r": 1,,\n}'))
    assert info.value.line == 3


def test_range_mismatch(tmp_path):
    doc = {"type": "lattice", "r": 2, "A": [[[0, 0], [1, 0]]], "V": [[0, 1], [1, 0]]}
    with pytest.raises(DocumentError, match="r = 2"):
        load_document(write(tmp_path, doc))


def _same_model(a, b):
    if isinstance(a, HoppingModel):
        assert len(a.hoppings) == len(b.hoppings)
        for x, y in zip(a.hoppings, b.hoppings):
            np.testing.assert_array_equal(x, y)
        np.testing.assert_array_equal(a.onsite, b.onsite)
        np.testing.assert_array_equal(a.q, b.q)
    elif isinstance(a, PeriodicMedium):
        assert a.kind == b.kind and a.pieces == b.pieces
    elif isinstance(a, InterfaceSpec):
        _same_model(a.left, b.left)
        _same_model(a.right, b.right)
        np.testing.assert_array_equal(a.b_left, b.b_left)
        np.testing.assert_array_equal(a.b_right, b.b_right)
        assert a.w == b.w
    else:
        _same_model(a.left, b.left)
        _same_model(a.right, b.right)
        assert (a.gap_left, a.gap_right, a.dislocation) == (b.gap_left, b.gap_right, b.dislocation)


def test_round_trip():
    rng = np.random.default_rng(1)
    objs = [
        ssh_model(1, 0.5),
        random_pt_model(rng, topological=True),
        two_layer_medium(),
        random_medium(rng, "schrodinger"),
        ssh_interface(1.0, 0.5, 0.3, 0.7, w=0.1),
        InterfaceSpec(ssh_model(1, 0.5), ssh_model(0.5, 1), [0.0, 0.2], [0.4, 0.0], 0.0),
        GluedSpec(two_layer_medium(), two_layer_medium(), 1, 1),
    ]
    for obj in objs:
        text = dump_document(obj)
        back = parse_document(json.loads(text), text)
        _same_model(obj, back)
        assert dump_document(back) == text
    for path in MODELS.glob("*.json"):
        if path.stem != "bad_lengths":
            obj = load_document(path)
            assert to_document(parse_document(to_document(obj))) == to_document(obj)


def test_dislocation_document_builds_shifted_copy():
    spec = load_document(MODELS / "two_layer_dislocation.json")
    assert spec.dislocation
    assert spec.right.pieces == ((0.25, 1.0, 1.0), (0.5, 4.0, 1.0), (0.25, 1.0, 1.0))


# --- command line ---------------------------------------------------------------------------


def test_bands_ssh_curves():
    code, out = run("bands", MODELS / "ssh_trivial.json", "--k-samples", 33)
    assert code == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["k", "band_index", "E"]
    rows = np.array(rows)
    k = rows[:, 0]
    expected = np.where(rows[:, 1] == 1, -1, 1) * np.sqrt(1.25 + np.cos(k))
    np.testing.assert_allclose(rows[:, 2], expected, atol=1e-14)


def test_bands_summary_to_file(tmp_path):
    out_csv = tmp_path / "bands.csv"
    code, out = run("bands", MODELS / "two_layer.json", "--out", out_csv, "--bands", 2)
    assert code == EXIT_OK
    bs = band_structure(two_layer_medium(), 2)
    lines = out.strip().splitlines()
    assert lines[0] == f"gap 1: ({bs.gaps[0][0]:.17g}, {bs.gaps[0][1]:.17g}) at k*=pi"
    assert lines[1].startswith("gap 2:") and lines[1].endswith("k*=0")
    header, rows = read_csv(out_csv.read_text())
    rows = np.array(rows)
    # the CSV regenerates the edge summary exactly
    top1 = rows[rows[:, 1] == 1, 2].max()
    bottom2 = rows[rows[:, 1] == 2, 2].min()
    assert (top1, bottom2) == bs.gaps[0]


def test_bands_deterministic():
    assert run("bands", MODELS / "two_layer.json")[1] == run("bands", MODELS / "two_layer.json")[1]


def test_bands_bad_lengths_exit(capsys):
    code, _ = run("bands", MODELS / "bad_lengths.json")
    assert code == EXIT_INVALID
    assert "lengths" in capsys.readouterr().err


def test_missing_file_and_bad_flags():
    assert run("bands", "/nonexistent.json")[0] == EXIT_INVALID
    assert run("bands", MODELS / "two_layer.json", "--bands", 0)[0] == EXIT_INVALID
    assert run("frobnicate")[0] == EXIT_INVALID


def test_invariants_reports():
    assert run("invariants", MODELS / "ssh_topological.json")[1].splitlines()[0] == "winding=-1, zak=pi"
    assert run("invariants", MODELS / "ssh_trivial.json")[1].splitlines()[0] == "winding=0, zak=0"
    first = run("invariants", MODELS / "pt_nonchiral.json")[1].splitlines()[0]
    assert first.startswith("winding: n/a (not chiral), zak=")
    code, out = run("invariants", MODELS / "two_layer.json")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "gamma_1=even, theta_1=0, consistent=true"


def test_invariants_snn_line():
    out = run("invariants", MODELS / "ssh_topological.json")[1]
    assert out.splitlines()[1] == "snn: v0=0, s=0.5, t=1, far_norm=0, delta=0.5"


def test_numerical_failure_exit(tmp_path, capsys):
    doc = {"type": "lattice", "r": 1, "A": [[[0, 0], [1, 0]]], "V": [[0, 1], [1, 0]]}
    code, _ = run("invariants", write(tmp_path, doc))
    assert code == EXIT_NUMERICAL
    assert "numerical failure" in capsys.readouterr().err


def test_edge_command(tmp_path):
    spectrum = tmp_path / "spectrum.csv"
    code, out = run("edge", MODELS / "ssh_topological.json", "--sites", 100, "--spectrum-out", spectrum)
    assert code == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["energy", "center", "decay_length", "boundary_weight"]
    assert len(rows) == 1 and abs(rows[0][0]) < 1e-10
    header, rows = read_csv(spectrum.read_text())
    assert header == ["index", "E"] and len(rows) == 200
    code, out = run("edge", MODELS / "ssh_trivial.json", "--window=-0.25,0.25")
    assert code == EXIT_OK and len(read_csv(out)[1]) == 0
    assert run("edge", MODELS / "ssh_trivial.json", "--window", "1,0")[0] == EXIT_INVALID
    assert run("edge", MODELS / "two_layer.json")[0] == EXIT_INVALID


def test_interface_lattice_command():
    code, out = run("interface", MODELS / "ssh_interface.json")
    assert code == EXIT_OK
    _, rows = read_csv(out)
    assert len(rows) == 1 and abs(rows[0][0]) < 1e-8 and rows[0][3] < 0.01


def test_interface_continuum_command(capsys):
    code, out = run("interface", MODELS / "two_layer_dislocation.json", "--e-samples", 50)
    assert code == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["E", "xi_L", "xi_R", "xi"] and len(rows) == 50
    rows = np.array(rows)
    np.testing.assert_allclose(rows[:, 3], rows[:, 1] - rows[:, 2])
    assert np.sum(np.diff(np.sign(rows[:, 3])) != 0) == 1
    err = capsys.readouterr().err
    assert "E*=" in err and "(predicted)" in err


def test_dislocate_command(tmp_path):
    code, out = run("dislocate", MODELS / "two_layer.json")
    assert code == EXIT_OK
    shifted = parse_document(json.loads(out))
    assert shifted.pieces == ((0.25, 1.0, 1.0), (0.5, 4.0, 1.0), (0.25, 1.0, 1.0))
    code, out = run("dislocate", MODELS / "ssh_trivial.json")
    assert code == EXIT_OK
    # the shift moves one sublattice by a cell, so the winding changes by one
    assert run("invariants", write(tmp_path, out))[1].startswith("winding=1, zak=pi")
    assert run("dislocate", MODELS / "ssh_interface.json")[0] == EXIT_INVALID


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bic1d", "invariants", str(MODELS / "ssh_topological.json")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("winding=-1, zak=pi")


def test_decoupled_dimers_document(tmp_path):
    doc = to_document(HoppingModel([np.zeros((2, 2))], SIGMA1))
    code, out = run("invariants", write(tmp_path, doc))
    assert code == EXIT_OK and out.startswith("winding=0, zak=0")
