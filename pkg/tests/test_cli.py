import io
import json
import subprocess
import sys

import pytest

from heckece.cli import model_for_height, run
from heckece.hecke import atomic_algebra, height1_model
from heckece.lie import GradedLieAlgebra
from heckece.coeff import RingSpec
from heckece.wgmod import BasisElement, FreeWGModule


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def heisenberg_file(tmp_path):
    M = FreeWGModule([BasisElement("x", 1, 1), BasisElement("y", 1, 1), BasisElement("z", 2, 2)], RingSpec.plocal(3))
    path = tmp_path / "g.json"
    path.write_text(json.dumps(GradedLieAlgebra(M, {("x", "y"): {"z": 3}}).to_json()))
    return str(path)


def test_euclidean_compare():
    code, text = call("euclidean", "--n", "3", "--k", "0", "--p", "3", "--compare")
    assert code == 0
    assert "w=3 degree 0: R^1" in text and "w=3 degree -1: Z/3^1" in text
    assert "closed form: match" in text


def test_euclidean_e2_tsv():
    code, text = call("euclidean", "--n", "3", "--k", "0", "--p", "3", "--page", "e2", "--format", "tsv")
    assert code == 0
    rows = text.splitlines()
    assert rows[0] == "s\tt\tw\tfree\ttorsion"
    assert "0\t-1\t3\t0\tZ/3^2" in rows


def test_euclidean_with_explicit_empty_assertions(tmp_path):
    path = tmp_path / "a.json"
    path.write_text("[]")
    code, text = call("euclidean", "--n", "3", "--k", "0", "--p", "3", "--assertions", str(path))
    # without the drop the torsion class keeps its full order
    assert code == 0 and "w=3 degree -1: Z/3^2" in text


def test_surface_compare():
    code, text = call("surface", "--genus", "1", "--p", "3", "--compare")
    assert code == 0 and "closed form: match" in text


def test_betti():
    assert call("betti", "--genus", "1", "--p", "3") == (0, "1,2,4,4\n")


def test_euler_poly():
    assert call("euler-poly", "--honda", "--p", "3", "--h", "2") == (0, "e^4\n")
    assert call("euler-poly", "--pseries", "0,3,0,-1", "--p", "3", "--h", "1") == (0, "e + 3\n")


def test_euler_poly_needs_a_series():
    code, text = call("euler-poly", "--p", "3", "--h", "1")
    assert code == 2 and text.startswith("error:")


@pytest.mark.parametrize("p", ["2", "4", "9", "1"])
def test_non_prime_rejected(p):
    code, text = call("betti", "--genus", "1", "--p", p)
    assert code == 2 and "not an odd prime" in text


def test_weight_bound_must_be_positive(heisenberg_file):
    code, _ = call("lie-homology", "--input", heisenberg_file, "--max-weight", "0")
    assert code == 2


def test_lie_homology_with_bar_check(heisenberg_file):
    code, text = call("lie-homology", "--input", heisenberg_file, "--max-weight", "3", "--bar")
    assert code == 0
    assert "w=2 n=1 i=2: Z/3^1" in text
    assert "w=3 n=2 i=3: Z/3^1 + Z/3^1" in text


def test_json_output_is_deterministic(heisenberg_file):
    a = call("lie-homology", "--input", heisenberg_file, "--max-weight", "3", "--format", "json")
    b = call("lie-homology", "--input", heisenberg_file, "--max-weight", "3", "--format", "json")
    assert a == b
    json.loads(a[1])


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "module": [1,\n}')
    code, text = call("lie-homology", "--input", str(path), "--max-weight", "2")
    assert code == 2
    assert "line 3" in text and "column" in text


def test_missing_field_reported(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    code, text = call("hecke-homology", "--input", str(path), "--max-weight", "3")
    assert code == 2 and text.startswith("error:")


def test_hecke_homology(tmp_path):
    path = tmp_path / "h.json"
    path.write_text(json.dumps(atomic_algebra(0, 2, 1, height1_model(3)).to_json()))
    code, text = call("hecke-homology", "--input", str(path), "--max-weight", "3", "--format", "tsv")
    assert code == 0
    # atomic at a = 0, n = 2: the cokernel of p sits in total degree 1
    assert "1\t-1\t3\t0\tZ/3^1" in text.splitlines()


def test_higher_height_model():
    m = model_for_height(3, 2)
    assert m.d == 4


def test_compare_quick():
    code, text = call("compare", "--quick")
    lines = text.splitlines()
    assert code == 0 and len(lines) == 8
    assert all(line.startswith("PASS") for line in lines)


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "heckece.cli", "betti", "--genus", "0", "--p", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "1,1,0,0"
