import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from dtcalc import cli
from dtcalc.errors import SchemaError

DATA = Path(__file__).parent / "data"


def run(argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(argv, stdin=io.StringIO(stdin), stdout=out, stderr=err)
    text = out.getvalue()
    return code, (json.loads(text) if text else None), err.getvalue()


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


# --- the documented examples -------------------------------------------------------------


def test_spectrum_x3():
    code, rep, _ = run(["spectrum", "--poly", "x^3"])
    assert code == 0
    assert rep["results"]["spectrum"] == ["1/3", "2/3"]
    assert rep["results"]["oracle_agrees"] and rep["results"]["d_operator_is_diagonal"]
    assert rep["schema"] == "dtcalc/1" and rep["command"] == "spectrum"


def test_monodromy_sum_of_squares():
    code, rep, _ = run(["monodromy", "--poly", "x^2+y^2"])
    assert code == 0
    assert rep["results"]["exponents"] == ["0"]
    assert rep["results"]["eigenvalues"] == ["1"]


def test_milnor_not_singular():
    code, rep, _ = run(["milnor", "--poly", "x^2+x"])
    assert code == 2
    assert rep["error"]["code"] == "NotSingular"


# --- every subcommand --------------------------------------------------------------------


def test_milnor_report():
    code, rep, _ = run(["milnor", "--poly", "x^3+y^3"])
    assert code == 0
    res = rep["results"]
    assert res["mu"] == 4 and sorted(res["basis"]) == ["1", "x", "x*y", "y"]


def test_milnor_not_isolated():
    code, rep, _ = run(["milnor", "--poly", "x^2*y", "--degree-bound", "8"])
    assert code == 2 and rep["error"]["code"] == "NotIsolated"


def test_spectrum_lambda():
    code, rep, _ = run(["spectrum", "--poly", "z^2", "--lambda", "1"])
    assert rep["results"]["d_operator_diagonal"] == ["0"]
    assert rep["inputs"]["lambda"] == "1"


def test_spectrum_not_qh():
    code, rep, _ = run(["spectrum", "--poly", "x^2+y^3+x*y"])
    assert code == 2 and rep["error"]["code"] == "NotQuasiHomogeneous"


def test_monodromy_pv_and_conventions():
    code, rep, _ = run(["monodromy", "--poly", "x^2", "--pv"])
    assert rep["results"]["eigenvalues"] == ["-1"]
    assert rep["results"]["pv"]["eigenvalues"] == ["1"]
    assert rep["conventions"]["name"] == "standard"
    code, rep, _ = run(["--convention", "conjugate", "monodromy", "--poly", "x^3"])
    assert code == 0 and rep["conventions"]["name"] == "conjugate"
    assert "+2*pi*i" in rep["conventions"]["monodromy"]


def test_ts():
    code, rep, _ = run(["ts", "--f", "x^3", "--g", "x^2"])
    res = rep["results"]
    assert code == 0 and res["mu_sum"] == 2
    assert res["mu_multiplicative"] and res["spectrum_additive"] and res["monodromy_multiplicative"]
    code, rep, _ = run(["ts", "--f", "x^2+y^3+x*y", "--g", "z^2"])
    assert code == 0 and rep["warnings"]


def test_stabilize():
    code, rep, _ = run(["stabilize", "--poly", "x^3", "--rank", "1"])
    res = rep["results"]
    assert res["stabilized"]["spectrum"] == ["5/6", "7/6"]
    assert res["spectrum_matches_direct"] and res["raw_monodromy_matches_direct"] and res["pv_monodromy_invariant"]
    assert res["tq_scale"] == "1/2"
    code, _, err = run(["stabilize", "--poly", "x^3", "--rank", "-1"])
    assert code == 1 and "rank" in err


def test_maslov(monkeypatch):
    monkeypatch.chdir(DATA)
    code, rep, _ = run(["maslov", "--space", "space2.json", "--chain", "chain_triple.json"])
    assert code == 0
    assert rep["results"]["maslov_form"] == [["-2", "-i"], ["-i", "1/3"]]
    code, rep, _ = run(["maslov", "--space", "space2.json", "--chain", "chain_back.json"])
    assert rep["results"]["backtrack_checks"] == {"2": True}
    assert all(rep["results"]["composition_checks"].values())


def test_maslov_non_transverse(tmp_path):
    space = write(tmp_path, "s.json", {"standard": 1})
    chain = write(tmp_path, "c.json", [[["1", "0"]], [["2", "0"]]])
    code, rep, _ = run(["maslov", "--space", space, "--chain", chain])
    assert code == 2 and rep["error"]["code"] == "NonTransverse"


def test_maslov_not_lagrangian(tmp_path):
    space = write(tmp_path, "s.json", {"standard": 2})
    chain = write(tmp_path, "c.json", {"chain": [{"name": "bad", "basis": [["1", "0", "1", "0"], ["0", "1", "1", "0"]]}]})
    code, rep, _ = run(["maslov", "--space", space, "--chain", chain])
    assert code == 2 and rep["error"]["code"] == "NotLagrangian"


def test_rh(monkeypatch):
    monkeypatch.chdir(DATA)
    code, rep, _ = run(["rh", "--monodromy", "monodromy.json", "--roundtrip"])
    assert code == 0 and rep["results"]["roundtrip_ok"] and rep["results"]["rank"] == 7
    code, rep, _ = run(["rh", "--monodromy", "matrix.json"])
    assert [b["exponent"] for b in rep["results"]["monodromy"]["blocks"]] == ["-1/4", "-3/4"]


def test_rh_numeric(tmp_path):
    p = write(tmp_path, "m.json", {"matrix": [["2"]]})
    code, rep, _ = run(["rh", "--monodromy", p])
    assert code == 2 and rep["error"]["code"] == "NotQuasiUnipotent"
    code, rep, _ = run(["rh", "--monodromy", p, "--numeric"])
    assert code == 0 and rep["results"]["numeric"]["numeric"] is True


def test_rh_exponent_outside_g(tmp_path):
    p = write(tmp_path, "m.json", {"blocks": [{"exponent": "1/2", "jordan": [1]}]})
    code, rep, _ = run(["rh", "--monodromy", p])
    assert code == 1
    assert rep["error"]["code"] == "SchemaError" and rep["error"]["pointer"] == "/blocks/0/exponent"


def test_chart():
    code, rep, _ = run(["chart", "--h", "l^3 - 1/2*m^2", "--lvars", "l", "--mvars", "m"])
    res = rep["results"]
    assert code == 0
    assert res["embedding"] == {"f": "l^3", "elimination": {"m": "0"}, "q_xi": [["-1"]]}
    assert res["maslov_consistency"] and res["spectrum_consistent"]
    assert res["spectrum_h"] == ["5/6", "7/6"]
    code, rep, _ = run(["chart", "--h", "l*m", "--lvars", "l", "--mvars", "m"])
    assert code == 2 and rep["error"]["code"] == "SingularHessian"


def test_clean(monkeypatch, tmp_path):
    monkeypatch.chdir(DATA)
    code, rep, _ = run(["clean", "--data", "clean.json"])
    assert rep["results"]["scalar"] == "1" and rep["results"]["torsor"]["rep"] == "1"
    assert rep["results"]["order_sign"] in (1, -1) and rep["warnings"]
    bad = write(tmp_path, "c.json", {"TL": [["1", "0"]], "TM": [["1", "0"]], "TLM": []})
    code, rep, _ = run(["clean", "--data", bad])
    assert code == 2 and rep["error"]["code"] == "NotExact"


def test_cocycle(monkeypatch):
    monkeypatch.chdir(DATA)
    assert run(["cocycle", "--loop", "loop.json"])[1]["results"]["sign"] == 1
    assert run(["cocycle", "--loop", "loop_flip.json"])[1]["results"]["sign"] == -1
    assert run(["cocycle", "--loop", "transitions.json"])[1]["results"]["consistent"]


def test_cocycle_schema(tmp_path):
    p = write(tmp_path, "l.json", {"transitions": [{"from": "A", "to": "A", "rep": "2", "target": "5"}]})
    code, rep, _ = run(["cocycle", "--loop", p])
    assert code == 1 and rep["error"]["pointer"] == "/transitions/0/rep"


# --- input handling ----------------------------------------------------------------------


def test_stdin_poly():
    code, rep, _ = run(["milnor", "--poly", "-"], stdin="x^2+x\n")
    assert code == 2 and rep["error"]["code"] == "NotSingular"
    code, rep, _ = run(["spectrum", "--poly", "-"], stdin="x^4\n")
    assert rep["results"]["spectrum"] == ["1/4", "1/2", "3/4"]


def test_parse_error_exit_code():
    code, rep, _ = run(["milnor", "--poly", "x^^2"])
    assert code == 1
    assert rep["error"]["code"] == "ParseError" and rep["error"]["offset"] == 2


def test_usage_errors():
    assert run(["bogus"])[0] == 1
    assert run([])[0] == 1
    code, rep, err = run(["milnor"])
    assert code == 1 and rep is None and "--poly" in err


def test_read_data_file(tmp_path):
    good = write(tmp_path, "s.json", {"form": [["0", "1"], ["-1", "0"]]})
    space = cli.read_space(cli.read_data_file(good))
    assert space.dim == 2
    with pytest.raises(SchemaError) as exc:
        cli.read_space({"form": [["0", "1"], ["1", "0"]]})
    assert exc.value.pointer == "/form/0/1"
    with pytest.raises(SchemaError):
        cli.read_data_file(write(tmp_path, "bad.json", "{not json"))
    with pytest.raises(cli.UsageError):
        cli.read_data_file(str(tmp_path / "missing.json"))
    with pytest.raises(SchemaError) as exc:
        cli.read_space({"form": [["0", "x"], ["-1", "0"]]})
    assert exc.value.pointer == "/form/0/1"


def test_schema_error_in_report(tmp_path):
    space = write(tmp_path, "s.json", {"form": [["0", "1"], ["1", "0"]]})
    code, rep, _ = run(["maslov", "--space", space, "--chain", space])
    assert code == 1 and rep["error"]["pointer"] == "/form/0/1"


# --- batch, summary, determinism ------------------------------------------------------------


def test_batch(tmp_path):
    p = write(tmp_path, "b.json", [["spectrum", "--poly", "x^3"], ["milnor", "--poly", "x^2+x"], ["nope"],
                                  ["--convention", "conjugate", "monodromy", "--poly", "x^3"]])
    code, rep, _ = run(["--batch", p])
    assert code == 2
    b = rep["batch"]
    assert b[0]["results"]["spectrum"] == ["1/3", "2/3"]
    assert b[1]["error"]["code"] == "NotSingular"
    assert b[2]["error"]["code"] == "UsageError"
    assert b[3]["conventions"]["name"] == "conjugate"


def test_batch_top_level_convention(tmp_path):
    p = write(tmp_path, "b.json", [["monodromy", "--poly", "x^3"]])
    _, rep, _ = run(["--convention", "conjugate", "--batch", p])
    assert rep["batch"][0]["conventions"]["name"] == "conjugate"


def test_batch_malformed(tmp_path):
    p = write(tmp_path, "b.json", {"not": "a list"})
    code, rep, err = run(["--batch", p])
    assert code == 1 and rep is None and "batch" in err


def test_summary():
    code, rep, err = run(["--summary", "milnor", "--poly", "x^3"])
    assert code == 0 and err.startswith("milnor: ") and "mu=2" in err


def test_canonical_output():
    out = io.StringIO()
    cli.run(["spectrum", "--poly", "x^3+y^4"], stdin=io.StringIO(), stdout=out, stderr=io.StringIO())
    text = out.getvalue()
    assert text == cli.dumps(json.loads(text))
    assert "." not in "".join(json.loads(text)["results"]["spectrum"])


def test_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dtcalc", "spectrum", "--poly", "x^3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["spectrum"] == ["1/3", "2/3"]
