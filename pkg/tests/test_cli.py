import csv
import json

import pytest

from holorep import kernelop as ko
from holorep.cli import main
from holorep.report import RunReport
from holorep.series import PowerSeries, series_from_json


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def _series(tmp_path, name, f):
    return _write(tmp_path / name, f.to_json())


def _load(path):
    return json.loads(open(path).read())


@pytest.mark.parametrize("op,n", [("identity", 1), ("identity", 2), ("partial:1", 1), ("euler", 2),
                                  ("hadamard:pow2", 2), ("dilation:0.5", 1), ("multiplier:1,0", 2)])
def test_kernel_closed_forms(tmp_path, op, n):
    out = tmp_path / "k.json"
    assert main(["kernel", op, "-n", str(n), "-D", "10", "-o", str(out)]) == 0
    a = ko.KernelCoefficients.from_json(_load(out))
    assert ko.matrix_from_kernel(a) == ko.matrix_of(op, n, 10)


def test_kernel_identity_coefficients(tmp_path):
    out = tmp_path / "k.json"
    assert main(["kernel", "identity", "-n", "2", "-D", "3", "-o", str(out)]) == 0
    a = ko.KernelCoefficients.from_json(_load(out))
    # (-1)^n convention: c_{aa} = 1 for n = 2
    assert all(v == 1 and al == b for (al, b), v in a.entries.items()) and len(a.entries) == 10


def test_kernel_bad_operator():
    assert main(["kernel", "nosuch"]) == 2


@pytest.mark.parametrize("op,n,f,want", [
    ("identity", 1, PowerSeries(1, 3, {(3,): 1}), PowerSeries(1, 3, {(3,): 1})),
    ("partial:1", 1, PowerSeries(1, 3, {(3,): 1}), PowerSeries(1, 3, {(2,): 3})),
    ("hadamard:pow2", 2, PowerSeries(2, 2, {(0, 0): 1, (1, 1): 1}), PowerSeries(2, 2, {(0, 0): 1, (1, 1): 0.25})),
])
def test_apply_examples(tmp_path, op, n, f, want):
    kpath = tmp_path / "k.json"
    assert main(["kernel", op, "-n", str(n), "-D", str(f.trunc), "-o", str(kpath)]) == 0
    out = tmp_path / "g.json"
    assert main(["apply", str(kpath), _series(tmp_path, "f.json", f), "-o", str(out)]) == 0
    g = series_from_json(_load(out))
    keys = set(g.coeffs) | set(want.coeffs)
    assert max(abs(g[m] - want[m]) for m in keys) < 1e-10


def test_apply_dimension_mismatch(tmp_path):
    kpath = tmp_path / "k.json"
    main(["kernel", "identity", "-n", "2", "-D", "3", "-o", str(kpath)])
    assert main(["apply", str(kpath), _series(tmp_path, "f.json", PowerSeries(1, 3, {(1,): 1}))]) == 2


def test_project(tmp_path):
    f = PowerSeries(2, 6, {(2, 4): 1, (1, 1): 1, (3, 0): 1})
    out = tmp_path / "p.json"
    assert main(["project", _series(tmp_path, "f.json", f), "-k", "1,2", "-o", str(out)]) == 0
    assert series_from_json(_load(out)) == PowerSeries(2, 6, {(2, 4): 1})
    assert main(["project", str(tmp_path / "f.json"), "-k", "2,2"]) == 2
    assert main(["project", str(tmp_path / "f.json"), "-k", "1,0", "--domain", "ball"]) == 0


def test_decompose_polynomial(tmp_path):
    f = PowerSeries(2, 4, {(0, 0): 3, (1, 1): 1, (2, 2): 1, (1, 0): -2})
    out, parts = tmp_path / "d.json", tmp_path / "parts.csv"
    path = _series(tmp_path, "f.json", f)
    assert main(["decompose", path, "-N", "4", "--domain", "ball", "-o", str(out), "--parts-csv", str(parts)]) == 0
    d = _load(out)
    assert d["p0"] == {"re": 3.0, "im": 0.0}
    assert series_from_json(d["residual"]).is_zero()
    assert {tuple(p["k"]) for p in d["parts"]} == {(1, 1), (1, 0)}
    rows = list(csv.DictReader(parts.open()))
    assert rows and set(rows[0]) == {"k", "degree", "norm_upper"}


def test_decompose_bad_scales(tmp_path):
    path = _series(tmp_path, "f.json", PowerSeries(1, 2, {(1,): 1}))
    assert main(["decompose", path, "-r", "0.9", "-s", "0.5"]) == 2
    assert main(["decompose", path, "-N", "0"]) == 2


def test_extract_assemble_round_trip(tmp_path):
    A = ko.matrix_of("euler", 2, 5)
    mpath = _write(tmp_path / "A.json", A.to_json())
    bpath = tmp_path / "B.json"
    assert main(["extract", mpath, "--domain", "ball", "-o", str(bpath)]) == 0
    out = tmp_path / "A2.json"
    assert main(["assemble", str(bpath), "--constant", "blocks", "--compare", mpath, "-o", str(out)]) == 0
    assert ko.OperatorMatrix.from_json(_load(out)) == A


def test_extract_named_operator(tmp_path):
    bpath = tmp_path / "B.json"
    assert main(["extract", "--op", "identity", "-n", "2", "-D", "4", "-o", str(bpath)]) == 0
    ref = _write(tmp_path / "I.json", ko.matrix_of("identity", 2, 4).to_json())
    assert main(["assemble", str(bpath), "--constant", "unit", "--compare", ref]) == 0
    # dropping the constant column leaves a genuine mismatch
    assert main(["assemble", str(bpath), "--compare", ref]) == 1


def test_assemble_empty_and_malformed(tmp_path):
    bpath = tmp_path / "B.json"
    main(["extract", "--op", "identity", "-n", "2", "-D", "3", "-o", str(bpath)])
    fam = _load(bpath)
    for b in fam["blocks"]:
        b["matrix"]["entries"] = []
    empty = _write(tmp_path / "E.json", fam)
    out = tmp_path / "Z.json"
    assert main(["assemble", empty, "-o", str(out)]) == 0
    assert ko.OperatorMatrix.from_json(_load(out)).entries == {}

    fam = _load(bpath)
    A = ko.OperatorMatrix.from_json(fam["blocks"][0]["matrix"])
    k = tuple(fam["blocks"][0]["k"])
    off = tuple(1 - x for x in k) if sum(k) == 1 else (1, 0)
    bad = ko.OperatorMatrix(A.dim_in, A.dim_out, A.trunc_in, A.trunc_out, {(off, off): 1.0})
    fam["blocks"][0]["matrix"] = bad.to_json()
    assert main(["assemble", _write(tmp_path / "M.json", fam)]) == 2
    assert main(["assemble", str(tmp_path / "missing.json")]) == 2


def test_dual(tmp_path):
    assert main(["dual", "--moments", "ones", "-n", "2", "-D", "6", "--seed", "3"]) == 0
    assert main(["dual", "--moments", "eval0", "-n", "1", "-D", "8", "--growth"]) == 0
    assert main(["dual", "--moments", "bogus"]) == 2


def test_verify(tmp_path):
    rep = tmp_path / "r.json"
    assert main(["verify", "all", "--seed", "7", "--json-out", str(rep)]) == 0
    names = [r["name"] for r in _load(rep)["rows"]]
    for suite in ("multiindex", "series", "quadrature", "kernelop", "circled"):
        assert any(n.startswith(suite) for n in names)
    assert main(["verify", "nosuch"]) == 2


def test_determinism(tmp_path):
    prints = []
    for i in range(2):
        rep = tmp_path / f"r{i}.json"
        assert main(["--seed", "11", "verify", "kernelop", "--json-out", str(rep)]) == 0
        prints.append(RunReport.from_json(_load(rep)).fingerprint())
    assert prints[0] == prints[1]
    other = tmp_path / "r2.json"
    main(["verify", "kernelop", "--seed", "12", "--json-out", str(other)])
    assert RunReport.from_json(_load(other)).inputs != RunReport.from_json(_load(tmp_path / "r0.json")).inputs


def test_numeric_failure(tmp_path):
    kpath = tmp_path / "k.json"
    assert main(["kernel", "identity", "-n", "1", "-D", "40", "-o", str(kpath)]) == 0
    f = _series(tmp_path, "f.json", PowerSeries(1, 40, {(40,): 1, (3,): 1}))
    assert main(["apply", str(kpath), f, "--nodes", "8", "--max-doublings", "1"]) == 3
    assert main(["apply", str(kpath), f, "--nodes", "12"]) == 2


def test_csv_and_report(tmp_path, capsys):
    rep, table = tmp_path / "r.json", tmp_path / "r.csv"
    assert main(["verify", "multiindex", "--json-out", str(rep), "--csv", str(table)]) == 0
    rows = list(csv.DictReader(table.open()))
    assert rows and all(r["ok"] == "true" for r in rows)
    capsys.readouterr()
    assert main(["report", str(rep)]) == 0
    text = capsys.readouterr().out
    assert f"{len(rows)}/{len(rows)} ok" in text


def test_usage_errors():
    assert main([]) == 2
    assert main(["--help"]) == 0


@pytest.mark.parametrize("cmd", [["project", "{}", "-k", "1,1"], ["decompose", "{}"], ["extract", "{}"],
                                 ["assemble", "{}"], ["report", "{}"]])
def test_malformed_artifacts_are_usage_errors(tmp_path, cmd):
    bad = _write(tmp_path / "bad.json", {"kind": "power", "dim": 2, "coeffs": []})
    assert main([bad if c == "{}" else c for c in cmd]) == 2


def test_malformed_kernel(tmp_path):
    f = _series(tmp_path, "f.json", PowerSeries(1, 2, {(1,): 1}))
    assert main(["apply", _write(tmp_path / "k.json", {"entries": [{}]}), f]) == 2
