import json
import shutil
import subprocess
import sys


from oscindex.certfile import save_certificate
from oscindex.cli import main
from oscindex.factorization import builtin_certificate_PQUh
from oscindex.instances import bundled


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_index_pquh(capsys, tmp_path):
    code, out = run(capsys, "index", "bundled:pquh", "--store", str(tmp_path / "store"))
    rep = json.loads(out.out)
    assert code == 0 and rep["case"] == "V" and rep["index"] == 0
    assert len(rep["instance_hash"]) == 64
    assert (tmp_path / "store" / f"{rep['instance_hash']}.cert").exists()


def test_index_toeplitz(capsys):
    code, out = run(capsys, "index", "bundled:toeplitz_k1", "--store", "")
    assert code == 0 and json.loads(out.out)["index"] == -1


def test_check_corner_equality(capsys):
    code, out = run(capsys, "check", "bundled:corner_equality", "--store", "")
    assert code == 2
    assert any("corner modulus equality" in r for r in json.loads(out.out)["verdict"]["reasons"])


def test_classify(capsys):
    code, out = run(capsys, "classify", "bundled:qpuh")
    rep = json.loads(out.out)
    assert code == 0 and rep["case"] == "VI" and len(rep["corners"]) == 4
    assert run(capsys, "classify", "bundled:mixed")[0] == 2
    assert run(capsys, "classify", "bundled:corner_equality")[0] == 3


def test_inconclusive_exit(capsys, tmp_path):
    p = tmp_path / "g.json"
    spec = dict(bundled("case3_mult").spec, certificate=None)
    p.write_text(json.dumps(spec))
    code, out = run(capsys, "index", str(p), "--store", "")
    assert code == 3 and json.loads(out.out)["index"] is None


def test_input_error(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, out = run(capsys, "index", str(p))
    assert code == 4 and "invalid JSON" in out.err
    assert run(capsys, "index", str(tmp_path / "missing.json"))[0] == 4


def test_out_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "index", "bundled:case5_composite", "--store", "", "--out", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["index"] == -1


def test_tolerance_flags(capsys):
    code, out = run(capsys, "index", "bundled:case1", "--store", "", "--tol", "0.1", "--margin", "1e-4")
    rep = json.loads(out.out)
    assert code == 0 and rep["index"] == -1 and rep["options"]["tol"] == 0.1


def test_verify_cert_file(capsys, tmp_path):
    path = save_certificate(builtin_certificate_PQUh(1.0), tmp_path / "p.cert")
    code, out = run(capsys, "verify-cert", "bundled:pquh", "--cert", str(path), "--grid-T", "5", "--grid-q", "4")
    rep = json.loads(out.out)
    assert code == 0 and rep["report"]["accepted"]
    assert rep["operator_residual"]["sup_norm"] < 1e-5


def test_verify_cert_without_certificate(capsys):
    assert run(capsys, "verify-cert", "bundled:case1", "--store", "")[0] == 4


def test_cached_certificate_is_reused(capsys, tmp_path):
    store = str(tmp_path / "store")
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"oscillation": {"h": 0.5}, "b0": "P", "b1": "Q"}))
    code, out = run(capsys, "index", str(p), "--store", store)
    first = json.loads(out.out)
    assert code == 0 and "certificate_source" not in first
    assert (tmp_path / "store" / f"{first['instance_hash']}.cert").exists()
    assert (tmp_path / "store" / "pquh_h0.5.cert").exists()
    code, out = run(capsys, "index", str(p), "--store", store)
    second = json.loads(out.out)
    assert code == 0 and second["certificate_source"] == "store" and second["index"] == 0


def test_dump_curves(capsys, tmp_path):
    code, out = run(capsys, "dump-curves", "bundled:pquh", "--out", str(tmp_path / "d"))
    files = json.loads(out.out)["files"]
    assert code == 0 and "line_det_w1.csv" in files and len(files) == 8
    assert len(set(files)) == len(files)
    head = (tmp_path / "d" / files[0]).read_text().splitlines()[0]
    assert head == "parameter,re,im,cumulative_arg"


def test_dump_curves_needs_out(capsys):
    assert run(capsys, "dump-curves", "bundled:pquh")[0] == 4


def test_console_script():
    exe = shutil.which("oscindex")
    cmd = [exe] if exe else [sys.executable, "-m", "oscindex.cli"]
    res = subprocess.run(cmd + ["index", "bundled:pquh", "--store", ""], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["case"] == "V"
