import json
import subprocess
import sys

import pytest

from ellsoule.cli import main, run_scan


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_scan_small(tmp_path, capsys):
    out = tmp_path / "scan.json"
    rc, text, _ = run(capsys, "scan", "--field", "1", "--max", "100", "--out", str(out))
    assert rc == 0
    rep = json.loads(out.read_text())
    ps = [r["p"] for r in rep["records"]]
    assert ps == [p for p in range(5, 101) if p % 4 == 1 and all(p % k for k in range(2, p))]
    assert rep["counter_examples"] == []
    assert rep["schema"] == 1
    assert not (tmp_path / "scan.json.partial").exists()


def test_scan_empty(capsys):
    rc, text, _ = run(capsys, "scan", "--field", "1", "--max", "4")
    assert rc == 0 and "split primes <= 4: 0" in text
    assert run_scan(1, 4)["records"] == []


def test_scan_csv(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    assert run(capsys, "scan", "--field", "3", "--max", "60", "--out", str(out))[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("p,pi_a,pi_b")
    assert lines[1].startswith("7,")


def test_scan_threads_deterministic():
    a = run_scan(1, 5000, threads=1)
    b = run_scan(1, 5000, threads=3)
    a.pop("timing"), b.pop("timing")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_field_info(capsys):
    rc, text, _ = run(capsys, "field-info", "--field", "1", "--p", "5")
    assert rc == 0
    assert "(2+w)(2-w)" in text
    assert "i1(w) = 3 mod 5" in text and "i2(w) = 2 mod 5" in text
    assert "4 elements" in text
    rc, text, _ = run(capsys, "field-info", "--field", "1", "--p", "7")
    assert rc == 1 and "inert" in text
    rc, text, _ = run(capsys, "field-info", "--field", "163", "--p", "41")
    assert rc == 0 and "41 = (w)" in text


def test_verify(tmp_path, capsys):
    out = tmp_path / "v.json"
    rc, text, _ = run(capsys, "verify", "--field", "3", "--suite", "distribution", "--out", str(out))
    assert rc == 0 and text.count("PASS") == 2
    assert all(r["pass"] for r in json.loads(out.read_text()))


def test_verify_precision_floor(capsys, monkeypatch):
    rc, _, err = run(capsys, "verify", "--field", "1", "--precision", "64")
    assert rc == 2 and "minimum" in err
    monkeypatch.setenv("ELLSOULE_PRECISION", "100")
    rc, _, err = run(capsys, "verify", "--field", "1")
    assert rc == 2


def test_verify_empty_suite(capsys):
    rc, _, err = run(capsys, "verify", "--field", "7", "--suite", "lemma32")
    assert rc == 2 and "no checks" in err


def test_usage_errors(capsys):
    assert run(capsys, "scan", "--field", "5", "--max", "10")[0] == 2
    assert run(capsys, "scan", "--field", "1", "--max", "10", "--threads", "0")[0] == 2
    assert run(capsys, "soule", "--field", "1", "--p", "5", "--m", "3;3")[0] == 2
    assert run(capsys)[0] == 2


def test_soule_unconditional(tmp_path, capsys):
    rc, text, _ = run(capsys, "soule", "--field", "1", "--p", "5", "--m", "5,5")
    assert rc == 0 and "NotSurjective" in text
    out = tmp_path / "v.json"
    rc, text, _ = run(capsys, "soule", "--field", "1", "--p", "5", "--m", "5,1", "--out", str(out))
    assert rc == 0 and "Surjective" in text
    assert json.loads(out.read_text())["numerical"] is False


def test_soule_admissibility(capsys):
    rc, _, err = run(capsys, "soule", "--field", "1", "--p", "5", "--m", "3,3", "--ideal", "2+w")
    assert rc == 2 and "choose a different" in err


def test_soule_config_facts(tmp_path, capsys):
    cfg = tmp_path / "facts.json"
    cfg.write_text(json.dumps({"facts": {"class_number_K(p)_prime_to_p": True}}))
    rc, text, _ = run(capsys, "soule", "--field", "1", "--p", "13", "--m", "3,3", "--config", str(cfg))
    assert rc == 0 and "Surjective" in text


@pytest.mark.slow
def test_soule_numeric(tmp_path, capsys):
    out = tmp_path / "v.json"
    rc, text, _ = run(capsys, "soule", "--field", "1", "--p", "5", "--m", "3,3", "--ideal", "3+2w",
                      "--trials", "5", "--out", str(out))
    assert rc == 0
    doc = json.loads(out.read_text())
    test = next(e for e in doc["evidence"] if e["step"] == "pth-power-test")
    assert len(test["records"]) == 5
    assert doc["verdict"] == "Surjective"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ellsoule", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "ellsoule" in r.stdout
