import json

import pytest

from subrank_gap.cli import main
from subrank_gap.corpus import named
from subrank_gap.fileformat import dump_tensor, parse_tensor
from subrank_gap.tensor import Tensor3


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def machine(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "machine")
    return code, json.loads(out)


@pytest.fixture
def corpus_file(tmp_path, capsys):
    def write(name, field="GF(101)"):
        path = tmp_path / f"{name}.json"
        assert run(capsys, "corpus", name, "--field", field, "-o", path)[0] == 0
        return path
    return write


def test_corpus_round_trip(corpus_file):
    path = corpus_file("D", "GF(7)")
    assert parse_tensor(path.read_text()) == named("D", parse_tensor(path.read_text()).field)


def test_unknown_corpus_name(capsys):
    assert run(capsys, "corpus", "nonsense")[0] == 1


def test_classify_machine_output(capsys, corpus_file):
    code, doc = machine(capsys, "classify", corpus_file("W"))
    assert code == 0
    (r,) = doc["results"]
    assert (r["bucket"], r["subcase"], r["value"]["symbol"]) == ("C1", "WEquivalent", "c1")
    assert r["value"]["numeric"].startswith("1.889881574842")
    assert len(r["certificates"]) == 2


def test_classify_is_deterministic(capsys, corpus_file):
    paths = [corpus_file(n) for n in ("I", "D", "N2")]
    first = run(capsys, "classify", *paths, "--format", "machine", "--seed", 7)
    second = run(capsys, "classify", *paths, "--format", "machine", "--seed", 7)
    assert first == second
    other = run(capsys, "classify", *paths, "--format", "machine", "--seed", 8)
    assert json.loads(other[1])["results"][0]["seed"] != json.loads(first[1])["results"][0]["seed"]


def test_seed_from_environment(capsys, corpus_file, monkeypatch):
    path = corpus_file("I")
    monkeypatch.setenv("SUBRANK_GAP_SEED", "7")
    from_env = machine(capsys, "classify", path)[1]
    monkeypatch.delenv("SUBRANK_GAP_SEED")
    explicit = machine(capsys, "classify", path, "--seed", 7)[1]
    assert from_env == explicit


def test_parallel_matches_serial(capsys, corpus_file):
    paths = [corpus_file(n) for n in ("I", "W", "D")]
    serial = run(capsys, "classify", *paths, "--format", "machine")
    parallel = run(capsys, "classify", *paths, "--format", "machine", "--jobs", 2)
    assert serial == parallel


def test_zero_tensor_exit_code(capsys, tmp_path):
    from subrank_gap.fields import PrimeField
    path = tmp_path / "zero.json"
    path.write_text(dump_tensor(Tensor3.zeros((2, 2, 2), PrimeField(5))))
    assert run(capsys, "classify", path)[0] == 2


def test_parse_error_exit_code(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"kind": "tensor", "field": "GF(5)", "dims": [2, 2, 2], "entries": [[3, 1, 1, "1"]]}')
    code, out, _ = run(capsys, "classify", path)
    assert code == 1 and "line" in out
    assert run(capsys, "classify", tmp_path / "missing.json")[0] == 1


def test_verify_certificates(capsys, corpus_file, tmp_path):
    path = corpus_file("D")
    certs = tmp_path / "certs"
    assert run(capsys, "classify", path, "--certificates-dir", certs)[0] == 0
    files = sorted(certs.glob("*.json"))
    assert len(files) == 2
    for f in files:
        source = json.loads(f.read_text())["source"]
        extra = ["--source", path] if source == "input" else []
        assert run(capsys, "verify", f, *extra)[0] == 0

    # corrupt one map entry
    doc = json.loads(files[0].read_text())
    entry = doc["maps"][0]["entries"][0]
    entry[-1] = str((int(entry[-1]) + 1) % 101)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    extra = ["--source", path] if doc["source"] == "input" else []
    assert run(capsys, "verify", bad, *extra)[0] == 4


def test_constants(capsys):
    code, doc = machine(capsys, "constants", "--digits", 12, "--timings")
    assert code == 0
    assert doc["c1"] == "1.88988157484"
    assert doc["c2"].startswith("2.68344")
    assert doc["tau"].startswith("0.4359548774")
    assert doc["seconds"] < 5
    code, out, _ = run(capsys, "constants", "--digits", 12)
    assert out.startswith("c1  = 1.88988157484")


def test_oracle_commands(capsys, corpus_file):
    w, i = corpus_file("W", "GF(2)"), corpus_file("I", "GF(2)")
    code, doc = machine(capsys, "oracle", "subrank", i)
    assert code == 0 and doc["subrank"] == 2
    code, doc = machine(capsys, "oracle", "restricts", i, w)
    assert code == 0 and doc["restricts"] is False
    code, doc = machine(capsys, "oracle", "power", w, "--n", 1)
    assert code == 0 and doc["subrank"] == 1


def test_oracle_budget_exceeded(capsys, corpus_file):
    d = corpus_file("D", "GF(3)")
    code, doc = machine(capsys, "oracle", "subrank", d, "--budget-maps", 5)
    # an exhausted budget is an honest "unknown", not an error
    assert code == 0 and doc["complete"] is False and "subrank" not in doc


def test_support_value(capsys, corpus_file):
    code, doc = machine(capsys, "support-value", corpus_file("D"), "--strict")
    assert code == 0 and abs(float(doc["value"]) - 3) < 1e-6


def test_classify_space(capsys, tmp_path):
    from subrank_gap.fileformat import dump_space
    from subrank_gap.tensor import slice_space
    path = tmp_path / "space.json"
    path.write_text(dump_space(slice_space(named("D"), 2)))
    code, doc = machine(capsys, "classify-space", path)
    assert code == 0 and doc["tag"] == "Skew3x3"
