import json
import subprocess
import sys

import pytest

from corpus import skew_instances, skew_products
from qgforge.cli import main
from qgforge.errors import ConstructionError, PreconditionError
from qgforge.formats import (
    canonical_json,
    factors_from_doc,
    format_magma_json,
    format_magma_text,
    parse_magma,
    skew_factors_to_doc,
    smash_factors_to_doc,
)
from qgforge.groups import cyclic, symmetric
from qgforge.search import random_smash_factors


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    (tmp_path / "z3.magma").write_text(format_magma_text(cyclic(3)))
    (tmp_path / "z4.json").write_text(format_magma_json(cyclic(4)))
    (tmp_path / "s3.json").write_text(format_magma_json(symmetric(3), labels=list("abcdef")))
    (tmp_path / "sub3.magma").write_text("order 3\n0 2 1\n1 0 2\n2 1 0\n")
    A, B, f = skew_instances()["Z4*Z4 N=Z2"]
    (tmp_path / "skew.json").write_text(canonical_json(skew_factors_to_doc(f)) + "\n")
    sf = random_smash_factors(cyclic(3), cyclic(3), 5)
    (tmp_path / "smash.json").write_text(canonical_json(smash_factors_to_doc(sf)) + "\n")
    return tmp_path


def test_text_and_json_round_trip():
    for m in (cyclic(5), symmetric(3), skew_products()["Z4*Z4 N=Z2"].magma):
        assert parse_magma(format_magma_text(m)).magma == m
        assert parse_magma(format_magma_json(m)).magma == m


def test_canonical_json_byte_identical():
    text = format_magma_json(symmetric(3), labels=list("abcdef"), metadata={"z": 1, "a": [1, 2]})
    mf = parse_magma(text)
    assert format_magma_json(mf.magma, mf.labels, mf.metadata) == text
    assert text.index('"a"') < text.index('"z"')


def test_factor_docs_round_trip():
    A, B, f = skew_instances()["Z6*Z2 N=Z2"]
    g = factors_from_doc(json.loads(json.dumps(skew_factors_to_doc(f))))
    assert (g.xi == f.xi).all() and (g.phi == f.phi).all()
    doc = skew_factors_to_doc(f)
    doc["xi"] = doc["xi"][:2]
    with pytest.raises(PreconditionError):
        factors_from_doc(doc)
    with pytest.raises(PreconditionError):
        factors_from_doc({"format_version": 1, "kind": "other"})


@pytest.mark.parametrize("text", ["", "order 2\n0 1\n1 5\n", "size 2\n0 1\n1 0\n", '{"order": 1}',
                                  '{"format_version": 1, "order": 2, "table": [[0]]}', "{bad"])
def test_parse_errors(text):
    with pytest.raises(ConstructionError):
        parse_magma(text)


def test_analyze_json(capsys, files):
    code, out, _ = run(capsys, "analyze", files / "z3.magma", "--json")
    doc = json.loads(out)
    assert code == 0
    assert list(doc)[:2] == ["schema_version", "command"]
    assert doc["nucleus"] == [0, 1, 2] and doc["fan"] == [0]


def test_analyze_non_fan(capsys, files):
    code, out, _ = run(capsys, "analyze", files / "sub3.magma", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["fan_quasigroup"] is False and doc["right_units"] == [0]


def test_census(capsys):
    assert run(capsys, "census", "--order", "4", "--reduced")[:2] == (0, "4\n")
    assert run(capsys, "census", "--order", "4")[1] == "576\n"
    assert run(capsys, "census", "--order", "9")[0] == 3


def test_skew_smash_verify_quotient_pipeline(capsys, files):
    g = files / "g.json"
    code, out, _ = run(capsys, "skew-smash", files / "z4.json", files / "z4.json",
                       "--factors", files / "skew.json", "-o", g, "--json")
    assert code == 0 and json.loads(out)["fan"] == [0, 2]
    stored = parse_magma(g.read_text())
    assert stored.metadata["operation"] == "skew-smash"
    assert stored.magma == skew_products()["Z4*Z4 N=Z2"].magma
    code, out, _ = run(capsys, "verify", g, "--json", "--n4-max-order", "16")
    doc = json.loads(out)
    assert code == 0 and doc["failed"] == []
    assert all(r["failure_count"] == 0 and r["skipped"] is None for r in doc["reports"])
    code, out, _ = run(capsys, "quotient", g, "--subgroup", "0,2", "--json")
    assert code == 0 and json.loads(out)["order"] == 8
    assert run(capsys, "quotient", g, "--subgroup", "0,1")[0] == 2
    assert run(capsys, "quotient", g, "--subgroup", "0,99")[0] == 2


def test_skew_smash_rejects_invalid(capsys, files):
    doc = json.loads((files / "skew.json").read_text())
    doc["xi"][0][0][0][0] = 1
    (files / "bad.json").write_text(json.dumps(doc))
    code, out, _ = run(capsys, "skew-smash", files / "z4.json", files / "z4.json",
                       "--factors", files / "bad.json", "--json")
    assert code == 2 and json.loads(out)["valid"] is False


def test_verify_non_fan_exit_1(capsys, files):
    code, out, _ = run(capsys, "verify", files / "sub3.magma")
    assert code == 1 and "not a fan quasigroup" in out
    assert run(capsys, "verify", files / "sub3.magma", "--identities", "80-81")[0] == 0
    assert run(capsys, "verify", files / "z3.magma", "--identities", "99")[0] == 2


def test_smash_and_product(capsys, files):
    code, out, _ = run(capsys, "smash", files / "z3.magma", files / "z3.magma",
                       "--factors", files / "smash.json", "--json")
    assert code == 0 and json.loads(out)["order"] == 9
    assert run(capsys, "smash", files / "z3.magma", files / "z3.magma", "--factors", files / "skew.json")[0] == 2
    code, out, _ = run(capsys, "product", files / "z3.magma", files / "s3.json", "--json")
    assert code == 0 and json.loads(out)["order"] == 18
    assert run(capsys, "product", files / "z3.magma", "--max-order", "2")[0] == 3


def test_search_and_replay(capsys, files):
    w = files / "w.json"
    code, out, _ = run(capsys, "search", "--target", "left-not-right", "--seed", "1",
                       "--budget", "50", "-o", w, "--json")
    assert code == 0 and json.loads(out)["status"] == "found"
    assert run(capsys, "replay", w)[0] == 0
    code, out, _ = run(capsys, "search", "--target", "one-sided-inverse-gap", "--order-a", "4",
                       "--order-b", "4", "--budget", "3", "--json")
    assert code == 3 and json.loads(out)["candidates_tried"] == 3


def test_missing_file_is_input_error(capsys, tmp_path):
    assert run(capsys, "analyze", tmp_path / "nope")[0] == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "qgforge", "census", "--order", "3", "--reduced"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout == "1\n"
