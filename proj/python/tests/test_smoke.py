import json
import math
import pathlib

import pytest

import steerbench

ROOT = pathlib.Path(__file__).resolve().parents[2]
GOLDEN = ROOT / "tests" / "data"
SAXPY = "kernel void A ( global float * a , global float * b ) { a [ 0 ] = a [ 0 ] + b [ 0 ] ; }"


def test_validate_accepts_and_rejects():
    ok = steerbench.validate(SAXPY)
    assert ok["valid"]
    assert ok["canonical"] == SAXPY
    bad = steerbench.validate("kernel void A ( ) { x = 1 ; }")
    assert not bad["valid"]
    assert bad["canonical"] is None
    assert bad["diagnostics"]


def test_features_match_golden_file():
    golden = json.loads((GOLDEN / "golden_features.json").read_text())
    for name, spaces in golden.items():
        text = (GOLDEN / "golden" / name).read_text()
        canonical = steerbench.validate(text)["canonical"]
        for space, expected in spaces.items():
            assert steerbench.extract(canonical, space) == expected, (name, space)


def test_renaming_leaves_features_alone():
    renamed = steerbench.rewrite_identifiers(SAXPY, 7)
    assert renamed != SAXPY
    assert steerbench.extract(renamed, "ircount") == steerbench.extract(SAXPY, "ircount")


def test_proximity_endpoints():
    target = steerbench.extract(SAXPY, "grewe")
    origin = [0.0] * len(steerbench.dimension_names("grewe"))
    assert steerbench.relative_proximity("grewe", target, target) == 100.0
    assert steerbench.relative_proximity("grewe", origin, target) == 0.0
    assert steerbench.distance("grewe", origin, target) == pytest.approx(math.sqrt(sum(v * v for v in target)))
    with pytest.raises(ValueError):
        steerbench.relative_proximity("grewe", target, origin)


def test_vote_entropy():
    assert steerbench.vote_entropy([3, 3]) == pytest.approx(math.log(2), abs=1e-12)
    assert steerbench.vote_entropy([6, 0]) == 0.0


def test_errors_map_to_python_exceptions():
    with pytest.raises(steerbench.PreconditionError):
        steerbench.extract("kernel void A ( ) { x = 1 ; }")
    with pytest.raises(ValueError):
        steerbench.dimension_names("llvm")


def test_cli_round_trip(tmp_path):
    code, out, _ = steerbench.run_cli(["--version"])
    assert code == 0 and out.strip()
    code, _, err = steerbench.run_cli(["train", "--workspace", str(tmp_path)])
    assert code == 3 and err
    code, _, _ = steerbench.run_cli(["no-such-command"])
    assert code == 2
