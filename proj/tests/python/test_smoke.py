import json

import pytest

import genlab


def free_ball(k, r):
    return 1 + sum(2 * k * (2 * k - 1) ** (j - 1) for j in range(1, r + 1))


def test_free_ball_counts_match_closed_form():
    assert genlab.ball_counts("free:3", 5) == [free_ball(3, r) for r in range(6)]
    assert genlab.ball_counts("free:3", 5, workers=3) == genlab.ball_counts("free:3", 5)


def test_braid_worked_examples():
    assert genlab.classify("braid3", "a")["verdict"] == "reducible"
    pa = genlab.classify("braid3", "aB")
    assert pa["verdict"] == "pseudoAnosov" and pa["trace"] == "3"
    assert genlab.classify("braid3", "ab")["verdict"] == "periodic"


def test_threshold_count_documented_instance():
    q = genlab.threshold_count(3, 2, 0)
    assert q["ball"] == "37"
    assert q["single_holds"] and q["binomial_holds"]


def test_invalid_generator_names_the_word():
    with pytest.raises(genlab.ValidationError, match="aBz"):
        genlab.effective_config({"model": "braid3", "experiments": [{"kind": "classify", "generators": ["a", "aBz"]}]})


def test_empty_experiment_list_is_success(tmp_path):
    code, manifest = genlab.run({}, out_dir=tmp_path)
    assert code == 0
    assert manifest["experiments"] == []
    assert json.loads((tmp_path / "manifest.json").read_text()) == manifest


def test_runs_are_byte_identical(tmp_path):
    cfg = {"model": "braid3", "seed": 3, "experiments": [{"kind": "genericity", "R_max": 8}, {"kind": "classify", "radius": 4}]}
    code1, m1 = genlab.run(cfg, workers=1, out_dir=tmp_path / "a")
    code2, m2 = genlab.run(cfg, workers=4, out_dir=tmp_path / "b")
    assert code1 == code2 == 0
    assert m1 == m2
    for out in m1["experiments"][0]["outputs"]:
        data = (tmp_path / "a" / out["path"]).read_bytes()
        assert data == (tmp_path / "b" / out["path"]).read_bytes()
        assert genlab.sha256_hex(data.decode()) == out["sha256"]
    assert {o["path"].rsplit(".", 1)[1] for o in m1["experiments"][0]["outputs"]} == {"csv", "json", "dat"}
