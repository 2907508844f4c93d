import json

import pytest

from shires.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    ConfigError,
    GridConfig,
    PipelineConfig,
    build_parser,
    closure,
    exit_code,
    main,
)


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_closure_orders_dependencies():
    assert closure("measure") == ("iterate", "roots", "ppl", "voronoi", "measure")
    assert closure("orlov-check") == ("orlov-check",)
    assert closure("reconstruct") == ("ppl", "voronoi", "reconstruct")


@pytest.mark.parametrize("kw, msg", [
    (dict(steps=("bogus",)), "unknown step"),
    (dict(steps=("measure",)), "needs"),
    (dict(n=-1), "nonnegative"),
    (dict(grid=GridConfig(100, 64)), "multiple"),
    (dict(precision=32), "64 bits"),
])
def test_invalid_configs(kw, msg):
    with pytest.raises(ConfigError, match=msg):
        PipelineConfig("first-example", **kw).validate()


def test_from_dict():
    cfg = PipelineConfig.from_dict({"scenario": "monomial", "steps": ["ppl"], "grid": {"size": 128, "coarse": 32}})
    assert cfg.steps == ("ppl",) and cfg.grid.size == 128
    with pytest.raises(ConfigError):
        PipelineConfig.from_dict({"scenario": "monomial", "colour": "red"})
    with pytest.raises(ConfigError):
        PipelineConfig.from_dict({"steps": ["ppl"]})


def test_exit_codes():
    assert exit_code({"status": "ok"}) == 0
    assert exit_code({"status": "config-error"}) == 2
    assert exit_code({"status": "check-failed"}) == 3
    assert exit_code({"status": "certification-failure"}) == 3


def test_parser_has_every_step():
    p = build_parser()
    assert p.parse_args(["voronoi", "torus-dz", "--grid", "64"]).grid == 64
    assert p.parse_args(["orlov-check", "--K", "500"]).K == 500
    with pytest.raises(SystemExit):
        p.parse_args(["nonsense"])


def test_unknown_scenario_is_a_config_error(tmp_path):
    assert main(["ppl", "no-such-scenario", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_bad_precision_is_a_config_error(tmp_path):
    assert main(["ppl", "first-example", "--precision", "16", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_unreadable_run_config(tmp_path):
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"scenario": "first-example", "steps": ["measure"]}))
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_unknown_figure(tmp_path):
    assert main(["figure", "nope", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_measure_run_writes_hashed_manifest(tmp_path):
    out = tmp_path / "run"
    assert main(["measure", "first-example", "--n", "8", "--fast", "--out", str(out)]) == EXIT_OK
    m = manifest(out)
    assert m["status"] == "ok"
    assert m["completed_steps"] == list(closure("measure"))
    assert m["files"]
    for f in m["files"]:
        assert (out / f["path"]).exists() and len(f["sha256"]) == 64


def test_runs_are_deterministic(tmp_path):
    hashes = []
    for k in range(2):
        out = tmp_path / str(k)
        assert main(["ppl", "monomial", "--out", str(out)]) == EXIT_OK
        hashes.append({f["path"]: f["sha256"] for f in manifest(out)["files"]})
    assert hashes[0] == hashes[1] and hashes[0]


def test_config_file_run(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scenario": "torus-dz", "steps": ["ppl", "voronoi", "reconstruct"],
                               "grid": {"size": 64, "coarse": 16}}))
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--out", str(out)]) == EXIT_OK
    assert manifest(out)["completed_steps"] == ["ppl", "voronoi", "reconstruct"]


def test_orlov_check(tmp_path):
    assert main(["orlov-check", "--K", "20000", "--out", str(tmp_path)]) == EXIT_OK
