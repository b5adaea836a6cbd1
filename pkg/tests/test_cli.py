import json

import pytest
from typer.testing import CliRunner

from clusterlab import __version__
from clusterlab.cache import FORMAT_VERSION
from clusterlab.cli import app
from tests.conftest import data_dir

runner = CliRunner()


def run(*args: str):
    return runner.invoke(app, ["--quiet", *args])


def run_json(tmp_path, *args: str):
    out = tmp_path / "out.json"
    result = run(*args, "--out", str(out))
    return result, json.loads(out.read_text(encoding="utf-8"))


def quiver(name: str) -> str:
    return str(data_dir / f"{name}.q")


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert f"clusterlab v{__version__}" in result.output


def test_enumerate(tmp_path):
    result, data = run_json(tmp_path, "enumerate", "--quiver", quiver("a3"))
    assert result.exit_code == 0
    assert data["complete"]
    assert data["seed_count"] == 14
    assert data["variable_count"] == 9
    assert data["seeds"][0]["trace"] == "id"
    assert data["seeds"][0]["tilt"] == ["sp:1", "sp:2", "sp:3"]


def test_enumerate_in_seed_coordinates(tmp_path):
    result, data = run_json(tmp_path, "enumerate", "--quiver", quiver("a2"), "--tilt", "mu(1)")
    assert result.exit_code == 0
    assert all(v["key"].count("u") == 0 for v in data["variables"])
    assert "x1" in [v["key"] for v in data["variables"]]


def test_depth_is_required_outside_dynkin_type():
    result = run("enumerate", "--quiver", quiver("kron3"))
    assert result.exit_code == 1


def test_bad_quiver_file(tmp_path):
    path = tmp_path / "bad.q"
    path.write_text("1 -> 2\n2 -> 1\n", encoding="utf-8")
    assert run("enumerate", "--quiver", str(path)).exit_code == 1
    path.write_text("1 => 2\n", encoding="utf-8")
    assert run("enumerate", "--quiver", str(path)).exit_code == 1


def test_verify_denominator_passes(tmp_path):
    result, data = run_json(tmp_path, "verify", "denominator", "--quiver", quiver("a2"), "--all")
    assert result.exit_code == 0
    assert data["summary"]["verdict"] == "pass"
    assert len(data["reports"]) == 5


def test_verify_single_trace(tmp_path):
    result, data = run_json(
        tmp_path, "verify", "character", "--quiver", quiver("a2"), "--tilt", "mu(2)"
    )
    assert result.exit_code == 0
    assert data["campaign"] == "character"
    assert data["trace"] == "mu(2)"


def test_verify_converse_on_dynkin_is_empty(tmp_path):
    result, data = run_json(tmp_path, "verify", "converse", "--quiver", quiver("a2"))
    assert result.exit_code == 0
    assert data["reports"] == []


def test_character(tmp_path):
    result, data = run_json(
        tmp_path, "character", "--quiver", quiver("a2"), "--object", "dim:1,0", "--ledger"
    )
    assert result.exit_code == 0
    assert data["value"] == "(1 + x2) / x1"
    assert data["denominator"] == [1, 0]
    assert len(data["ledger"]) == 2


def test_character_of_a_sum(tmp_path):
    result, data = run_json(
        tmp_path, "character", "--quiver", quiver("a2"), "--object", "sp:1 + sp:2"
    )
    assert result.exit_code == 0
    assert data["value"] == "x1*x2"
    assert data["ledger"] is None


def test_unknown_object():
    result = run("character", "--quiver", quiver("a2"), "--object", "dim:2,2")
    assert result.exit_code == 1


def test_grassmannian(tmp_path):
    result, data = run_json(
        tmp_path, "grassmannian", "--quiver", quiver("a3"), "--object", "dim:1,1,1"
    )
    assert result.exit_code == 0
    assert data["dims"] == [1, 1, 1]
    assert len(data["grassmannians"]) == 8
    assert sum(g["chi"] for g in data["grassmannians"]) == 4


def test_compat(tmp_path):
    result, data = run_json(tmp_path, "compat", "--quiver", quiver("a2"), "--object", "dim:1,1")
    assert result.exit_code == 0
    assert data["object"] == "dim:1,1"
    assert data["summary"]["verdict"] == "pass"


@pytest.mark.parametrize("primes", ["4", "2,x"])
def test_bad_primes(primes):
    result = run("character", "--quiver", quiver("a2"), "--object", "dim:1,0", "--primes", primes)
    assert result.exit_code != 0


def test_cache_returns_identical_output(tmp_path):
    cache = tmp_path / "cache"
    args = ["enumerate", "--quiver", quiver("a3"), "--cache-dir", str(cache)]
    first = run(*args, "--out", str(tmp_path / "first.json"))
    second = run(*args, "--out", str(tmp_path / "second.json"))
    assert first.exit_code == second.exit_code == 0
    assert (tmp_path / "first.json").read_text() == (tmp_path / "second.json").read_text()
    entries = list((cache / FORMAT_VERSION).glob("*/*.json"))
    assert len(entries) == 1


def test_purge_cache(tmp_path):
    cache = tmp_path / "cache"
    (cache / "clusterlab-cache-0" / "ab").mkdir(parents=True)
    (cache / FORMAT_VERSION).mkdir()
    result = run("purge-cache", "--cache-dir", str(cache))
    assert result.exit_code == 0
    assert not (cache / "clusterlab-cache-0").exists()
    assert (cache / FORMAT_VERSION).exists()


def test_config_path():
    result = run("config-path")
    assert result.exit_code == 0
    assert result.output.strip().endswith("config.yaml")


def test_reruns_are_byte_identical_without_a_cache(tmp_path, monkeypatch):
    monkeypatch.delenv("CACHE_DIR", raising=False)
    monkeypatch.setattr("clusterlab.config.config_file", tmp_path / "config.yaml")
    args = ["verify", "denominator", "--quiver", quiver("a3"), "--all"]
    first = run(*args, "--out", str(tmp_path / "first.json"))
    second = run(*args, "--workers", "2", "--out", str(tmp_path / "second.json"))
    assert first.exit_code == second.exit_code == 0
    assert (tmp_path / "first.json").read_bytes() == (tmp_path / "second.json").read_bytes()
    assert not list(tmp_path.glob("**/" + FORMAT_VERSION))
