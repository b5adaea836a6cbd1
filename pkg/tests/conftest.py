from pathlib import Path
from typing import NamedTuple

import pytest

from clusterlab.combinatorics import Quiver, parse_quiver

data_dir = Path(__file__).parent / "quivers"


def load_quiver(name: str) -> Quiver:
    return parse_quiver((data_dir / f"{name}.q").read_text(encoding="utf-8"))


class DynkinCase(NamedTuple):
    name: str
    quiver: Quiver
    variables: int
    seeds: int
    positive_roots: int


# Cluster variables are almost positive roots; seeds are counted by the
# generalized Catalan numbers.
DYNKIN = [
    ("a2", 5, 5, 3),
    ("a3", 9, 14, 6),
    ("a4", 14, 42, 10),
    ("d4", 16, 50, 12),
]


@pytest.fixture(params=DYNKIN, ids=lambda c: c[0])
def dynkin_case(request):
    name, variables, seeds, roots = request.param
    yield DynkinCase(name, load_quiver(name), variables, seeds, roots)


@pytest.fixture
def a2():
    return load_quiver("a2")


@pytest.fixture
def a3():
    return load_quiver("a3")


@pytest.fixture
def kron3():
    return load_quiver("kron3")


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep tests away from the user's configuration file."""
    import clusterlab.cli
    import clusterlab.config

    config_file = tmp_path / "config" / "config.yaml"
    monkeypatch.setattr(clusterlab.config, "config_file", config_file)
    monkeypatch.setattr(clusterlab.cli, "config_file", config_file)
    monkeypatch.setattr(clusterlab.config, "data_dir", tmp_path / "config")
