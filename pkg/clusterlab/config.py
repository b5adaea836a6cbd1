"""Persistent defaults stored in standard user data directories, and validated run configurations"""

import os
import platform
from pathlib import Path
from typing import List, Optional

import sympy
import yaml
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, PrivateAttr, model_validator
from typing_extensions import Annotated

from clusterlab.clustercat import DEFAULT_CAP_DIM
from clusterlab.combinatorics import DEFAULT_MAX_SEEDS, Quiver, parse_quiver
from clusterlab.fdalg import DEFAULT_PRIMES, DEFAULT_SUBMODULE_BUDGET


def _platform_data_dir() -> Path:
    if platform.system() == "Windows":
        return Path(os.environ["LOCALAPPDATA"])
    else:
        xdg_data_home = os.environ.get("XDG_DATA_HOME")
        if xdg_data_home:
            return Path(xdg_data_home)
        return Path.home() / ".local" / "share"


data_dir = _platform_data_dir() / "clusterlab"
config_file = data_dir / "config.yaml"


def _check_primes(primes: List[int]) -> List[int]:
    if not primes:
        raise ValueError("At least one prime is needed for point counting")
    for p in primes:
        if not sympy.isprime(p):
            raise ValueError(f"{p} is not prime")
    return sorted(set(primes))


Primes = Annotated[List[int], AfterValidator(_check_primes)]


class Config(BaseModel):
    """User defaults, overridden by command-line options."""

    primes: Primes = list(DEFAULT_PRIMES)
    cap_dim: int = Field(DEFAULT_CAP_DIM, gt=0)
    submodule_budget: int = Field(DEFAULT_SUBMODULE_BUDGET, gt=0)
    max_seeds: int = Field(DEFAULT_MAX_SEEDS, gt=0)
    cache_dir: Optional[Path] = None
    workers: int = Field(1, gt=0)

    @staticmethod
    def load():
        if config_file.exists():
            with config_file.open("rt", encoding="utf-8") as f:
                content = yaml.load(f, Loader=yaml.SafeLoader) or {}
                return Config.model_validate(content)
        else:
            return Config()

    def save(self):
        data_dir.mkdir(parents=True, exist_ok=True)
        with config_file.open("wt", encoding="utf-8") as f:
            yaml.dump(self.model_dump(mode="json"), f, width=float("inf"))

    model_config = ConfigDict(extra="ignore")


class RunConfig(BaseModel):
    """Everything a command needs, checked before any computation starts."""

    quiver_path: Path
    command: str
    depth: Optional[int] = Field(None, ge=0)
    tilt: str = "id"
    primes: Primes = list(DEFAULT_PRIMES)
    cap_dim: int = Field(DEFAULT_CAP_DIM, gt=0)
    submodule_budget: int = Field(DEFAULT_SUBMODULE_BUDGET, gt=0)
    max_seeds: int = Field(DEFAULT_MAX_SEEDS, gt=0)
    cache_dir: Optional[Path] = None
    out: Optional[Path] = None
    seed: int = 0
    workers: int = Field(1, gt=0)

    _quiver: Optional[Quiver] = PrivateAttr(None)

    @model_validator(mode="after")
    def read_quiver(self):
        text = self.quiver_path.read_text(encoding="utf-8")
        self._quiver = parse_quiver(text)
        if self.depth is None and not self._quiver.is_dynkin():
            raise ValueError(f"{self.quiver_path} is not of Dynkin type; --depth is required")
        return self

    @property
    def quiver(self) -> Quiver:
        assert self._quiver is not None
        return self._quiver

    @classmethod
    def from_options(cls, config: Config, **options) -> "RunConfig":
        """Fill options left unset (None) from the user's defaults."""
        values = {k: v for k, v in options.items() if v is not None}
        for name in ("primes", "cap_dim", "submodule_budget", "max_seeds", "cache_dir", "workers"):
            values.setdefault(name, getattr(config, name))
        return cls.model_validate(values)

    def cache_inputs(self) -> dict:
        """The inputs that determine a command's output."""
        return {
            "command": self.command,
            "quiver": self.quiver.to_text(),
            "depth": self.depth,
            "tilt": self.tilt,
            "primes": self.primes,
            "cap_dim": self.cap_dim,
            "submodule_budget": self.submodule_budget,
            "max_seeds": self.max_seeds,
            "seed": self.seed,
        }

    model_config = ConfigDict(extra="forbid")
