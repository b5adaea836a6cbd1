"""On-disk cache of command outputs, keyed by a hash of the inputs."""

import hashlib
import json
import logging
import shutil
from pathlib import Path
from typing import Any, Mapping, Optional

logger = logging.getLogger(__name__)

FORMAT_VERSION = "clusterlab-cache-1"
"""Bumped whenever any output format changes; entries under other versions are ignored."""


def cache_key(inputs: Mapping[str, Any]) -> str:
    payload = json.dumps({"format": FORMAT_VERSION, "inputs": inputs}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Cache:
    def __init__(self, directory: Path):
        self.directory = Path(directory)

    @property
    def current(self) -> Path:
        return self.directory / FORMAT_VERSION

    def _path(self, key: str) -> Path:
        return self.current / key[:2] / f"{key}.json"

    def get(self, inputs: Mapping[str, Any]) -> Optional[str]:
        path = self._path(cache_key(inputs))
        if not path.exists():
            return None
        logger.debug(f"Cache hit: {path}")
        return path.read_text(encoding="utf-8")

    def put(self, inputs: Mapping[str, Any], text: str):
        path = self._path(cache_key(inputs))
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)

    def purge_stale(self) -> int:
        """Delete entries written under other format versions. Returns how many directories went."""
        if not self.directory.exists():
            return 0
        removed = 0
        for child in sorted(self.directory.iterdir()):
            if child.is_dir() and child.name != FORMAT_VERSION:
                logger.info(f"Removing stale cache {child}")
                shutil.rmtree(child)
                removed += 1
        return removed
