"""Run manifests: every simulation artifact records the exact command,
parameters and seed that produced it, plus SHA-256 digests of any files it
wrote. Manifests contain no timestamps or environment state, so re-running
one reproduces its outputs byte-identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

ARTIFACT_VERSION = "1"

__all__ = ["ARTIFACT_VERSION", "RunManifest", "sha256_file"]


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int | None = None
    artifact_version: str = ARTIFACT_VERSION
    outputs: dict = field(default_factory=dict)

    def record_output(self, path) -> None:
        self.outputs[str(path)] = sha256_file(path)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "artifact_version": self.artifact_version,
            "outputs": self.outputs,
        }

    def write_sidecar(self, artifact_path) -> Path:
        sidecar = Path(str(artifact_path) + ".manifest.json")
        sidecar.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return sidecar
