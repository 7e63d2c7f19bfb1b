"""Deterministic run records for CLI commands.

Every command hashes its parameters and input file contents into a run
hash that is embedded in each output (comment line, JSON field or PNG
text chunk) and written to ``run.json``. Re-running with identical
inputs reproduces byte-identical outputs. Outputs created before a
failure are removed.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .. import __version__


def _hash_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def hash_input(path) -> str:
    """Content hash of a file, or of a directory's sorted file hashes."""
    path = Path(path)
    if path.is_dir():
        h = hashlib.sha256()
        for sub in sorted(p for p in path.rglob("*") if p.is_file()):
            h.update(sub.relative_to(path).as_posix().encode())
            h.update(_hash_file(sub).encode())
        return h.hexdigest()
    return _hash_file(path)


# path-valued arguments: inputs are identified by content hash instead,
# and output locations must not change the run identity; --config is a
# meta-flag whose effect is already reflected in the parsed values, and
# --jobs is an execution detail that never changes outputs
EXCLUDED_PARAMS = {"func", "command", "out", "model", "config", "jobs"}


class RunContext:
    def __init__(self, command: str, out_dir, params: dict, inputs: dict,
                 record_name: str = "run.json"):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.record_name = record_name
        params = {k: v for k, v in params.items()
                  if k not in EXCLUDED_PARAMS and k not in inputs}
        self.record = {
            "command": command,
            "version": __version__,
            "params": params,
            "inputs": {name: hash_input(p) for name, p in sorted(inputs.items())
                       if p is not None},
        }
        canonical = json.dumps(self.record, sort_keys=True, separators=(",", ":"))
        self.run_hash = hashlib.sha256(canonical.encode()).hexdigest()[:16]
        self._written: list[Path] = []

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            for path in self._written:
                try:
                    path.unlink()
                except OSError:
                    pass
            return False
        doc = dict(self.record)
        doc["run"] = self.run_hash
        doc["outputs"] = sorted(p.name for p in self._written)
        (self.out_dir / self.record_name).write_text(
            json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")
        return False

    def register(self, path) -> Path:
        p = Path(path)
        self._written.append(p)
        return p

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        p.parent.mkdir(parents=True, exist_ok=True)
        self._written.append(p)
        return p

    @property
    def comment(self) -> str:
        return f"# run={self.run_hash}"

    def write_text(self, name: str, body: str, with_comment: bool = True) -> Path:
        p = self.path(name)
        text = f"{self.comment}\n{body}" if with_comment else body
        p.write_text(text, encoding="utf-8")
        return p

    def write_json(self, name: str, obj: dict) -> Path:
        p = self.path(name)
        doc = dict(obj)
        doc["run"] = self.run_hash
        p.write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")
        return p

    def write_bytes(self, name: str, data: bytes) -> Path:
        p = self.path(name)
        p.write_bytes(data)
        return p
