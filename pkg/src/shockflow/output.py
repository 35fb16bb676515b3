"""Atomic CSV output and run manifests."""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .fund_flow import RNG_ALGORITHM

MANIFEST_SUFFIX = ".manifest.json"


def fmt(value) -> str:
    """Shortest round-tripping text for floats, plain text otherwise."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "item"):  # numpy scalar
        return fmt(value.item())
    return str(value)


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def csv_bytes(header: Sequence[str], rows: Iterable[Sequence]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue().encode()


def now_utc() -> str:
    """Current UTC time, or SOURCE_DATE_EPOCH when set (reproducible manifests)."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = (dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc) if epoch
         else dt.datetime.now(dt.timezone.utc))
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def input_ref(path) -> dict | None:
    """Name and SHA-256 of an input file, independent of where it lives."""
    if path is None:
        return None
    path = Path(path)
    return {"name": path.name, "sha256": hashlib.sha256(path.read_bytes()).hexdigest()}


def digest_json(obj) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()


class RunRecorder:
    """Collects a command's outputs and writes the side-car manifest last.

    The manifest lists every file written with its SHA-256, so each output is
    traceable to the run that produced it.
    """

    def __init__(self, out_dir: str | Path, command: str, resolved: dict | None = None,
                 seeds: Sequence[int] = ()):
        self.out_dir = Path(out_dir)
        self.command = command
        self.resolved = resolved or {}
        self.seeds = [int(s) for s in seeds]
        self.started = now_utc()
        self.outputs: dict[str, str] = {}

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        return self.write_bytes(name, csv_bytes(header, rows))

    def write_bytes(self, name: str, data: bytes) -> Path:
        path = self.out_dir / name
        atomic_write_bytes(path, data)
        self.outputs[name] = hashlib.sha256(data).hexdigest()
        return path

    def finish(self) -> Path:
        manifest = {
            "command": self.command,
            "config_digest": digest_json(self.resolved),
            "config": self.resolved,
            "seeds": self.seeds,
            "tool_version": __version__,
            "rng_algorithm": RNG_ALGORITHM,
            "started": self.started,
            "finished": now_utc(),
            "outputs": dict(sorted(self.outputs.items())),
        }
        data = (json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n").encode()
        path = self.out_dir / f"{self.command}{MANIFEST_SUFFIX}"
        atomic_write_bytes(path, data)
        return path
