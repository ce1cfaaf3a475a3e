"""Run configuration parsing, CSV conventions, and run manifests.

Formats are deliberately plain: flat key=value config with [sections],
RFC-4180 CSV with LF endings and 17-significant-digit floats, and a JSON
manifest carrying the config hash plus per-file checksums.  Outputs are
byte-stable for a fixed (config, seed, version); set SOURCE_DATE_EPOCH
to also pin the manifest timestamps.
"""

import hashlib
import io
import json
import math
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed or unknown configuration input (CLI exit code 2)."""


class ResourceBudgetError(RuntimeError):
    """A run was refused because it exceeds a resource budget (exit code 4)."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved flat configuration: section-qualified keys to raw strings."""

    entries: Tuple[Tuple[str, str], ...]

    def mapping(self) -> Dict[str, str]:
        return dict(self.entries)

    def canonical_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in sorted(self.entries))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()


def parse_config(text: str) -> RunConfig:
    """Parse flat key = value lines with [section] headers and # comments."""
    section = ""
    entries: List[Tuple[str, str]] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if not section:
                raise ConfigError(f"line {lineno}: empty section name")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        full = f"{section}.{key}" if section else key
        if full in seen:
            raise ConfigError(f"line {lineno}: duplicate key {full!r}")
        seen.add(full)
        entries.append((full, value))
    return RunConfig(entries=tuple(entries))


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


class ConfigView:
    """Typed access with unknown-key detection over a RunConfig."""

    def __init__(self, config: RunConfig):
        self._map = config.mapping()
        self._used = set()

    def _raw(self, key: str, default=None, required=False):
        if key in self._map:
            self._used.add(key)
            return self._map[key]
        if required:
            raise ConfigError(f"missing required config key {key!r}")
        return default

    def get_int(self, key: str, default=None, required=False) -> Optional[int]:
        raw = self._raw(key, default=None, required=required)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: expected integer, got {raw!r}") from exc

    def get_float(self, key: str, default=None, required=False) -> Optional[float]:
        raw = self._raw(key, default=None, required=required)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: expected number, got {raw!r}") from exc

    def get_str(self, key: str, default=None, required=False,
                choices: Optional[Sequence[str]] = None) -> Optional[str]:
        raw = self._raw(key, default=None, required=required)
        if raw is None:
            return default
        if choices is not None and raw not in choices:
            raise ConfigError(f"key {key!r}: expected one of {list(choices)}, got {raw!r}")
        return raw

    def get_float_list(self, key: str, default=None, required=False) -> Optional[List[float]]:
        raw = self._raw(key, default=None, required=required)
        if raw is None:
            return default
        try:
            return [float(tok) for tok in raw.split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: expected comma-separated numbers, got {raw!r}") from exc

    def get_int_list(self, key: str, default=None, required=False) -> Optional[List[int]]:
        raw = self._raw(key, default=None, required=required)
        if raw is None:
            return default
        try:
            return [int(tok) for tok in raw.split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: expected comma-separated integers, got {raw!r}") from exc

    def finish(self):
        unknown = sorted(set(self._map) - self._used)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")


def format_value(v) -> str:
    """CSV cell formatting: 17 significant digits for floats, '.' decimal."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if v is None:
        return "none"
    return str(v)


def _csv_quote(cell: str) -> str:
    if any(ch in cell for ch in (",", '"', "\n", "\r")):
        return '"' + cell.replace('"', '""') + '"'
    return cell


def render_csv(columns: Sequence[str], rows: Sequence[Sequence], config_hash: str,
               schema_name: str) -> str:
    """CSV text with a comment header carrying config hash and schema tag."""
    buf = io.StringIO()
    buf.write(f"# config-hash: {config_hash}\n")
    buf.write(f"# schema: {schema_name}-v{SCHEMA_VERSION}\n")
    buf.write(",".join(_csv_quote(c) for c in columns) + "\n")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row width does not match columns")
        buf.write(",".join(_csv_quote(format_value(v)) for v in row) + "\n")
    return buf.getvalue()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch is not None else time.time()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


class RunWriter:
    """Collects output files for one run and emits them plus a manifest."""

    def __init__(self, out_dir, config: RunConfig, seed: int, version: str):
        self.out_dir = Path(out_dir)
        self.config = config
        self.seed = seed
        self.version = version
        self.started = _timestamp()
        self._files: Dict[str, bytes] = {}

    def add_csv(self, name: str, columns, rows, schema_name: str):
        text = render_csv(columns, rows, self.config.hash(), schema_name)
        self._files[name] = text.encode("utf-8")

    def add_json(self, name: str, payload):
        body = json.dumps(payload, sort_keys=True, indent=2) + "\n"
        self._files[name] = body.encode("utf-8")

    def finalize(self, manifest_name: str = "manifest.json") -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        checksums = {}
        for name, data in sorted(self._files.items()):
            (self.out_dir / name).write_bytes(data)
            checksums[name] = hashlib.sha256(data).hexdigest()
        manifest = {
            "config_hash": self.config.hash(),
            "config": {k: v for k, v in self.config.entries},
            "version": self.version,
            "seed": self.seed,
            "started": self.started,
            "finished": _timestamp(),
            "schema_version": SCHEMA_VERSION,
            "files": checksums,
        }
        body = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
        path = self.out_dir / manifest_name
        path.write_bytes(body.encode("utf-8"))
        return path
