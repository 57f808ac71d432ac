"""
Run Manifests
=============

Every CLI run leaves a manifest.json beside its outputs: the resolved model
config, the tool version, local wall-clock timestamps, the output files with
their byte lengths and, for scenario runs, the tracking policy.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from dateutil import parser as date_parser
from dateutil import tz

from constants import TOOL_VERSION
from models.types import ModelConfig
from storage.files import atomic_write

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def now_local() -> str:
    return datetime.now(tz.tzlocal()).isoformat()


def config_to_dict(config: ModelConfig) -> Dict[str, Any]:
    data = asdict(config)
    if data["s_ratios"] is not None:
        data["s_ratios"] = list(data["s_ratios"])
    return data


@dataclass
class RunManifest:
    command: str
    config: Optional[Dict[str, Any]] = None
    tool_version: str = TOOL_VERSION
    started_at: str = field(default_factory=now_local)
    finished_at: Optional[str] = None
    outputs: List[Dict[str, Any]] = field(default_factory=list)
    policy: Optional[Dict[str, Any]] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def add_output(self, path) -> None:
        path = Path(path)
        self.outputs.append({"path": path.name, "bytes": path.stat().st_size})

    @property
    def duration_seconds(self) -> Optional[float]:
        if not self.finished_at:
            return None
        return (date_parser.isoparse(self.finished_at) - date_parser.isoparse(self.started_at)).total_seconds()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def write_manifest(manifest: RunManifest, directory) -> Path:
    """Stamp the finish time and write manifest.json into directory."""
    manifest.finished_at = now_local()
    path = Path(directory) / MANIFEST_NAME
    with atomic_write(path, "w", encoding="utf-8") as handle:
        json.dump(manifest.to_dict(), handle, indent=2, ensure_ascii=False)
    logger.info(f"📦 manifest written: {path} ({len(manifest.outputs)} outputs)")
    return path


def load_manifest(path) -> RunManifest:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    return RunManifest(**data)


def verify_manifest(path) -> List[str]:
    """Problems found with the outputs a manifest lists; empty when all match."""
    path = Path(path)
    manifest = load_manifest(path)
    problems = []
    for entry in manifest.outputs:
        target = path.parent / entry["path"]
        if not target.exists():
            problems.append(f"missing output {entry['path']}")
        elif target.stat().st_size != entry["bytes"]:
            problems.append(f"{entry['path']}: {target.stat().st_size} bytes, manifest records {entry['bytes']}")
    return problems
