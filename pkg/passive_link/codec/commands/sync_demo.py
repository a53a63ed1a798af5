# passive_link/codec/commands/sync_demo.py
from __future__ import annotations

from pathlib import Path
import logging

from ..config import AppConfig
from ..dto import SyncDemoRequest
from ..playback import load_registry, positions_for
from ..schema import POSITIONS_FILE
from ..store import write_json
from .base import CommandOutput, require_path
from .decode import decode_store

logger = logging.getLogger(__name__)


class SyncDemoHandler:
    """Decodifica y traduce cada paquete a posición de reproducción en la pista."""
    request_model = SyncDemoRequest

    def run(self, req: SyncDemoRequest, cfg: AppConfig) -> CommandOutput:
        src = require_path(req.input, "--input")
        out = Path(req.out) if req.out is not None else src
        out.mkdir(parents=True, exist_ok=True)
        registry = load_registry(Path(req.tracks) if req.tracks is not None else cfg.tracks_path)

        report, _ = decode_store(src, req.decoder)
        positions = positions_for(report.results, registry)
        write_json(out / POSITIONS_FILE, positions)

        resolved = [p for p in positions if p["ok"]]
        warnings = [p["error"] for p in positions if not p["ok"]]
        return CommandOutput(
            data={
                "decoded": len(report.results),
                "resolved": len(resolved),
                "last": resolved[-1] if resolved else None,
            },
            out_dir=out,
            warnings=warnings,
        )
