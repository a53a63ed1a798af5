# passive_link/codec/commands/decode.py
from __future__ import annotations

from pathlib import Path
from typing import List, Tuple
import logging

from ..config import AppConfig
from ..dto import DecodeRequest, DecoderConfig, Schedule
from ..receiver import StreamReport, stream_decode
from ..schema import METRICS_FILE, PACKETS_FILE
from ..store import read_captured, read_model, write_json
from .base import CommandOutput, require_path

logger = logging.getLogger(__name__)


def decode_store(src: Path, decoder: DecoderConfig, schedule_path: Path | None = None) -> Tuple[StreamReport, List[str]]:
    """Lee un store capturado y corre el receptor; compartido con sync-demo."""
    schedule = read_model(Path(schedule_path), Schedule) if schedule_path is not None else None
    cap = read_captured(src, schedule)
    report = stream_decode(cap, decoder)
    warnings: List[str] = []
    if cap.schedule is None:
        warnings.append("Sin schedule.json: se reportan paquetes pero no PSR.")
    return report, warnings


class DecodeHandler:
    """Store capturado -> packets.json (+ metrics.json si hay ground truth)."""
    request_model = DecodeRequest

    def run(self, req: DecodeRequest, cfg: AppConfig) -> CommandOutput:
        src = require_path(req.input, "--input")
        out = Path(req.out) if req.out is not None else src
        out.mkdir(parents=True, exist_ok=True)

        report, warnings = decode_store(src, req.decoder, req.schedule)
        write_json(out / PACKETS_FILE, [r.model_dump(mode="json") for r in report.results])
        data = {
            "attempts": report.attempts,
            "decoded": len(report.results),
            "sync_losses": report.sync_losses,
            "stride": report.stride,
        }
        if report.metrics is not None:
            write_json(out / METRICS_FILE, report.metrics)
            data["psr"] = report.metrics.psr
            data["false_decodes"] = report.metrics.false_decodes
        return CommandOutput(data=data, out_dir=out, warnings=warnings)
