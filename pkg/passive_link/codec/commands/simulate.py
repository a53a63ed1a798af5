# passive_link/codec/commands/simulate.py
from __future__ import annotations

import logging

from ..channel import CHANNEL_PRESETS, capture
from ..config import AppConfig
from ..dto import SimulateRequest
from ..store import read_encoded, write_captured
from ..validators import resolve_channel
from .base import CommandOutput, require_path

logger = logging.getLogger(__name__)


class SimulateHandler:
    """Store codificado -> canal display→cámara -> store capturado + capture.json."""
    request_model = SimulateRequest

    def run(self, req: SimulateRequest, cfg: AppConfig) -> CommandOutput:
        src = require_path(req.input, "--input")
        out = require_path(req.out, "--out")
        enc = read_encoded(src)

        # channel explícito > preset; --seed pisa a ambos
        if req.channel is not None:
            cp, seed = req.channel, req.channel.seed
        else:
            cp, seed = resolve_channel(req.preset or "ideal", CHANNEL_PRESETS), cfg.seed
        if req.seed is not None:
            seed = req.seed
        cp = cp.model_copy(update={"seed": seed})

        cap = capture(enc, cp)
        store = write_captured(out, cap)
        logger.info("Captura simulada: %s slots, %s descartados", len(cap.timestamps_ms), len(cap.dropped_slots))
        return CommandOutput(
            data={
                "fps_rx": cap.fps_rx,
                "slots": len(cap.timestamps_ms),
                "delivered": store.manifest.count,
                "dropped_slots": cap.dropped_slots,
                "preset": None if req.channel is not None else (req.preset or "ideal"),
            },
            out_dir=out,
            seed=seed,
        )
