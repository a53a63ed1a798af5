# passive_link/codec/commands/encode.py
from __future__ import annotations

import logging

from ..cache import CacheConfig, LRUCache
from ..config import AppConfig
from ..dto import EncodeRequest
from ..encoder import encode_video
from ..store import FrameStore, write_encoded
from ..synth import load_source
from .base import CommandOutput, require_path

logger = logging.getLogger(__name__)


class EncodeHandler:
    """Frames fuente (store o sintéticos) -> store codificado + schedule.json."""
    request_model = EncodeRequest

    def run(self, req: EncodeRequest, cfg: AppConfig) -> CommandOutput:
        out = require_path(req.out, "--out")
        rgb = FrameStore.open(req.input).read_all_rgb() if req.input is not None else load_source(req.source)
        n = req.packets or len(rgb)
        frames = [rgb[i % len(rgb)] for i in range(n)]

        cache = LRUCache(CacheConfig(max_items=cfg.cache_items))
        enc = encode_video(frames, req.payload.payloads(n), req.modulation, cache=cache)
        store = write_encoded(out, enc)

        warnings = []
        if req.packets is not None and req.packets > len(rgb):
            warnings.append(f"Solo hay {len(rgb)} frames fuente; se reutilizan en ciclo para {n} paquetes.")
        return CommandOutput(
            data={
                "packets": len(enc.schedule.packets),
                "frames": store.manifest.count,
                "fps_tx": enc.fps_tx,
                "mode": enc.schedule.mode,
                "pixel_format": store.manifest.pixel_format,
                "tile_boxes": [list(b) for b in enc.tile_boxes],
                "cache_hits": cache.hits,
            },
            out_dir=out,
            warnings=warnings,
        )
