# passive_link/codec/playback.py
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List
import logging

from pydantic import ValidationError

from .dto import PacketResult, PlaybackPosition, TrackInfo, TrackRegistry
from .exceptions import InvalidParam, PositionOutOfRange, SchemaMismatch, UnknownTrack

logger = logging.getLogger(__name__)


def frame_to_abs_time(f_num: int, fps_tx: float) -> float:
    """t_abs = (2·f_num / FPS_TX)·1000 ms: cada código ocupa dos frames complementarios."""
    if fps_tx <= 0:
        raise InvalidParam("fps_tx debe ser > 0.")
    return (2000.0 * f_num) / fps_tx


def _normalize_tracks(raw: Any) -> Dict[str, Any]:
    """Acepta {"tracks": {id: {...}}} o {"tracks": [{"id": ..., ...}]}."""
    tracks = raw.get("tracks") if isinstance(raw, dict) else None
    if isinstance(tracks, list):
        out: Dict[int, Any] = {}
        for item in tracks:
            if not isinstance(item, dict) or "id" not in item:
                raise SchemaMismatch("Cada pista debe incluir 'id'.")
            tid = int(item["id"])
            if tid in out:
                raise SchemaMismatch(f"song_id duplicado en el registro: {tid}")
            out[tid] = {k: v for k, v in item.items() if k != "id"}
        return {"tracks": out}
    if isinstance(tracks, dict):
        return {"tracks": tracks}
    raise SchemaMismatch("El registro debe tener una clave 'tracks' (lista u objeto).")


def load_registry(path: Path) -> TrackRegistry:
    if not path.exists():
        raise InvalidParam(f"Registro de pistas no encontrado: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        reg = TrackRegistry.model_validate(_normalize_tracks(raw))
    except (json.JSONDecodeError, ValidationError) as exc:
        raise SchemaMismatch(f"Registro de pistas inválido ({path}): {exc}") from exc
    logger.info("Registro cargado: %s pistas desde %s", len(reg.tracks), path)
    return reg


def lookup_track(reg: TrackRegistry, song_id: int) -> TrackInfo:
    try:
        return reg.tracks[song_id]
    except KeyError:
        raise UnknownTrack(f"song_id={song_id} no está registrado.") from None


def playback_position(r: PacketResult, reg: TrackRegistry, now_ms: float) -> PlaybackPosition:
    """posición = t_abs + (now − timestamp de captura del par decodificado)."""
    track = lookup_track(reg, r.payload.song_id)
    t_abs = frame_to_abs_time(r.payload.frame_num, track.fps_tx)
    elapsed = now_ms - r.capture_ts_ms
    position = t_abs + elapsed
    if position > track.duration_ms:
        raise PositionOutOfRange(
            f"Posición {position:.1f} ms excede la duración de '{track.title}' ({track.duration_ms:.1f} ms)."
        )
    return PlaybackPosition(
        song_id=r.payload.song_id, title=track.title, t_abs_ms=t_abs, elapsed_ms=elapsed, position_ms=position
    )


def positions_for(results: List[PacketResult], reg: TrackRegistry) -> List[Dict[str, Any]]:
    """Posición por paquete, con el reloj del receptor en captura + latencia de decodificación."""
    out: List[Dict[str, Any]] = []
    for r in results:
        now = r.capture_ts_ms + r.latency_ms
        try:
            out.append({"ok": True, **playback_position(r, reg, now).model_dump()})
        except (UnknownTrack, PositionOutOfRange) as exc:
            out.append({"ok": False, "song_id": r.payload.song_id, "error": str(exc)})
    return out
