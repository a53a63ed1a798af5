# passive_link/codec/validators.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

from .dto import ChannelParams, DecoderConfig, ExperimentSpec, ModulationParams, Schedule
from .exceptions import FpsViolation, InvalidParam


def validate_modulation(mp: ModulationParams) -> None:
    """Reglas que cruzan campos de ModulationParams."""
    if mp.code_fps is not None and abs(mp.fps_tx / mp.code_fps - mp.period) > 1e-9:
        raise InvalidParam(
            f"mode='{mp.mode}' requiere ratio display:código {mp.period}; recibido {mp.fps_tx}:{mp.code_fps}."
        )


def validate_fps(fps_tx: float, cp: ChannelParams) -> float:
    """Resuelve fps_rx (None => igual a fps_tx) y exige fps_rx >= fps_tx."""
    fps_rx = cp.fps_rx if cp.fps_rx is not None else fps_tx
    if fps_rx < fps_tx:
        raise FpsViolation(f"fps_rx={fps_rx} < fps_tx={fps_tx}: la cámara no alcanza al display.")
    return fps_rx


@dataclass(frozen=True)
class StrideResolution:
    value: int
    reason: str  # "explicit" | "schedule" | "default"


def resolve_sync_stride(cfg: DecoderConfig, schedule: Optional[Schedule], fps_rx: Optional[float]) -> StrideResolution:
    """Periodo del código medido en frames capturados.

    - explícito en DecoderConfig => se respeta
    - con schedule y fps_rx => round(period · fps_rx / fps_tx), mínimo 2
    - sin información => 2 (par complementario a fps igual)
    """
    if cfg.sync_stride is not None:
        return StrideResolution(cfg.sync_stride, "explicit")
    if schedule is not None and fps_rx:
        stride = int(round(schedule.period * fps_rx / schedule.fps_tx))
        return StrideResolution(max(2, stride), "schedule")
    return StrideResolution(2, "default")


def resolve_channel(name: str, presets: Dict[str, ChannelParams]) -> ChannelParams:
    if name not in presets:
        raise InvalidParam(f"Preset de canal desconocido: '{name}'. Disponibles: {sorted(presets)}")
    return presets[name]


def validate_experiment(spec: ExperimentSpec, presets: Dict[str, ChannelParams]) -> None:
    """Valida aspectos semánticos de la grilla."""
    if not spec.grid.delta_values():
        raise InvalidParam("La grilla de ΔE00 está vacía.")
    if any(v <= 0 for v in spec.grid.delta_values()):
        raise InvalidParam("Todos los ΔE00 deben ser > 0.")
    for name in spec.grid.channel_presets:
        resolve_channel(name, presets)
    validate_modulation(spec.modulation)
