# passive_link/codec/frames.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .dto import BoxTuple, ChannelParams, RoleLiteral, Schedule
from .exceptions import DimensionMismatch, InvalidFrame

DROPPED: int = -1  # marcador de slot descartado en CapturedSequence


@dataclass(frozen=True)
class RgbFrame:
    """Frame sRGB de 8 bits, fila mayor, forma (alto, ancho, 3)."""
    data: np.ndarray

    def __post_init__(self) -> None:
        d = self.data
        if d.ndim != 3 or d.shape[2] != 3 or d.shape[0] < 1 or d.shape[1] < 1:
            raise InvalidFrame(f"RgbFrame requiere forma (H, W, 3); recibido {d.shape}")
        if d.dtype != np.uint8:
            raise InvalidFrame(f"RgbFrame requiere uint8; recibido {d.dtype}")

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @staticmethod
    def gray(value: int, width: int, height: int) -> "RgbFrame":
        return RgbFrame(np.full((height, width, 3), value, dtype=np.uint8))


@dataclass(frozen=True)
class LabFrame:
    """Frame CIELAB en float64: L en [0, 100]; a, b sin acotar."""
    L: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        if self.L.ndim != 2 or self.L.shape[0] < 1 or self.L.shape[1] < 1:
            raise InvalidFrame(f"LabFrame requiere canales 2-D; recibido {self.L.shape}")
        if self.a.shape != self.L.shape or self.b.shape != self.L.shape:
            raise DimensionMismatch("Los canales L, a, b deben tener la misma forma.")

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.L.shape[0]), int(self.L.shape[1]))

    @property
    def height(self) -> int:
        return self.shape[0]

    @property
    def width(self) -> int:
        return self.shape[1]

    def with_lightness(self, L: np.ndarray) -> "LabFrame":
        """Copia con L reemplazado; a y b se comparten (no se modifican nunca)."""
        return LabFrame(L=L, a=self.a, b=self.b)

    def stack(self) -> np.ndarray:
        return np.stack([self.L, self.a, self.b], axis=-1)

    @staticmethod
    def from_stack(arr: np.ndarray) -> "LabFrame":
        return LabFrame(L=arr[..., 0], a=arr[..., 1], b=arr[..., 2])


@dataclass(frozen=True)
class BitPlane:
    """Plano ternario s ∈ {+1, -1, 0} con las cajas de cada tile."""
    s: np.ndarray
    tile_boxes: List[BoxTuple] = field(default_factory=list)

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.s.shape[0]), int(self.s.shape[1]))


@dataclass(frozen=True)
class EncodedSequence:
    frames: List[LabFrame]
    roles: List[RoleLiteral]
    schedule: Schedule

    @property
    def fps_tx(self) -> float:
        return self.schedule.fps_tx

    @property
    def period(self) -> int:
        return self.schedule.period

    @property
    def tile_boxes(self) -> List[BoxTuple]:
        return self.schedule.tile_boxes


@dataclass(frozen=True)
class CapturedSequence:
    """Slots capturados a fps_rx; frames[k] es None si el slot se descartó."""
    frames: List[Optional[LabFrame]]
    timestamps_ms: List[float]
    source_index: List[int]  # índice del frame mostrado o DROPPED
    fps_rx: float
    params: ChannelParams
    schedule: Optional[Schedule] = None

    def delivered(self) -> List[Tuple[int, LabFrame]]:
        """(slot, frame) de los frames que sí llegaron, en orden temporal."""
        return [(k, f) for k, f in enumerate(self.frames) if f is not None]

    @property
    def dropped_slots(self) -> List[int]:
        return [k for k, f in enumerate(self.frames) if f is None]
