# passive_link/codec/dto.py
from __future__ import annotations

import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

# —— Literales y tipos ——
EcLiteral = Literal["L", "M", "Q", "H"]
ModeLiteral = Literal["pair", "trivial4", "step4"]
RoleLiteral = Literal["plus", "minus", "rest"]
DisplayLiteral = Literal["active", "smart-window", "modified-lcd"]
PixelFormatLiteral = Literal["rgb24", "gray8"]
SourceKindLiteral = Literal["uniform", "gradient", "texture", "store"]
CommandLiteral = Literal["encode", "simulate", "decode", "evaluate", "sync-demo"]
TileCount = Literal[1, 6]
BoxTuple = Tuple[int, int, int, int]  # (x0, y0, x1, y1), semiabierto

MODE_PERIOD: Dict[str, int] = {"pair": 2, "trivial4": 4, "step4": 4}

_PAYLOAD_RE = re.compile(r'\{"s":(0|[1-9][0-9]*),"f":(0|[1-9][0-9]*)\}')


# —— Parámetros de modulación ——

class PerceptionParams(BaseModel):
    """ΔE00 percibido y factor de condiciones de visualización k_L."""
    delta_e00: float = Field(default=2.0, gt=0)
    k_l: float = Field(default=1.0, gt=0)


class TextureParams(BaseModel):
    window: int = 5
    k: float = Field(default=0.5, ge=0.0, le=1.0)
    ng: int = Field(default=101, ge=2)

    @field_validator("window")
    @classmethod
    def _validate_window(cls, v: int) -> int:
        if v < 3 or v % 2 == 0:
            raise ValueError("window debe ser impar y >= 3.")
        return v


class TileLayout(BaseModel):
    """Réplicas del código QR sobre el frame: 1 centrado o 6 en grilla 2x3."""
    count: TileCount = 1
    module_px: int = Field(default=4, ge=1)
    quiet_zone: int = Field(default=4, ge=0)
    version: Optional[int] = Field(default=None, ge=1, le=40)  # None => la mínima que quepa

    @property
    def grid(self) -> Tuple[int, int]:
        return (1, 1) if self.count == 1 else (2, 3)


class ModulationParams(BaseModel):
    perception: PerceptionParams = Field(default_factory=PerceptionParams)
    texture: TextureParams = Field(default_factory=TextureParams)
    layout: TileLayout = Field(default_factory=TileLayout)
    ec: EcLiteral = "M"
    smoothing_sigma: float = Field(default=1.0, ge=0.0)
    mode: ModeLiteral = "pair"
    fps_tx: float = Field(default=60.0, gt=0)
    code_fps: Optional[float] = Field(default=None, gt=0)  # None => fps_tx / period

    @property
    def period(self) -> int:
        """Frames de display por código (ratio display:código)."""
        return MODE_PERIOD[self.mode]

    @property
    def code_rate(self) -> float:
        return self.code_fps if self.code_fps is not None else self.fps_tx / self.period


# —— Payload ——

class Payload(BaseModel):
    """Contenido transmitido: {"s":<song_id>,"f":<frame_num>} sin espacios."""
    model_config = ConfigDict(frozen=True)

    song_id: int = Field(ge=0)
    frame_num: int = Field(ge=0)

    def serialize(self) -> str:
        return f'{{"s":{self.song_id},"f":{self.frame_num}}}'

    @classmethod
    def parse(cls, text: str) -> Optional["Payload"]:
        """Parseo estricto; None si el texto no respeta el formato exacto."""
        m = _PAYLOAD_RE.fullmatch(text or "")
        if m is None:
            return None
        return cls(song_id=int(m.group(1)), frame_num=int(m.group(2)))


class PayloadPlan(BaseModel):
    """Payload i = (song_id, first_frame + i)."""
    song_id: int = Field(default=1, ge=0)
    first_frame: int = Field(default=0, ge=0)

    def payloads(self, n: int) -> List[Payload]:
        return [Payload(song_id=self.song_id, frame_num=self.first_frame + i) for i in range(n)]


# —— Canal ——

class JitterParams(BaseModel):
    translation_px_max: float = Field(default=0.0, ge=0.0)
    rotation_deg_max: float = Field(default=0.0, ge=0.0)
    scale_max: float = Field(default=0.0, ge=0.0, lt=1.0)

    @property
    def enabled(self) -> bool:
        return bool(self.translation_px_max or self.rotation_deg_max or self.scale_max)


class ChannelParams(BaseModel):
    """Canal display pasivo -> cámara. fps_rx=None => igual a fps_tx."""
    fps_rx: Optional[float] = Field(default=None, gt=0)
    gain: float = Field(default=1.0, gt=0.0, le=1.0)
    noise_sigma: float = Field(default=0.0, ge=0.0)
    drop_prob: float = Field(default=0.0, ge=0.0, lt=1.0)
    jitter: JitterParams = Field(default_factory=JitterParams)
    shutter_band: float = Field(default=0.0, ge=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0, le=2**64 - 1)

    # extras
    display: DisplayLiteral = "active"
    occlusion_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    occluder_lightness: float = Field(default=15.0, ge=0.0, le=100.0)
    forced_drops: List[int] = Field(default_factory=list)

    @field_validator("forced_drops")
    @classmethod
    def _normalize_drops(cls, v: List[int]) -> List[int]:
        if any(i < 0 for i in v):
            raise ValueError("forced_drops no admite índices negativos.")
        return sorted(set(v))


# —— Decoder ——

class DecoderConfig(BaseModel):
    roi_threshold: float = Field(default=1.0, gt=0.0)
    min_region_px: int = Field(default=64, ge=1)
    resync_failures: int = Field(default=5, ge=1)
    motion_comp: bool = False
    border_margin: int = Field(default=4, ge=0)
    denoise_ksize: int = Field(default=3, ge=0)
    roi_padding: int = Field(default=2, ge=0)
    max_candidates: int = Field(default=8, ge=1)
    min_inliers: int = Field(default=8, ge=3)
    sync_stride: Optional[int] = Field(default=None, ge=2)  # None => se deriva del schedule

    @field_validator("denoise_ksize")
    @classmethod
    def _validate_ksize(cls, v: int) -> int:
        if v not in (0, 3, 5):
            raise ValueError("denoise_ksize debe ser 0 (sin filtro), 3 o 5.")
        return v


# —— Ground truth y resultados ——

class ScheduleEntry(BaseModel):
    packet_index: int
    payload: Payload
    start_frame: int
    end_frame: int  # exclusivo


class Schedule(BaseModel):
    """Ground truth de una secuencia codificada (sidecar schedule.json)."""
    fps_tx: float
    mode: ModeLiteral
    period: int
    width: int
    height: int
    tile_boxes: List[BoxTuple] = Field(default_factory=list)
    packets: List[ScheduleEntry] = Field(default_factory=list)


class PacketResult(BaseModel):
    payload: Payload
    capture_ts_ms: float
    latency_ms: float
    prev_slot: int
    curr_slot: int
    pair_index: int


class LinkMetrics(BaseModel):
    psr: float = Field(ge=0.0, le=1.0)
    transmitted: int
    successes: int
    attempts: int = 0
    decodes: int = 0
    false_decodes: int = 0
    response_time_ms: List[float] = Field(default_factory=list)
    latency_ms: List[float] = Field(default_factory=list)


# —— FrameStore ——

class StoreManifest(BaseModel):
    fps: float = Field(gt=0)
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    count: int = Field(ge=0)
    pixel_format: PixelFormatLiteral = "rgb24"


class CaptureSidecar(BaseModel):
    """Slots de captura (capture.json): timestamps, origen y slots descartados."""
    fps_rx: float = Field(gt=0)
    timestamps_ms: List[float]
    source_index: List[int]
    frame_slots: List[int]  # slot de cada archivo del store, en orden
    dropped_slots: List[int] = Field(default_factory=list)
    channel: ChannelParams = Field(default_factory=ChannelParams)


# —— Sync app ——

class TrackInfo(BaseModel):
    title: str
    duration_ms: float = Field(gt=0)
    fps_tx: float = Field(gt=0)


class TrackRegistry(BaseModel):
    tracks: Dict[int, TrackInfo] = Field(default_factory=dict)

    @field_validator("tracks")
    @classmethod
    def _validate_ids(cls, v: Dict[int, TrackInfo]) -> Dict[int, TrackInfo]:
        if any(k < 0 for k in v):
            raise ValueError("song_id debe ser no negativo.")
        return v


class PlaybackPosition(BaseModel):
    song_id: int
    title: str
    t_abs_ms: float
    elapsed_ms: float
    position_ms: float


# —— Fuentes y experimentos ——

class SourceSpec(BaseModel):
    """Frames fuente: sintéticos o leídos de un FrameStore."""
    kind: SourceKindLiteral = "uniform"
    width: int = Field(default=128, ge=1)
    height: int = Field(default=128, ge=1)
    gray: int = Field(default=48, ge=0, le=255)
    amplitude: float = Field(default=30.0, ge=0.0)
    texture_sigma: float = Field(default=3.0, gt=0.0)
    seed: int = Field(default=0, ge=0)
    path: Optional[Path] = None


class SweepSpec(BaseModel):
    start: float
    stop: float
    step: float = Field(gt=0)

    def values(self) -> List[float]:
        n = int(round((self.stop - self.start) / self.step))
        return [round(self.start + i * self.step, 6) for i in range(n + 1)]


class GridSpec(BaseModel):
    delta_e00: Union[List[float], SweepSpec] = Field(default_factory=lambda: [2.0])
    tiles: List[TileCount] = Field(default_factory=lambda: [1])
    ec_levels: List[EcLiteral] = Field(default_factory=lambda: ["M"])
    modes: List[ModeLiteral] = Field(default_factory=lambda: ["pair"])
    gaussian: List[bool] = Field(default_factory=lambda: [True])
    motion_comp: List[bool] = Field(default_factory=lambda: [False])
    channel_presets: List[str] = Field(default_factory=lambda: ["ideal"])

    @field_validator("tiles", "ec_levels", "modes", "gaussian", "motion_comp", "channel_presets")
    @classmethod
    def _non_empty(cls, v: List[Any]) -> List[Any]:
        if not v:
            raise ValueError("Cada eje de la grilla debe tener al menos un valor.")
        return v

    def delta_values(self) -> List[float]:
        if isinstance(self.delta_e00, SweepSpec):
            return self.delta_e00.values()
        return list(self.delta_e00)


class ExperimentSpec(BaseModel):
    """Contrato de entrada de evaluate: grilla de condiciones x trials."""
    name: str = "experiment"
    source: SourceSpec = Field(default_factory=SourceSpec)
    payload: PayloadPlan = Field(default_factory=PayloadPlan)
    modulation: ModulationParams = Field(default_factory=ModulationParams)
    grid: GridSpec = Field(default_factory=GridSpec)
    presets: Dict[str, ChannelParams] = Field(default_factory=dict)
    decoder: DecoderConfig = Field(default_factory=DecoderConfig)
    trials: int = Field(default=1, ge=1)
    packets: int = Field(default=50, ge=1)
    seed: int = Field(default=0, ge=0)
    workers: Optional[int] = Field(default=None, ge=1)
    out_dir: Optional[Path] = None


# —— Requests por comando ——

class EncodeRequest(BaseModel):
    input: Optional[Path] = None
    source: SourceSpec = Field(default_factory=SourceSpec)
    packets: Optional[int] = Field(default=None, ge=1)  # None => uno por frame fuente
    modulation: ModulationParams = Field(default_factory=ModulationParams)
    payload: PayloadPlan = Field(default_factory=PayloadPlan)
    out: Optional[Path] = None


class SimulateRequest(BaseModel):
    input: Optional[Path] = None
    preset: Optional[str] = "ideal"
    channel: Optional[ChannelParams] = None  # tiene prioridad sobre preset
    seed: Optional[int] = Field(default=None, ge=0)
    out: Optional[Path] = None


class DecodeRequest(BaseModel):
    input: Optional[Path] = None
    schedule: Optional[Path] = None
    decoder: DecoderConfig = Field(default_factory=DecoderConfig)
    out: Optional[Path] = None


class SyncDemoRequest(BaseModel):
    input: Optional[Path] = None
    tracks: Optional[Path] = None
    decoder: DecoderConfig = Field(default_factory=DecoderConfig)
    out: Optional[Path] = None


# —— Salida de comandos ——

class MetaInfo(BaseModel):
    generated_at: str
    seed: Optional[int] = None
    elapsed_ms: float = 0.0


class CommandResult(BaseModel):
    """Contrato de salida: estable y serializable."""
    ok: bool
    command: CommandLiteral
    out_dir: Optional[str] = None
    warnings: List[str] = Field(default_factory=list)
    meta: MetaInfo
    data: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[str] = None

    @staticmethod
    def failed(command: CommandLiteral, meta: MetaInfo, error: str, detail: Optional[str] = None) -> "CommandResult":
        data = {"detail": detail} if detail else {}
        return CommandResult(ok=False, command=command, meta=meta, data=data, error=error)
