# passive_link/codec/store.py
from __future__ import annotations

from dataclasses import dataclass
import json
from pathlib import Path
from typing import Any, List, Optional, Sequence, Type, TypeVar
import logging

import cv2
import numpy as np
from pydantic import BaseModel, ValidationError

from .colorspace import lab_to_srgb, srgb_to_lab
from .dto import CaptureSidecar, ChannelParams, PixelFormatLiteral, Schedule, StoreManifest
from .encoder import ROLE_PATTERNS
from .exceptions import SchemaMismatch, StoreError
from .frames import CapturedSequence, EncodedSequence, LabFrame, RgbFrame
from .schema import CAPTURE_FILE, FRAME_PATTERN, MANIFEST_FILE, PIXEL_FORMAT_EXT, SCHEDULE_FILE

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


# ------------------------------ JSON estable ----------------------------------

def write_json(path: Path, obj: Any) -> None:
    """JSON determinista (claves ordenadas, indentado, salto final)."""
    if isinstance(obj, BaseModel):
        obj = obj.model_dump(mode="json")
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def read_model(path: Path, model: Type[M]) -> M:
    try:
        return model.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise SchemaMismatch(f"{path.name} no cumple el esquema {model.__name__}: {exc}") from exc


# ------------------------------ FrameStore ------------------------------------

@dataclass(frozen=True)
class FrameStore:
    """Directorio de frames numerados (PPM/PGM de 8 bits) + manifest.json."""
    root: Path
    manifest: StoreManifest

    @property
    def ext(self) -> str:
        return PIXEL_FORMAT_EXT[self.manifest.pixel_format]

    def frame_path(self, index: int) -> Path:
        return self.root / FRAME_PATTERN.format(index=index, ext=self.ext)

    def __len__(self) -> int:
        return self.manifest.count

    # —— lectura ——

    @staticmethod
    def open(root: Path) -> "FrameStore":
        root = Path(root)
        mpath = root / MANIFEST_FILE
        if not mpath.exists():
            raise StoreError(f"Store sin {MANIFEST_FILE}: {root}")
        store = FrameStore(root=root, manifest=read_model(mpath, StoreManifest))
        files = sorted(root.glob(f"frame_*.{store.ext}"))
        expected = [store.frame_path(i) for i in range(store.manifest.count)]
        if files != expected:
            raise StoreError(
                f"El manifest declara {store.manifest.count} frames pero hay {len(files)} archivos .{store.ext} en {root}"
            )
        if store.manifest.count == 0:
            raise StoreError(f"Store vacío: {root}")
        logger.info("Store abierto: %s (%s frames, %s)", root, store.manifest.count, store.manifest.pixel_format)
        return store

    def read_rgb(self, index: int) -> RgbFrame:
        path = self.frame_path(index)
        img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
        if img is None:
            raise StoreError(f"No se pudo leer {path}")
        if img.ndim == 2:
            img = np.repeat(img[:, :, None], 3, axis=2)
        else:
            img = cv2.cvtColor(img, cv2.COLOR_BGR2RGB)
        if img.dtype != np.uint8:
            raise StoreError(f"{path.name}: se esperaban 8 bits por canal.")
        if img.shape[:2] != (self.manifest.height, self.manifest.width):
            raise StoreError(
                f"{path.name} mide {img.shape[1]}x{img.shape[0]}; el manifest dice "
                f"{self.manifest.width}x{self.manifest.height}"
            )
        return RgbFrame(np.ascontiguousarray(img))

    def read_all_rgb(self) -> List[RgbFrame]:
        return [self.read_rgb(i) for i in range(self.manifest.count)]

    def read_all_lab(self) -> List[LabFrame]:
        return [srgb_to_lab(f) for f in self.read_all_rgb()]

    # —— escritura ——

    @staticmethod
    def write(
        root: Path, frames: Sequence[RgbFrame], fps: float, pixel_format: PixelFormatLiteral = "rgb24"
    ) -> "FrameStore":
        if not frames:
            raise StoreError("No hay frames para escribir.")
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        for old in list(root.glob("frame_*.ppm")) + list(root.glob("frame_*.pgm")):
            old.unlink()

        h, w = frames[0].height, frames[0].width
        store = FrameStore(
            root=root,
            manifest=StoreManifest(fps=fps, width=w, height=h, count=len(frames), pixel_format=pixel_format),
        )
        for i, f in enumerate(frames):
            if (f.height, f.width) != (h, w):
                raise StoreError(f"Frame {i} mide {f.width}x{f.height}; se esperaba {w}x{h}.")
            if pixel_format == "gray8":
                d = f.data
                if not (np.array_equal(d[..., 0], d[..., 1]) and np.array_equal(d[..., 0], d[..., 2])):
                    raise StoreError(f"Frame {i} no es gris; use pixel_format='rgb24'.")
                img = d[..., 0]
            else:
                img = cv2.cvtColor(f.data, cv2.COLOR_RGB2BGR)
            if not cv2.imwrite(str(store.frame_path(i)), img):
                raise StoreError(f"No se pudo escribir {store.frame_path(i)}")
        write_json(root / MANIFEST_FILE, store.manifest)
        logger.info("Store escrito: %s (%s frames a %.1f fps)", root, len(frames), fps)
        return store


def is_gray(frames: Sequence[RgbFrame]) -> bool:
    return all(
        np.array_equal(f.data[..., 0], f.data[..., 1]) and np.array_equal(f.data[..., 0], f.data[..., 2])
        for f in frames
    )


# ------------------------------ Secuencias ------------------------------------

def write_encoded(root: Path, enc: EncodedSequence) -> FrameStore:
    """Frames codificados + schedule.json (ground truth)."""
    rgb = [lab_to_srgb(f) for f in enc.frames]
    store = FrameStore.write(root, rgb, fps=enc.fps_tx, pixel_format="gray8" if is_gray(rgb) else "rgb24")
    write_json(Path(root) / SCHEDULE_FILE, enc.schedule)
    return store


def read_schedule(root: Path) -> Optional[Schedule]:
    path = Path(root) / SCHEDULE_FILE
    return read_model(path, Schedule) if path.exists() else None


def read_encoded(root: Path) -> EncodedSequence:
    """Reconstruye la secuencia mostrada desde un store codificado."""
    store = FrameStore.open(root)
    schedule = read_schedule(root)
    if schedule is None:
        raise StoreError(f"Falta {SCHEDULE_FILE} en {root}; ¿es un store codificado?")
    frames = store.read_all_lab()
    pattern = ROLE_PATTERNS[schedule.mode]
    roles = [pattern[i % len(pattern)] for i in range(len(frames))]
    return EncodedSequence(frames=frames, roles=roles, schedule=schedule)


def write_captured(root: Path, cap: CapturedSequence) -> FrameStore:
    delivered = cap.delivered()
    if not delivered:
        raise StoreError("Todos los frames fueron descartados; no hay nada que escribir.")
    rgb = [lab_to_srgb(f) for _, f in delivered]
    store = FrameStore.write(root, rgb, fps=cap.fps_rx, pixel_format="gray8" if is_gray(rgb) else "rgb24")
    sidecar = CaptureSidecar(
        fps_rx=cap.fps_rx,
        timestamps_ms=cap.timestamps_ms,
        source_index=cap.source_index,
        frame_slots=[k for k, _ in delivered],
        dropped_slots=cap.dropped_slots,
        channel=cap.params,
    )
    write_json(Path(root) / CAPTURE_FILE, sidecar)
    if cap.schedule is not None:
        write_json(Path(root) / SCHEDULE_FILE, cap.schedule)
    return store


def read_captured(root: Path, schedule: Optional[Schedule] = None) -> CapturedSequence:
    """Store capturado -> CapturedSequence; sin capture.json se asume cero drops."""
    store = FrameStore.open(root)
    labs = store.read_all_lab()
    side_path = Path(root) / CAPTURE_FILE
    if side_path.exists():
        side = read_model(side_path, CaptureSidecar)
        if len(side.frame_slots) != len(labs):
            raise StoreError(f"{CAPTURE_FILE} lista {len(side.frame_slots)} frames; el store tiene {len(labs)}.")
        frames: List[Optional[LabFrame]] = [None] * len(side.timestamps_ms)
        for slot, lab in zip(side.frame_slots, labs):
            frames[slot] = lab
        timestamps, source, fps_rx, params = side.timestamps_ms, side.source_index, side.fps_rx, side.channel
    else:
        logger.warning("Sin %s en %s; se asumen timestamps uniformes y cero drops.", CAPTURE_FILE, root)
        fps_rx = store.manifest.fps
        frames = list(labs)
        timestamps = [k * 1000.0 / fps_rx for k in range(len(labs))]
        source = list(range(len(labs)))
        params = ChannelParams(fps_rx=fps_rx)
    return CapturedSequence(
        frames=frames,
        timestamps_ms=timestamps,
        source_index=source,
        fps_rx=fps_rx,
        params=params,
        schedule=schedule or read_schedule(root),
    )
