# passive_link/codec/channel.py
from __future__ import annotations

from dataclasses import dataclass
from math import floor
from typing import Dict, List, Optional, Sequence
import logging

import cv2
import numpy as np

from .dto import BoxTuple, ChannelParams, JitterParams
from .frames import DROPPED, CapturedSequence, EncodedSequence, LabFrame
from .validators import validate_fps

logger = logging.getLogger(__name__)

# Factor de luz ambiente que deja pasar cada tipo de pantalla
DISPLAY_GAIN: Dict[str, float] = {"active": 1.0, "smart-window": 0.8, "modified-lcd": 0.45}

_HANDHELD = JitterParams(translation_px_max=3.0, rotation_deg_max=0.5, scale_max=0.005)

# Análogos de las combinaciones (ISO, obturación); los valores son decisiones del harness
CHANNEL_PRESETS: Dict[str, ChannelParams] = {
    "ideal": ChannelParams(),
    "iso50-s90": ChannelParams(gain=0.9, noise_sigma=0.5, shutter_band=0.04),
    "iso100-s250": ChannelParams(gain=0.8, noise_sigma=0.8, shutter_band=0.02),
    "iso200-s500": ChannelParams(gain=0.7, noise_sigma=1.2, shutter_band=0.01),
    "iso400-s1000": ChannelParams(gain=0.6, noise_sigma=1.8),
    "tripod": ChannelParams(gain=0.9, noise_sigma=0.4),
    "handheld": ChannelParams(gain=0.9, noise_sigma=0.4, jitter=_HANDHELD),
    "occluded": ChannelParams(gain=0.9, noise_sigma=0.4, occlusion_prob=0.3),
}


# ------------------------------ Remuestreo ------------------------------------

def resample_schedule(n_tx: int, fps_tx: float, fps_rx: float) -> np.ndarray:
    """Sample-and-hold: índice del frame mostrado visto por cada slot de captura."""
    n_rx = int(floor(n_tx * fps_rx / fps_tx + 1e-9))
    k = np.arange(n_rx, dtype=np.float64)
    idx = np.floor(k * fps_tx / fps_rx + 1e-9).astype(np.int64)
    return np.minimum(idx, n_tx - 1)


# ------------------------------ Efectos ---------------------------------------

def apply_rolling_shutter(curr: LabFrame, prev: LabFrame, rho: float) -> LabFrame:
    """Las primeras ⌊ρ·alto⌋ filas vienen del frame mostrado anterior."""
    rows = int(floor(rho * curr.height))
    if rows <= 0:
        return curr
    out = curr.stack().copy()
    out[:rows] = prev.stack()[:rows]
    return LabFrame.from_stack(out)


@dataclass(frozen=True)
class SimilarityTransform:
    tx: float = 0.0
    ty: float = 0.0
    angle_deg: float = 0.0
    scale: float = 1.0

    @property
    def is_identity(self) -> bool:
        return self.tx == 0.0 and self.ty == 0.0 and self.angle_deg == 0.0 and self.scale == 1.0

    def matrix(self, width: int, height: int) -> np.ndarray:
        """Matriz 2x3 alrededor del centro del frame."""
        center = ((width - 1) / 2.0, (height - 1) / 2.0)
        m = cv2.getRotationMatrix2D(center, self.angle_deg, self.scale)
        m[0, 2] += self.tx
        m[1, 2] += self.ty
        return m


def sample_transform(rng: np.random.Generator, jitter: JitterParams) -> SimilarityTransform:
    # Siempre 4 sorteos: el stream no depende de qué cotas son cero
    u = rng.uniform(-1.0, 1.0, size=4)
    if not jitter.enabled:
        return SimilarityTransform()
    return SimilarityTransform(
        tx=float(u[0] * jitter.translation_px_max),
        ty=float(u[1] * jitter.translation_px_max),
        angle_deg=float(u[2] * jitter.rotation_deg_max),
        scale=float(1.0 + u[3] * jitter.scale_max),
    )


def apply_motion_jitter(frame: LabFrame, t: SimilarityTransform) -> LabFrame:
    """Similaridad con interpolación bilineal; fuera del frame se replica el borde."""
    if t.is_identity:
        return frame
    warped = cv2.warpAffine(
        np.ascontiguousarray(frame.stack()),
        t.matrix(frame.width, frame.height),
        (frame.width, frame.height),
        flags=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_REPLICATE,
    )
    return LabFrame.from_stack(warped)


def occlusion_mask(
    rng: np.random.Generator, boxes: Sequence[BoxTuple], prob: float, shape: tuple
) -> Optional[np.ndarray]:
    """Con probabilidad `prob` por tile, tapa una mitad (izq/der/arriba/abajo)."""
    mask = np.zeros(shape, dtype=bool)
    for x0, y0, x1, y1 in boxes:
        hit = rng.random() < prob
        side = int(rng.integers(4))
        if not hit:
            continue
        xm, ym = (x0 + x1) // 2, (y0 + y1) // 2
        if side == 0:
            mask[y0:y1, x0:xm] = True
        elif side == 1:
            mask[y0:y1, xm:x1] = True
        elif side == 2:
            mask[y0:ym, x0:x1] = True
        else:
            mask[ym:y1, x0:x1] = True
    return mask if mask.any() else None


def apply_occlusion(frame: LabFrame, mask: Optional[np.ndarray], lightness: float) -> LabFrame:
    if mask is None:
        return frame
    out = frame.stack().copy()
    out[mask] = (lightness, 0.0, 0.0)
    return LabFrame.from_stack(out)


def apply_gain_noise(frame: LabFrame, gain: float, sigma: float, rng: np.random.Generator) -> LabFrame:
    """Ganancia y ruido gaussiano sobre L; L se recorta a [0, 100]."""
    if gain == 1.0 and sigma == 0.0:
        return frame
    L = frame.L * gain
    if sigma > 0.0:
        L = L + rng.normal(0.0, sigma, size=L.shape)
    return frame.with_lightness(np.clip(L, 0.0, 100.0))


# ------------------------------ Captura ---------------------------------------

def capture(enc: EncodedSequence, cp: ChannelParams) -> CapturedSequence:
    """Simula la cámara: remuestreo, rolling shutter, jitter, oclusión, ganancia, ruido y drops."""
    fps_tx = enc.fps_tx
    fps_rx = validate_fps(fps_tx, cp)
    n_tx = len(enc.frames)
    sched = resample_schedule(n_tx, fps_tx, fps_rx)

    root = np.random.SeedSequence(cp.seed)
    frame_ss, occl_ss = root.spawn(2)
    frame_rngs = [np.random.default_rng(s) for s in frame_ss.spawn(len(sched))]

    n_packets = max(1, -(-n_tx // enc.period))
    masks: List[Optional[np.ndarray]] = [None] * n_packets
    if cp.occlusion_prob > 0.0 and enc.tile_boxes:
        shape = enc.frames[0].shape
        for i, s in enumerate(occl_ss.spawn(n_packets)):
            masks[i] = occlusion_mask(np.random.default_rng(s), enc.tile_boxes, cp.occlusion_prob, shape)

    gain = cp.gain * DISPLAY_GAIN[cp.display]
    forced = set(cp.forced_drops)
    frames: List[Optional[LabFrame]] = []
    source: List[int] = []
    for k, idx in enumerate(sched):
        rng = frame_rngs[k]
        idx = int(idx)
        f = apply_rolling_shutter(enc.frames[idx], enc.frames[max(idx - 1, 0)], cp.shutter_band)
        f = apply_motion_jitter(f, sample_transform(rng, cp.jitter))
        f = apply_occlusion(f, masks[idx // enc.period], cp.occluder_lightness)
        f = apply_gain_noise(f, gain, cp.noise_sigma, rng)
        dropped = rng.random() < cp.drop_prob or k in forced
        frames.append(None if dropped else f)
        source.append(DROPPED if dropped else idx)

    timestamps = [k * 1000.0 / fps_rx for k in range(len(sched))]
    n_dropped = sum(1 for f in frames if f is None)
    logger.info("Capturados %s slots a %.1f fps (%s descartados, seed=%s)", len(frames), fps_rx, n_dropped, cp.seed)
    return CapturedSequence(
        frames=frames,
        timestamps_ms=timestamps,
        source_index=source,
        fps_rx=fps_rx,
        params=cp,
        schedule=enc.schedule,
    )
