# passive_link/codec/encoder.py
from __future__ import annotations

from math import ceil
from typing import List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from scipy import ndimage

from .barcode import encode_payload, render_tiles
from .cache import LRUCache, build_depth_key, build_plane_key, get_or_compute
from .colorspace import perceptual_delta, srgb_to_lab
from .dto import BoxTuple, ModeLiteral, ModulationParams, Payload, RoleLiteral, Schedule, ScheduleEntry
from .exceptions import DimensionMismatch, InvalidMode, InvalidParam
from .frames import BitPlane, EncodedSequence, LabFrame, RgbFrame
from .texture import contrast_optimized, modulation_depth, texture_metric, texture_scaling
from .validators import validate_modulation

logger = logging.getLogger(__name__)

ROLE_PATTERNS: dict = {
    "pair": ("plus", "minus"),
    "trivial4": ("plus", "plus", "minus", "minus"),
    "step4": ("rest", "plus", "rest", "minus"),
}


# —— Plano de bits ——

def gaussian_kernel(sigma: float) -> np.ndarray:
    """Kernel 1-D normalizado de tamaño 2⌈3σ⌉+1."""
    if sigma <= 0:
        return np.ones(1, dtype=np.float64)
    radius = int(ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return k / k.sum()


def smooth_bitplane(b: BitPlane, sigma: float) -> np.ndarray:
    """Convolución gaussiana 2-D (separable) del plano ternario; fuera del frame vale 0."""
    if sigma < 0:
        raise InvalidParam("sigma debe ser >= 0.")
    s = np.asarray(b.s, dtype=np.float64)
    if sigma == 0:
        return s.copy()
    k = gaussian_kernel(sigma)
    out = ndimage.convolve1d(s, k, axis=0, mode="constant", cval=0.0)
    return ndimage.convolve1d(out, k, axis=1, mode="constant", cval=0.0)


# —— Profundidad ——

def depth_map(lab: LabFrame, mp: ModulationParams) -> np.ndarray:
    """ΔL2(x,y) = ΔL1(L(x,y))·α(x,y)."""
    d1 = perceptual_delta(lab.L, mp.perception)
    c = contrast_optimized(lab.L, mp.texture)
    alpha = texture_scaling(texture_metric(c, mp.texture), mp.texture)
    return modulation_depth(d1, alpha)


def effective_offset(L: np.ndarray, s: np.ndarray, d: np.ndarray) -> np.ndarray:
    """sign(s)·min(d·|s|, L, 100−L): ambos frames complementarios quedan en [0, 100]."""
    L = np.asarray(L, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if not (L.shape == s.shape == d.shape):
        raise DimensionMismatch(f"L {L.shape}, s {s.shape} y ΔL {d.shape} deben coincidir.")
    eff = np.minimum(np.minimum(d * np.abs(s), L), 100.0 - L)
    return np.sign(s) * np.maximum(eff, 0.0)


# —— Frames modulados ——

def modulate_pair(lab: LabFrame, s: np.ndarray, d: np.ndarray) -> Tuple[LabFrame, LabFrame]:
    offset = effective_offset(lab.L, s, d)
    return lab.with_lightness(lab.L + offset), lab.with_lightness(lab.L - offset)


def step_encode(lab: LabFrame, s: np.ndarray, d: np.ndarray, mode: ModeLiteral) -> List[LabFrame]:
    """4 frames por código: trivial4 = [+Δ, +Δ, −Δ, −Δ]; step4 = [0, +Δ, 0, −Δ]."""
    if mode not in ("trivial4", "step4"):
        raise InvalidMode(f"step_encode no soporta mode='{mode}'.")
    f_plus, f_minus = modulate_pair(lab, s, d)
    if mode == "trivial4":
        return [f_plus, f_plus, f_minus, f_minus]
    rest = lab.with_lightness(lab.L.copy())
    return [rest, f_plus, rest, f_minus]


def emit_frames(lab: LabFrame, s: np.ndarray, d: np.ndarray, mode: ModeLiteral) -> List[LabFrame]:
    if mode == "pair":
        return list(modulate_pair(lab, s, d))
    return step_encode(lab, s, d, mode)


# —— Video completo ——

def _code_plane(p: Payload, mp: ModulationParams, width: int, height: int) -> Tuple[np.ndarray, List[BoxTuple]]:
    m = encode_payload(p, mp.ec, mp.layout.version)
    plane = render_tiles(m, width, height, mp.layout)
    return smooth_bitplane(plane, mp.smoothing_sigma), plane.tile_boxes


def encode_video(
    frames: Sequence[Union[RgbFrame, LabFrame]],
    payloads: Sequence[Payload],
    mp: ModulationParams,
    cache: Optional[LRUCache] = None,
) -> EncodedSequence:
    """Un payload por frame fuente; cada frame fuente emite `mp.period` frames a fps_tx."""
    validate_modulation(mp)
    if len(frames) != len(payloads):
        raise InvalidParam(f"Se esperaba un payload por frame fuente ({len(frames)} frames, {len(payloads)} payloads).")
    if not frames:
        raise InvalidParam("encode_video requiere al menos un frame fuente.")

    cache = cache if cache is not None else LRUCache()
    pattern = ROLE_PATTERNS[mp.mode]
    out_frames: List[LabFrame] = []
    roles: List[RoleLiteral] = []
    entries: List[ScheduleEntry] = []
    shape: Optional[Tuple[int, int]] = None
    boxes: List[BoxTuple] = []

    for i, (src, payload) in enumerate(zip(frames, payloads)):
        lab = src if isinstance(src, LabFrame) else srgb_to_lab(src)
        if shape is None:
            shape = lab.shape
        elif lab.shape != shape:
            raise DimensionMismatch(f"Frame fuente {i} mide {lab.shape}; se esperaba {shape}.")
        h, w = shape

        s, boxes = get_or_compute(cache, build_plane_key(payload, mp, w, h), lambda: _code_plane(payload, mp, w, h))
        d = get_or_compute(cache, build_depth_key(lab.L, mp), lambda: depth_map(lab, mp))

        start = len(out_frames)
        out_frames.extend(emit_frames(lab, s, d, mp.mode))
        roles.extend(pattern)
        entries.append(ScheduleEntry(packet_index=i, payload=payload, start_frame=start, end_frame=len(out_frames)))

    h, w = shape  # type: ignore[misc]
    schedule = Schedule(
        fps_tx=mp.fps_tx, mode=mp.mode, period=mp.period, width=w, height=h, tile_boxes=boxes, packets=entries
    )
    logger.info(
        "Codificados %s paquetes -> %s frames (mode=%s, ΔE00=%.2f, cache hits=%s)",
        len(entries), len(out_frames), mp.mode, mp.perception.delta_e00, cache.hits,
    )
    return EncodedSequence(frames=out_frames, roles=roles, schedule=schedule)
