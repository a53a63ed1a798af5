# passive_link/codec/synth.py
from __future__ import annotations

from typing import List

import numpy as np
from scipy import ndimage

from .dto import SourceSpec
from .exceptions import InvalidParam
from .frames import RgbFrame
from .store import FrameStore


def uniform_frame(gray: int, width: int, height: int) -> RgbFrame:
    return RgbFrame.gray(gray, width, height)


def gradient_frame(width: int, height: int, lo: int = 32, hi: int = 224) -> RgbFrame:
    """Rampa horizontal de grises lo..hi."""
    row = np.rint(np.linspace(lo, hi, width)).astype(np.uint8)
    g = np.broadcast_to(row, (height, width))
    return RgbFrame(np.repeat(g[:, :, None], 3, axis=2).copy())


def texture_frame(width: int, height: int, gray: int, amplitude: float, sigma: float, seed: int) -> RgbFrame:
    """Ruido blanco filtrado con una gaussiana: textura suave con esquinas rastreables."""
    rng = np.random.default_rng(seed)
    noise = ndimage.gaussian_filter(rng.standard_normal((height, width)), sigma=sigma, mode="reflect")
    std = float(noise.std()) or 1.0
    g = np.clip(np.rint(gray + amplitude * noise / std), 0, 255).astype(np.uint8)
    return RgbFrame(np.repeat(g[:, :, None], 3, axis=2))


def source_frames(spec: SourceSpec) -> List[RgbFrame]:
    """Frames fuente sintéticos (uno; el llamador lo repite por paquete)."""
    if spec.kind == "uniform":
        return [uniform_frame(spec.gray, spec.width, spec.height)]
    if spec.kind == "gradient":
        return [gradient_frame(spec.width, spec.height)]
    if spec.kind == "texture":
        return [texture_frame(spec.width, spec.height, spec.gray, spec.amplitude, spec.texture_sigma, spec.seed)]
    raise InvalidParam(f"source.kind='{spec.kind}' requiere leer un FrameStore.")


def load_source(spec: SourceSpec) -> List[RgbFrame]:
    """Como `source_frames`, pero `kind="store"` lee los frames desde `spec.path`."""
    if spec.kind == "store":
        if spec.path is None:
            raise InvalidParam("source.kind='store' requiere source.path.")
        return FrameStore.open(spec.path).read_all_rgb()
    return source_frames(spec)
