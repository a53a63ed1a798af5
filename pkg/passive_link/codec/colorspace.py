# passive_link/codec/colorspace.py
from __future__ import annotations

import warnings
from typing import Union

import numpy as np
from skimage.color import lab2rgb, rgb2lab

from .dto import PerceptionParams
from .frames import LabFrame, RgbFrame

# Iluminante D65, observador 2°, transferencia sRGB estándar
ILLUMINANT: str = "D65"
OBSERVER: str = "2"

ArrayLike = Union[float, np.ndarray]


def srgb_to_lab(frame: RgbFrame) -> LabFrame:
    lab = rgb2lab(frame.data.astype(np.float64) / 255.0, illuminant=ILLUMINANT, observer=OBSERVER)
    # Ruido numérico en los extremos (blanco/negro)
    L = np.clip(lab[..., 0], 0.0, 100.0)
    return LabFrame(L=L, a=lab[..., 1].copy(), b=lab[..., 2].copy())


def lab_to_srgb(frame: LabFrame) -> RgbFrame:
    """Inversa de srgb_to_lab; los valores fuera de gama se recortan a [0, 255]."""
    with warnings.catch_warnings():
        # lab2rgb avisa cuando recorta componentes Z negativos
        warnings.simplefilter("ignore", UserWarning)
        rgb = lab2rgb(frame.stack(), illuminant=ILLUMINANT, observer=OBSERVER)
    out = np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)
    return RgbFrame(out)


def perceptual_delta(L_star: ArrayLike, p: PerceptionParams) -> ArrayLike:
    """ΔL1 = k_L·[1 + 0.015(L−50)² / √(20 + (L−50)²)]·ΔE00.

    Acepta escalar o mapa por píxel; devuelve el mismo tipo.
    """
    L = np.asarray(L_star, dtype=np.float64)
    d2 = (L - 50.0) ** 2
    delta = p.k_l * (1.0 + 0.015 * d2 / np.sqrt(20.0 + d2)) * p.delta_e00
    if delta.ndim == 0:
        return float(delta)
    return delta
