# passive_link/codec/texture.py
from __future__ import annotations

"""
Análisis de textura regional sobre la luminosidad L*.

El contraste GLCM de una ventana, con pares vecinos horizontales, es igual a la
media de (L(c,r) - L(c+1,r))² sobre los pares de la ventana. La versión de
referencia construye la GLCM por píxel; la optimizada usa una imagen integral
de las diferencias al cuadrado y resuelve cada ventana en O(1).

Política de bordes: la ventana se recorta a la imagen y R (pares) y S (píxeles)
se ajustan a los conteos reales.
"""

from typing import Tuple

import numpy as np
from skimage.feature import graycomatrix, graycoprops

from .dto import TextureParams
from .exceptions import DimensionMismatch, InvalidParam, WindowTooLarge


# —— Ventanas recortadas ——

def _check_window(shape: Tuple[int, int], window: int) -> None:
    h, w = shape
    if window > h and window > w:
        raise WindowTooLarge(f"Ventana {window} excede ambas dimensiones de la imagen {w}x{h}.")


def _clamped_bounds(size: int, window: int) -> Tuple[np.ndarray, np.ndarray]:
    """Límites [inicio, fin) de la ventana centrada en cada índice."""
    r = window // 2
    idx = np.arange(size)
    return np.maximum(idx - r, 0), np.minimum(idx + r + 1, size)


def window_pixel_count(shape: Tuple[int, int], window: int) -> np.ndarray:
    """S(x,y): píxeles reales de la ventana recortada."""
    y0, y1 = _clamped_bounds(shape[0], window)
    x0, x1 = _clamped_bounds(shape[1], window)
    return ((y1 - y0)[:, None] * (x1 - x0)[None, :]).astype(np.float64)


def quantize_lightness(L: np.ndarray, ng: int) -> np.ndarray:
    """Cuantiza L* ∈ [0, 100] a niveles enteros 0..ng-1."""
    q = np.rint(np.clip(np.asarray(L, dtype=np.float64), 0.0, 100.0) / 100.0 * (ng - 1))
    return q.astype(np.int64)


# —— Contraste ——

def glcm_contrast_reference(img: np.ndarray, p: TextureParams) -> np.ndarray:
    """Contraste por píxel construyendo la GLCM de cada ventana (oráculo)."""
    q = np.asarray(img)
    if q.ndim != 2:
        raise InvalidParam("Se esperaba una imagen 2-D cuantizada.")
    if not np.issubdtype(q.dtype, np.integer):
        raise InvalidParam("glcm_contrast_reference requiere niveles enteros.")
    if q.size and (q.min() < 0 or q.max() >= p.ng):
        raise InvalidParam(f"Niveles fuera de [0, {p.ng - 1}].")
    _check_window(q.shape, p.window)

    levels = q.astype(np.uint8 if p.ng <= 256 else np.uint16)
    h, w = q.shape
    y0, y1 = _clamped_bounds(h, p.window)
    x0, x1 = _clamped_bounds(w, p.window)
    out = np.zeros((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            win = levels[y0[y]:y1[y], x0[x]:x1[x]]
            if win.shape[1] < 2:
                continue  # R = 0: sin pares horizontales
            glcm = graycomatrix(win, distances=[1], angles=[0], levels=p.ng, symmetric=False, normed=False)
            out[y, x] = graycoprops(glcm, "contrast")[0, 0]
    return out


def contrast_optimized(img: np.ndarray, p: TextureParams) -> np.ndarray:
    """C = (1/R)·Σ (L(c,r) − L(c+1,r))² por ventana, vía imagen integral."""
    L = np.asarray(img, dtype=np.float64)
    if L.ndim != 2:
        raise InvalidParam("Se esperaba una imagen 2-D.")
    _check_window(L.shape, p.window)
    h, w = L.shape

    # sq[r, c] = diferencia al cuadrado del par (c, c+1)
    sq = np.zeros((h, w), dtype=np.float64)
    sq[:, :-1] = np.diff(L, axis=1) ** 2
    integral = np.zeros((h + 1, w + 1), dtype=np.float64)
    integral[1:, 1:] = sq.cumsum(axis=0).cumsum(axis=1)

    y0, y1 = _clamped_bounds(h, p.window)
    x0, x1 = _clamped_bounds(w, p.window)
    xe = x1 - 1  # el par que empieza en la última columna sale de la ventana
    Y0, Y1 = y0[:, None], y1[:, None]
    X0, XE = x0[None, :], xe[None, :]
    total = integral[Y1, XE] - integral[Y0, XE] - integral[Y1, X0] + integral[Y0, X0]

    R = (y1 - y0)[:, None] * np.maximum(xe - x0, 0)[None, :]
    out = np.zeros((h, w), dtype=np.float64)
    np.divide(total, R, out=out, where=R > 0)
    return np.maximum(out, 0.0)


# —— Cadena textura -> profundidad ——

def texture_metric(c: np.ndarray, p: TextureParams) -> np.ndarray:
    """T(x,y) = C(x,y) / S(x,y)."""
    c = np.asarray(c, dtype=np.float64)
    return c / window_pixel_count(c.shape, p.window)


def texture_scaling(t: np.ndarray, p: TextureParams) -> np.ndarray:
    """α = (T/T_max)(1−k) + k; α = k en todo el frame si T_max = 0."""
    t = np.asarray(t, dtype=np.float64)
    t_max = float(t.max()) if t.size else 0.0
    if t_max <= 0.0:
        return np.full(t.shape, p.k, dtype=np.float64)
    return (t / t_max) * (1.0 - p.k) + p.k


def modulation_depth(d1: np.ndarray, a: np.ndarray) -> np.ndarray:
    """ΔL2 = ΔL1·α, píxel a píxel."""
    d1 = np.asarray(d1, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if d1.shape != a.shape:
        raise DimensionMismatch(f"ΔL1 {d1.shape} y α {a.shape} deben coincidir.")
    return d1 * a
