# passive_link/codec/decoder.py
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple
import logging

import cv2
import numpy as np
from scipy import ndimage

from .barcode import decode_matrix
from .dto import BoxTuple, DecoderConfig, Payload
from .exceptions import DimensionMismatch
from .frames import LabFrame

logger = logging.getLogger(__name__)

_CLOSING = np.ones((3, 3), dtype=bool)
_EIGHT = np.ones((3, 3), dtype=int)


# ------------------------------ Alineación ------------------------------------

@dataclass(frozen=True)
class Alignment:
    matrix: np.ndarray   # 2x3, coordenadas de prev -> curr
    aligned: LabFrame    # curr remuestreado en coordenadas de prev
    valid: np.ndarray    # píxeles con dato real tras el warp
    inliers: int

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(2, 3)))


def _gray8(L: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(L * 2.55), 0, 255).astype(np.uint8)


def _identity(curr: LabFrame) -> Alignment:
    return Alignment(np.eye(2, 3), curr, np.ones(curr.shape, dtype=bool), 0)


def align_frames(prev: LabFrame, curr: LabFrame, min_inliers: int = 8) -> Alignment:
    """Compensa el movimiento de mano: esquinas + flujo LK + similaridad robusta (RANSAC)."""
    if prev.shape != curr.shape:
        raise DimensionMismatch(f"prev {prev.shape} y curr {curr.shape} deben coincidir.")
    g0, g1 = _gray8(prev.L), _gray8(curr.L)

    pts0 = cv2.goodFeaturesToTrack(g0, maxCorners=400, qualityLevel=0.01, minDistance=5, blockSize=7)
    if pts0 is None or len(pts0) < min_inliers:
        logger.debug("Alineación: pocas esquinas; se usa identidad.")
        return _identity(curr)

    pts1, status, _err = cv2.calcOpticalFlowPyrLK(g0, g1, pts0, None, winSize=(21, 21), maxLevel=3)
    if pts1 is None:
        return _identity(curr)
    ok = status.ravel() == 1
    if int(ok.sum()) < min_inliers:
        logger.debug("Alineación: %s puntos seguidos (< %s); identidad.", int(ok.sum()), min_inliers)
        return _identity(curr)

    matrix, inliers = cv2.estimateAffinePartial2D(
        pts0[ok], pts1[ok], method=cv2.RANSAC, ransacReprojThreshold=1.0, maxIters=2000, confidence=0.995, refineIters=10
    )
    n_in = int(inliers.sum()) if inliers is not None else 0
    if matrix is None or n_in < min_inliers:
        logger.debug("Alineación: %s inliers (< %s); identidad.", n_in, min_inliers)
        return _identity(curr)

    h, w = curr.shape
    warped = cv2.warpAffine(
        np.ascontiguousarray(curr.stack()), matrix, (w, h),
        flags=cv2.INTER_LINEAR | cv2.WARP_INVERSE_MAP, borderMode=cv2.BORDER_REPLICATE,
    )
    valid = cv2.warpAffine(
        np.ones((h, w), dtype=np.uint8), matrix, (w, h),
        flags=cv2.INTER_NEAREST | cv2.WARP_INVERSE_MAP, borderMode=cv2.BORDER_CONSTANT, borderValue=0,
    )
    valid = ndimage.binary_erosion(valid > 0, structure=_CLOSING, border_value=1)
    return Alignment(matrix, LabFrame.from_stack(warped), valid, n_in)


# ------------------------------ Diferencia y ROI ------------------------------

def subtract(f_a: LabFrame, f_b: LabFrame) -> np.ndarray:
    """L(a) − L(b) por píxel."""
    if f_a.shape != f_b.shape:
        raise DimensionMismatch(f"{f_a.shape} vs {f_b.shape}")
    return np.asarray(f_a.L, dtype=np.float64) - np.asarray(f_b.L, dtype=np.float64)


def denoise_diff(d: np.ndarray, ksize: int) -> np.ndarray:
    """Mediana ksize x ksize (0 = sin filtro)."""
    if ksize == 0:
        return d
    return cv2.medianBlur(np.ascontiguousarray(d, dtype=np.float32), ksize).astype(np.float64)


def find_regions(d: np.ndarray, cfg: DecoderConfig) -> List[BoxTuple]:
    """Cajas de las componentes conexas de |d| > τ con área >= min_region_px, por área descendente."""
    mask = np.abs(d) > cfg.roi_threshold
    m = cfg.border_margin
    if m:
        mask[:m, :] = False
        mask[-m:, :] = False
        mask[:, :m] = False
        mask[:, -m:] = False
    if not mask.any():
        return []
    closed = ndimage.binary_closing(mask, structure=_CLOSING, iterations=2) | mask
    labels, n = ndimage.label(closed, structure=_EIGHT)
    if n == 0:
        return []
    areas = ndimage.sum_labels(closed, labels, index=np.arange(1, n + 1))
    regions: List[Tuple[float, BoxTuple]] = []
    for i, sl in enumerate(ndimage.find_objects(labels)):
        if sl is None or areas[i] < cfg.min_region_px:
            continue
        ys, xs = sl
        regions.append((float(areas[i]), (xs.start, ys.start, xs.stop, ys.stop)))
    regions.sort(key=lambda r: (-r[0], r[1]))
    return [box for _, box in regions]


def union_box(boxes: List[BoxTuple]) -> Optional[BoxTuple]:
    if not boxes:
        return None
    return (
        min(b[0] for b in boxes),
        min(b[1] for b in boxes),
        max(b[2] for b in boxes),
        max(b[3] for b in boxes),
    )


def detect_roi(d: np.ndarray, cfg: DecoderConfig) -> Optional[BoxTuple]:
    """Caja mínima (x0, y0, x1, y1) que contiene todas las regiones moduladas; None si no hay."""
    return union_box(find_regions(d, cfg))


def binarize_roi(d: np.ndarray, bbox: BoxTuple, padding: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Recorte binarizado por signo (d >= 0 -> 255) y su variante de polaridad invertida."""
    x0, y0, x1, y1 = bbox
    h, w = d.shape
    crop = d[max(0, y0 - padding):min(h, y1 + padding), max(0, x0 - padding):min(w, x1 + padding)]
    img = np.where(crop >= 0, 255, 0).astype(np.uint8)
    return img, (255 - img).astype(np.uint8)


# ------------------------------ Decodificación --------------------------------

def candidate_boxes(regions: List[BoxTuple], max_candidates: int) -> List[BoxTuple]:
    """Cada región por separado y luego la unión (un tile sano basta)."""
    out: List[BoxTuple] = []
    for box in regions[:max_candidates]:
        if box not in out:
            out.append(box)
    roi = union_box(regions)
    if roi is not None and roi not in out:
        out.append(roi)
    return out


def decode_diff(d: np.ndarray, cfg: DecoderConfig, denoised: Optional[np.ndarray] = None) -> Optional[Payload]:
    """
    Las regiones salen de `denoised` (si viene); el recorte se binariza sobre `d` crudo.
    El recorte filtrado queda como segundo intento para pares con ruido.
    """
    regions = find_regions(d if denoised is None else denoised, cfg)
    if not regions:
        return None
    sources = [d] if denoised is None or denoised is d else [d, denoised]
    for box in candidate_boxes(regions, cfg.max_candidates):
        for img in (im for src in sources for im in binarize_roi(src, box, cfg.roi_padding)):
            payload = decode_matrix(img)
            if payload is not None:
                return payload
    return None


def decode_pair(prev: LabFrame, curr: LabFrame, cfg: DecoderConfig) -> Optional[Payload]:
    """Pipeline completo para un par de frames consecutivos."""
    valid = None
    if cfg.motion_comp:
        al = align_frames(prev, curr, cfg.min_inliers)
        curr, valid = al.aligned, al.valid
    d = subtract(prev, curr)
    if valid is not None:
        d[~valid] = 0.0
    return decode_diff(d, cfg, denoised=denoise_diff(d, cfg.denoise_ksize))
