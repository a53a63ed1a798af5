# passive_link/codec/barcode.py
from __future__ import annotations

from functools import lru_cache
from typing import List, Optional, Tuple
import logging

import cv2
import numpy as np
import segno

from .dto import BoxTuple, EcLiteral, Payload, TileLayout
from .exceptions import LayoutOverflow, PayloadTooLarge
from .frames import BitPlane

logger = logging.getLogger(__name__)

# Lado mínimo (px) de la imagen entregada al detector
_MIN_DECODE_SIDE = 256


# —— Codificación ——

def encode_payload(p: Payload, ec: EcLiteral, version: Optional[int] = None) -> np.ndarray:
    """Matriz QR sin zona de silencio: 1 = módulo oscuro, 0 = claro.

    version=None => la mínima versión que admite el payload con ese nivel EC.
    """
    try:
        qr = segno.make_qr(p.serialize(), error=ec.lower(), version=version, boost_error=False)
    except segno.DataOverflowError as exc:
        raise PayloadTooLarge(f"Payload {p.serialize()} no cabe (ec={ec}, version={version}).") from exc
    return np.array([list(row) for row in qr.matrix], dtype=np.uint8)


def _tile_signs(m: np.ndarray, layout: TileLayout) -> np.ndarray:
    """Tile a resolución de píxel: oscuro -> -1, claro y zona de silencio -> +1."""
    signs = np.where(m == 1, -1, 1).astype(np.int8)
    signs = np.pad(signs, layout.quiet_zone, mode="constant", constant_values=1)
    px = layout.module_px
    return np.repeat(np.repeat(signs, px, axis=0), px, axis=1)


def tile_size(m: np.ndarray, layout: TileLayout) -> int:
    return (int(m.shape[0]) + 2 * layout.quiet_zone) * layout.module_px


def tile_boxes(size: int, frame_w: int, frame_h: int, layout: TileLayout) -> List[BoxTuple]:
    """Cajas (x0, y0, x1, y1) de cada tile, centradas en su celda de la grilla."""
    rows, cols = layout.grid
    cell_h, cell_w = frame_h // rows, frame_w // cols
    if size > cell_h or size > cell_w:
        raise LayoutOverflow(
            f"Tile de {size}px no cabe en celdas de {cell_w}x{cell_h} (frame {frame_w}x{frame_h}, grilla {rows}x{cols})."
        )
    boxes: List[BoxTuple] = []
    for r in range(rows):
        for c in range(cols):
            y0 = r * cell_h + (cell_h - size) // 2
            x0 = c * cell_w + (cell_w - size) // 2
            boxes.append((x0, y0, x0 + size, y0 + size))
    return boxes


def render_tiles(m: np.ndarray, frame_w: int, frame_h: int, layout: TileLayout) -> BitPlane:
    tile = _tile_signs(m, layout)
    boxes = tile_boxes(tile.shape[0], frame_w, frame_h, layout)
    s = np.zeros((frame_h, frame_w), dtype=np.int8)
    for x0, y0, x1, y1 in boxes:
        s[y0:y1, x0:x1] = tile
    return BitPlane(s=s, tile_boxes=boxes)


def matrix_to_image(m: np.ndarray, module_px: int = 4, quiet_zone: int = 4) -> np.ndarray:
    """Imagen uint8 de la matriz (oscuro 0, claro 255)."""
    tile = _tile_signs(m, TileLayout(module_px=module_px, quiet_zone=quiet_zone))
    return np.where(tile > 0, 255, 0).astype(np.uint8)


# —— Decodificación ——

@lru_cache(maxsize=1)
def _detectors() -> Tuple[object, ...]:
    dets: List[object] = [cv2.QRCodeDetector()]
    if hasattr(cv2, "QRCodeDetectorAruco"):
        dets.append(cv2.QRCodeDetectorAruco())
    else:
        logger.warning("cv2.QRCodeDetectorAruco no disponible; se usa solo QRCodeDetector.")
    return tuple(dets)


def _prepare(img: np.ndarray) -> np.ndarray:
    """uint8, borde claro y escalado entero (vecino más cercano)."""
    g = np.asarray(img)
    if g.dtype != np.uint8:
        g = np.clip(np.rint(g), 0, 255).astype(np.uint8)
    pad = max(8, min(g.shape) // 10)
    g = cv2.copyMakeBorder(g, pad, pad, pad, pad, cv2.BORDER_CONSTANT, value=255)
    scale = max(1, int(np.ceil(_MIN_DECODE_SIDE / max(1, min(g.shape)))))
    if scale > 1:
        g = cv2.resize(g, None, fx=scale, fy=scale, interpolation=cv2.INTER_NEAREST)
    return g


def decode_matrix(img: np.ndarray) -> Optional[Payload]:
    """Payload decodificado o None (ilegible, checksum inválido o formato ajeno)."""
    g = np.asarray(img)
    if g.ndim != 2 or min(g.shape) < 8 or int(g.max()) == int(g.min()):
        return None
    prepared = _prepare(g)
    for det in _detectors():
        try:
            text, _points, _straight = det.detectAndDecode(prepared)  # type: ignore[attr-defined]
        except cv2.error:
            logger.debug("detectAndDecode lanzó cv2.error; se intenta el siguiente detector.")
            continue
        if text:
            payload = Payload.parse(text)
            if payload is not None:
                return payload
            logger.debug("QR decodificado con contenido ajeno: %r", text)
    return None
