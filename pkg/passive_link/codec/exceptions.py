# passive_link/codec/exceptions.py
from __future__ import annotations

class CodecError(Exception):
    """Base para errores del dominio del códec."""

class InvalidParam(CodecError):
    """Parámetro inválido o faltante."""

class InvalidFrame(CodecError):
    """Frame con dimensiones o tipo de datos inválidos."""

class DimensionMismatch(CodecError):
    """Dos mapas/frames que deberían coincidir en tamaño no lo hacen."""

class WindowTooLarge(CodecError):
    """La ventana de textura excede ambas dimensiones de la imagen."""

class PayloadTooLarge(CodecError):
    """El payload serializado no cabe en la versión QR elegida."""

class LayoutOverflow(CodecError):
    """Los tiles no caben en el frame."""

class InvalidMode(CodecError):
    """Modo de codificación no soportado por la operación."""

class FpsViolation(CodecError):
    """fps_rx < fps_tx: la cámara no alcanza la tasa del display."""

class UnknownTrack(CodecError):
    """song_id no registrado en el TrackRegistry."""

class PositionOutOfRange(CodecError):
    """La posición calculada excede la duración de la pista."""

class StoreError(CodecError):
    """FrameStore inexistente, vacío o inconsistente con su manifest."""

class SchemaMismatch(CodecError):
    """Un sidecar/JSON no cumple el esquema esperado."""
