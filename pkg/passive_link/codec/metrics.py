# passive_link/codec/metrics.py
from __future__ import annotations

from typing import Dict, List, Literal, Optional, Sequence, Tuple
import math

import numpy as np

from .dto import LinkMetrics, PacketResult, Payload, Schedule
from .schema import IMMEDIATE_MS, INSTANTANEOUS_MS, TRANSIENT_MS

ExperienceLiteral = Literal["instantaneous", "immediate", "transient", "beyond"]

_EPS_MS = 1e-6


def packet_start_ms(start_frame: int, fps_tx: float) -> float:
    return start_frame * 1000.0 / fps_tx


def match_packets(results: Sequence[PacketResult], schedule: Schedule) -> List[Optional[int]]:
    """Índice de paquete de cada resultado; None si el payload no está en el ground truth.

    Con payloads repetidos se elige el último paquete que ya había empezado a mostrarse.
    """
    index: Dict[Payload, List[Tuple[float, int]]] = {}
    for e in schedule.packets:
        index.setdefault(e.payload, []).append((packet_start_ms(e.start_frame, schedule.fps_tx), e.packet_index))
    out: List[Optional[int]] = []
    for r in results:
        cands = index.get(r.payload)
        if not cands:
            out.append(None)
            continue
        started = [i for start, i in cands if start <= r.capture_ts_ms + _EPS_MS]
        out.append(started[-1] if started else cands[0][1])
    return out


def response_times(results: Sequence[PacketResult], matched: Sequence[Optional[int]], schedule: Schedule) -> List[float]:
    """Por paquete i: primer éxito (paquete >= i) capturado desde que i empezó, menos ese inicio."""
    hits = sorted(
        (r.capture_ts_ms, idx) for r, idx in zip(results, matched) if idx is not None
    )
    out: List[float] = []
    for e in schedule.packets:
        start = packet_start_ms(e.start_frame, schedule.fps_tx)
        for ts, idx in hits:
            if idx >= e.packet_index and ts >= start - _EPS_MS:
                out.append(max(0.0, ts - start))
                break
    return out


def compute_metrics(results: Sequence[PacketResult], schedule: Schedule, attempts: int = 0) -> LinkMetrics:
    matched = match_packets(results, schedule)
    decoded = {i for i in matched if i is not None}
    transmitted = len(schedule.packets)
    return LinkMetrics(
        psr=(len(decoded) / transmitted) if transmitted else 0.0,
        transmitted=transmitted,
        successes=len(decoded),
        attempts=attempts,
        decodes=len(results),
        false_decodes=sum(1 for i in matched if i is None),
        response_time_ms=response_times(results, matched, schedule),
        latency_ms=[r.latency_ms for r in results],
    )


# ------------------------------ CDF y umbrales --------------------------------

def response_time_cdf(samples: Sequence[float]) -> List[Tuple[float, float]]:
    """Puntos (ms, fracción acumulada) ordenados; los empates se colapsan."""
    if not samples:
        return []
    values, counts = np.unique(np.asarray(samples, dtype=np.float64), return_counts=True)
    cum = np.cumsum(counts) / counts.sum()
    return [(float(v), float(c)) for v, c in zip(values, cum)]


def percentile_at(cdf: Sequence[Tuple[float, float]], q: float) -> Optional[float]:
    """Primer tiempo en que la CDF alcanza q (p. ej. 0.95)."""
    for ms, frac in cdf:
        if frac >= q - 1e-12:
            return ms
    return None


def rt_percentile(samples: Sequence[float], q: float) -> float:
    """Percentil q (0-100) o NaN si no hubo paquetes decodificados."""
    if not samples:
        return math.nan
    return float(np.percentile(np.asarray(samples, dtype=np.float64), q))


def classify_response_time(ms: float) -> ExperienceLiteral:
    if ms < INSTANTANEOUS_MS:
        return "instantaneous"
    if ms <= IMMEDIATE_MS:
        return "immediate"
    if ms <= TRANSIENT_MS:
        return "transient"
    return "beyond"


def threshold_fractions(samples: Sequence[float]) -> Dict[str, float]:
    """Fracción de muestras en cada categoría de experiencia de usuario."""
    keys: List[ExperienceLiteral] = ["instantaneous", "immediate", "transient", "beyond"]
    if not samples:
        return {k: 0.0 for k in keys}
    labels = [classify_response_time(s) for s in samples]
    return {k: labels.count(k) / len(labels) for k in keys}
