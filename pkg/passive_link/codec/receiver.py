# passive_link/codec/receiver.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional
import logging
import time

from .decoder import decode_pair
from .dto import DecoderConfig, LinkMetrics, PacketResult, Schedule
from .frames import CapturedSequence
from .metrics import compute_metrics
from .validators import resolve_sync_stride

logger = logging.getLogger(__name__)

PhaseLiteral = Literal["unsynced", "synced"]


@dataclass
class SyncState:
    """Disciplina de paridad: tras el primer éxito solo se intentan los pares en fase."""
    stride: int = 2
    phase: PhaseLiteral = "unsynced"
    parity: Optional[int] = None
    consecutive_failures: int = 0

    def should_attempt(self, j: int) -> bool:
        return self.phase == "unsynced" or j % self.stride == self.parity

    def on_success(self, j: int) -> None:
        self.phase = "synced"
        self.parity = j % self.stride
        self.consecutive_failures = 0

    def on_failure(self, resync_failures: int) -> bool:
        """True si se perdió la sincronización con este fallo."""
        if self.phase != "synced":
            return False
        self.consecutive_failures += 1
        # el fallo número R ya devuelve a "unsynced": la resincronía ocurre dentro de R fallos
        if self.consecutive_failures >= resync_failures:
            self.phase = "unsynced"
            self.parity = None
            self.consecutive_failures = 0
            return True
        return False


@dataclass
class StreamReport:
    results: List[PacketResult] = field(default_factory=list)
    attempts: int = 0
    attempted_pairs: List[int] = field(default_factory=list)
    sync_losses: int = 0
    stride: int = 2
    metrics: Optional[LinkMetrics] = None


def stream_decode(
    cap: CapturedSequence,
    cfg: DecoderConfig,
    schedule: Optional[Schedule] = None,
    clock: Callable[[], float] = time.perf_counter,
) -> StreamReport:
    """Recorre los frames entregados de a pares consecutivos (j-1, j).

    Sin sincronía se intentan todos los pares; el primer éxito fija la fase j % stride.
    `resync_failures` fallos seguidos en fase devuelven el receptor a "unsynced".
    """
    schedule = schedule or cap.schedule
    resolution = resolve_sync_stride(cfg, schedule, cap.fps_rx)
    stride = resolution.value
    logger.debug("Stride de sincronía %s (origen: %s)", stride, resolution.reason)
    state = SyncState(stride=stride)
    report = StreamReport(stride=stride)
    delivered = cap.delivered()

    for j in range(1, len(delivered)):
        if not state.should_attempt(j):
            continue
        (k_prev, prev), (k_curr, curr) = delivered[j - 1], delivered[j]
        report.attempts += 1
        report.attempted_pairs.append(j)

        t0 = clock()
        payload = decode_pair(prev, curr, cfg)
        latency_ms = (clock() - t0) * 1000.0

        if payload is not None:
            if state.phase == "unsynced":
                logger.debug("Sincronizado en par j=%s (fase %s/%s)", j, j % stride, stride)
            state.on_success(j)
            report.results.append(
                PacketResult(
                    payload=payload,
                    capture_ts_ms=cap.timestamps_ms[k_curr],
                    latency_ms=latency_ms,
                    prev_slot=k_prev,
                    curr_slot=k_curr,
                    pair_index=j,
                )
            )
        elif state.on_failure(cfg.resync_failures):
            report.sync_losses += 1
            logger.debug("Sincronía perdida en j=%s tras %s fallos", j, cfg.resync_failures)

    if schedule is not None:
        report.metrics = compute_metrics(report.results, schedule, attempts=report.attempts)
    logger.info(
        "stream_decode: %s intentos, %s paquetes, %s pérdidas de sincronía",
        report.attempts, len(report.results), report.sync_losses,
    )
    return report
