# passive_link/tests/test_metrics.py
from __future__ import annotations

import math

import pytest

from passive_link.codec.dto import PacketResult, Payload, Schedule, ScheduleEntry
from passive_link.codec.metrics import (
    classify_response_time, compute_metrics, match_packets, packet_start_ms, percentile_at, response_time_cdf,
    rt_percentile, threshold_fractions,
)


# ------------------------------ Helpers --------------------------------------


def _schedule(n: int, fps_tx: float = 60.0, period: int = 2) -> Schedule:
    return Schedule(
        fps_tx=fps_tx,
        mode="pair",
        period=period,
        width=96,
        height=96,
        packets=[
            ScheduleEntry(
                packet_index=i,
                payload=Payload(song_id=1, frame_num=i),
                start_frame=i * period,
                end_frame=(i + 1) * period,
            )
            for i in range(n)
        ],
    )


def _hit(frame_num: int, ts: float, song_id: int = 1) -> PacketResult:
    return PacketResult(
        payload=Payload(song_id=song_id, frame_num=frame_num),
        capture_ts_ms=ts,
        latency_ms=2.0,
        prev_slot=0,
        curr_slot=1,
        pair_index=1,
    )


# ------------------------------ PSR -------------------------------------------


def test_psr_counts_distinct_packets():
    sched = _schedule(4)
    results = [_hit(0, 20.0), _hit(0, 30.0), _hit(2, 90.0)]
    m = compute_metrics(results, sched, attempts=5)
    assert m.psr == pytest.approx(0.5)
    assert (m.transmitted, m.successes, m.decodes, m.attempts) == (4, 2, 3, 5)
    assert m.false_decodes == 0


def test_foreign_payloads_are_false_decodes():
    sched = _schedule(2)
    results = [_hit(0, 20.0), _hit(0, 25.0, song_id=9), _hit(50, 40.0)]
    assert match_packets(results, sched) == [0, None, None]
    m = compute_metrics(results, sched)
    assert m.false_decodes == 2 and m.psr == pytest.approx(0.5)


def test_empty_schedule_has_zero_psr():
    m = compute_metrics([], _schedule(0))
    assert m.psr == 0.0 and m.response_time_ms == []


# ------------------------------ Tiempo de respuesta ---------------------------


def test_response_time_from_packet_start():
    sched = _schedule(3)
    start1 = packet_start_ms(2, 60.0)
    results = [_hit(0, 1000.0 / 60), _hit(1, start1 + 1000.0 / 60)]
    m = compute_metrics(results, sched)
    assert m.response_time_ms[:2] == pytest.approx([1000.0 / 60, 1000.0 / 60])
    # el paquete 2 nunca se decodificó ni después: sin muestra
    assert len(m.response_time_ms) == 2


def test_missed_packet_waits_for_next_success():
    sched = _schedule(3)
    results = [_hit(2, 5 * 1000.0 / 60)]
    rts = compute_metrics(results, sched).response_time_ms
    assert rts == pytest.approx([5 * 1000.0 / 60, 3 * 1000.0 / 60, 1000.0 / 60])


# ------------------------------ CDF y umbrales --------------------------------


def test_cdf_collapses_ties_and_ends_at_one():
    cdf = response_time_cdf([20.0, 10.0, 10.0, 40.0])
    assert cdf == [(10.0, 0.5), (20.0, 0.75), (40.0, 1.0)]
    assert percentile_at(cdf, 0.5) == 10.0
    assert percentile_at(cdf, 0.95) == 40.0


def test_cdf_single_step_when_all_equal():
    assert response_time_cdf([16.0] * 5) == [(16.0, 1.0)]


def test_empty_cdf():
    assert response_time_cdf([]) == []
    assert percentile_at([], 0.95) is None
    assert math.isnan(rt_percentile([], 50))


@pytest.mark.parametrize(
    "ms,label",
    [
        (0.0, "instantaneous"),
        (299.9, "instantaneous"),
        (300.0, "immediate"),
        (1000.0, "immediate"),
        (1000.1, "transient"),
        (5000.0, "transient"),
        (5000.1, "beyond"),
    ],
)
def test_classify_response_time(ms, label):
    assert classify_response_time(ms) == label


def test_threshold_fractions_sum_to_one():
    fr = threshold_fractions([100.0, 500.0, 2000.0, 9000.0])
    assert fr == {"instantaneous": 0.25, "immediate": 0.25, "transient": 0.25, "beyond": 0.25}
    assert sum(threshold_fractions([]).values()) == 0.0
