# passive_link/tests/test_receiver.py
from __future__ import annotations

import pytest

from passive_link.codec.channel import capture
from passive_link.codec.dto import ChannelParams, DecoderConfig, PayloadPlan, Schedule
from passive_link.codec.encoder import encode_video
from passive_link.codec.receiver import SyncState, stream_decode
from passive_link.codec.validators import resolve_sync_stride


# ------------------------------ SyncState -------------------------------------


def test_sync_state_parity_discipline():
    st = SyncState(stride=2)
    assert st.should_attempt(1) and st.should_attempt(2)
    st.on_success(3)
    assert st.phase == "synced" and st.parity == 1
    assert st.should_attempt(5) and not st.should_attempt(4)


def test_sync_state_resyncs_after_r_failures():
    st = SyncState(stride=2)
    st.on_success(1)
    assert st.on_failure(3) is False
    assert st.on_failure(3) is False
    assert st.on_failure(3) is True
    assert st.phase == "unsynced" and st.parity is None
    # fallos sin sincronía no cuentan
    assert st.on_failure(3) is False


def test_success_resets_failure_count():
    st = SyncState(stride=2)
    st.on_success(1)
    st.on_failure(3)
    st.on_failure(3)
    st.on_success(5)
    assert st.consecutive_failures == 0


@pytest.mark.parametrize("cfg, fps_rx, expected", [
    (DecoderConfig(sync_stride=3), 240.0, (3, "explicit")),
    (DecoderConfig(), 240.0, (4, "schedule")),
    (DecoderConfig(), None, (2, "default")),
])
def test_sync_stride_resolution_reports_its_origin(cfg, fps_rx, expected):
    schedule = Schedule(fps_tx=120.0, mode="pair", period=2, width=8, height=8)
    res = resolve_sync_stride(cfg, schedule, fps_rx)
    assert (res.value, res.reason) == expected


# ------------------------------ Flujo completo --------------------------------


def test_ideal_round_trip_decodes_every_packet(gray_lab, small_modulation):
    n = 6
    enc = encode_video([gray_lab()] * n, PayloadPlan(song_id=1).payloads(n), small_modulation(delta_e00=1.0))
    report = stream_decode(capture(enc, ChannelParams()), DecoderConfig())
    m = report.metrics
    assert m is not None
    assert m.psr == 1.0 and m.false_decodes == 0
    # primer par en fase y luego uno por paquete
    assert report.attempts == n
    assert report.attempted_pairs == [1, 3, 5, 7, 9, 11]
    assert m.response_time_ms == pytest.approx([1000.0 / 60] * n)


def test_latency_uses_injected_clock(gray_lab, small_modulation):
    ticks = iter(range(0, 1000))
    enc = encode_video([gray_lab()] * 2, PayloadPlan().payloads(2), small_modulation())
    report = stream_decode(capture(enc, ChannelParams()), DecoderConfig(), clock=lambda: float(next(ticks)))
    assert all(r.latency_ms == pytest.approx(1000.0) for r in report.results)


def test_dropped_frame_flips_parity_and_resyncs(gray_lab, small_modulation):
    n, r = 20, 5
    enc = encode_video([gray_lab()] * n, PayloadPlan().payloads(n), small_modulation())
    cap = capture(enc, ChannelParams(forced_drops=[21]))
    report = stream_decode(cap, DecoderConfig(resync_failures=r))

    assert report.sync_losses == 1
    decoded = [res.payload.frame_num for res in report.results]
    # paquete 10 pierde un frame; los cinco pares siguientes quedan fuera de fase
    assert decoded == list(range(10)) + list(range(15, 20))
    assert report.metrics.psr == pytest.approx(15 / 20)


@pytest.mark.parametrize("mode,extra", [("step4", 0), ("trivial4", 1)])
def test_four_frame_modes_sync_once_per_code(gray_lab, small_modulation, mode, extra):
    n = 5
    mp = small_modulation(delta_e00=2.0, mode=mode, fps_tx=120)
    enc = encode_video([gray_lab()] * n, PayloadPlan().payloads(n), mp)
    report = stream_decode(capture(enc, ChannelParams()), DecoderConfig())
    assert report.stride == 4
    assert report.metrics.psr == 1.0
    assert report.attempts == n + extra


def test_double_rate_camera_widens_stride(gray_lab, small_modulation):
    n = 4
    enc = encode_video([gray_lab()] * n, PayloadPlan().payloads(n), small_modulation())
    report = stream_decode(capture(enc, ChannelParams(fps_rx=120)), DecoderConfig())
    assert report.stride == 4
    assert report.metrics.psr == 1.0
