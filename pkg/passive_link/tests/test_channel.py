# passive_link/tests/test_channel.py
from __future__ import annotations

import numpy as np
import pytest

from passive_link.codec.channel import (
    CHANNEL_PRESETS, DISPLAY_GAIN, SimilarityTransform, apply_motion_jitter, apply_rolling_shutter, capture,
    occlusion_mask, resample_schedule, sample_transform,
)
from passive_link.codec.dto import ChannelParams, JitterParams, PayloadPlan
from passive_link.codec.encoder import encode_video
from passive_link.codec.exceptions import FpsViolation
from passive_link.codec.frames import DROPPED, LabFrame


# ------------------------------ Helpers --------------------------------------


@pytest.fixture()
def encoded(gray_lab, small_modulation):
    return encode_video([gray_lab()] * 4, PayloadPlan().payloads(4), small_modulation())


def _ramp(h: int, w: int, value: float) -> LabFrame:
    L = np.full((h, w), value)
    return LabFrame(L=L, a=np.zeros((h, w)), b=np.zeros((h, w)))


# ------------------------------ Remuestreo ------------------------------------


def test_resample_same_rate_is_identity():
    assert np.array_equal(resample_schedule(10, 60, 60), np.arange(10))


def test_resample_double_rate_holds_each_frame():
    sched = resample_schedule(5, 60, 120)
    assert sched.tolist() == [0, 0, 1, 1, 2, 2, 3, 3, 4, 4]


def test_resample_non_integer_ratio_never_skips_frames():
    sched = resample_schedule(30, 60, 90)
    assert len(sched) == 45
    assert set(sched.tolist()) == set(range(30))


def test_camera_slower_than_display(encoded):
    with pytest.raises(FpsViolation):
        capture(encoded, ChannelParams(fps_rx=30))


# ------------------------------ Captura ---------------------------------------


def test_ideal_capture_is_lossless(encoded):
    cap = capture(encoded, CHANNEL_PRESETS["ideal"])
    assert len(cap.frames) == len(encoded.frames)
    for got, sent in zip(cap.frames, encoded.frames):
        assert got is not None and np.array_equal(got.L, sent.L)
    assert cap.timestamps_ms == pytest.approx([k * 1000.0 / 60 for k in range(8)])
    assert cap.dropped_slots == []


def test_seeded_capture_is_reproducible(encoded):
    cp = CHANNEL_PRESETS["iso400-s1000"].model_copy(update={"seed": 7})
    a, b = capture(encoded, cp), capture(encoded, cp)
    c = capture(encoded, cp.model_copy(update={"seed": 8}))
    assert all(np.array_equal(x.L, y.L) for x, y in zip(a.frames, b.frames))
    assert not np.array_equal(a.frames[0].L, c.frames[0].L)


def test_forced_drops(encoded):
    cap = capture(encoded, ChannelParams(forced_drops=[3, 5]))
    assert cap.frames[3] is None and cap.frames[5] is None
    assert cap.source_index[3] == DROPPED
    assert cap.dropped_slots == [3, 5]
    assert [k for k, _ in cap.delivered()] == [0, 1, 2, 4, 6, 7]


def test_display_profile_scales_lightness(encoded):
    cap = capture(encoded, ChannelParams(display="modified-lcd"))
    assert np.allclose(cap.frames[0].L, encoded.frames[0].L * DISPLAY_GAIN["modified-lcd"])


def test_noise_keeps_lightness_in_range(encoded):
    cap = capture(encoded, ChannelParams(noise_sigma=50.0, seed=1))
    for f in cap.frames:
        assert f.L.min() >= 0.0 and f.L.max() <= 100.0


# ------------------------------ Efectos ---------------------------------------


def test_rolling_shutter_mixes_top_rows():
    prev, curr = _ramp(8, 4, 10.0), _ramp(8, 4, 20.0)
    out = apply_rolling_shutter(curr, prev, 0.25)
    assert np.all(out.L[:2] == 10.0) and np.all(out.L[2:] == 20.0)
    assert apply_rolling_shutter(curr, prev, 0.0) is curr


def test_disabled_jitter_is_identity(rng):
    t = sample_transform(rng, JitterParams())
    assert t.is_identity


def test_jitter_respects_bounds(rng):
    j = JitterParams(translation_px_max=3.0, rotation_deg_max=0.5, scale_max=0.01)
    for _ in range(50):
        t = sample_transform(rng, j)
        assert abs(t.tx) <= 3.0 and abs(t.ty) <= 3.0
        assert abs(t.angle_deg) <= 0.5 and abs(t.scale - 1.0) <= 0.01


def test_integer_translation_shifts_content():
    L = np.zeros((20, 20))
    L[5, 5] = 100.0
    f = LabFrame(L=L, a=np.zeros_like(L), b=np.zeros_like(L))
    out = apply_motion_jitter(f, SimilarityTransform(tx=2.0, ty=1.0))
    assert out.L[6, 7] == pytest.approx(100.0)


def test_occlusion_covers_half_of_each_tile(rng):
    boxes = [(0, 0, 10, 10), (20, 0, 30, 10)]
    mask = occlusion_mask(rng, boxes, 1.0, (10, 30))
    assert mask is not None
    assert mask[:, 0:10].sum() == 50 and mask[:, 20:30].sum() == 50
    assert mask[:, 10:20].sum() == 0
    assert occlusion_mask(rng, boxes, 0.0, (10, 30)) is None


def test_occlusion_holds_for_whole_code_period(encoded):
    cap = capture(encoded, ChannelParams(occlusion_prob=1.0, occluder_lightness=15.0, seed=3))
    # ambos frames de un paquete comparten máscara: su diferencia es 0 en la zona tapada
    covered = cap.frames[0].L == 15.0
    assert covered.any()
    assert np.all(cap.frames[1].L[covered] == 15.0)
