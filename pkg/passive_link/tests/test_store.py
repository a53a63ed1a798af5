# passive_link/tests/test_store.py
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from passive_link.codec.channel import capture
from passive_link.codec.dto import ChannelParams, PayloadPlan, StoreManifest
from passive_link.codec.encoder import encode_video
from passive_link.codec.exceptions import SchemaMismatch, StoreError
from passive_link.codec.frames import RgbFrame
from passive_link.codec.schema import CAPTURE_FILE, MANIFEST_FILE, SCHEDULE_FILE
from passive_link.codec.store import (
    FrameStore, read_captured, read_encoded, read_model, write_captured, write_encoded, write_json,
)


# ------------------------------ Helpers --------------------------------------


def _color_frames(rng: np.random.Generator, n: int = 3) -> list:
    return [RgbFrame(rng.integers(0, 256, size=(12, 16, 3), dtype=np.uint8)) for _ in range(n)]


# ------------------------------ FrameStore ------------------------------------


def test_rgb_store_round_trip(tmp_path: Path, rng):
    frames = _color_frames(rng)
    FrameStore.write(tmp_path / "s", frames, fps=30)
    store = FrameStore.open(tmp_path / "s")
    assert len(store) == 3 and store.manifest.pixel_format == "rgb24"
    assert all(np.array_equal(a.data, b.data) for a, b in zip(frames, store.read_all_rgb()))
    assert sorted(p.name for p in (tmp_path / "s").glob("frame_*")) == [
        "frame_000000.ppm", "frame_000001.ppm", "frame_000002.ppm",
    ]


def test_gray_store_round_trip(tmp_path: Path):
    frames = [RgbFrame.gray(v, 8, 6) for v in (0, 77, 255)]
    FrameStore.write(tmp_path / "g", frames, fps=60, pixel_format="gray8")
    store = FrameStore.open(tmp_path / "g")
    assert store.ext == "pgm"
    assert [int(f.data[0, 0, 0]) for f in store.read_all_rgb()] == [0, 77, 255]


def test_gray8_rejects_color(tmp_path: Path, rng):
    with pytest.raises(StoreError):
        FrameStore.write(tmp_path / "x", _color_frames(rng, 1), fps=30, pixel_format="gray8")


def test_open_errors(tmp_path: Path, rng):
    with pytest.raises(StoreError):
        FrameStore.open(tmp_path / "vacio")

    FrameStore.write(tmp_path / "s", _color_frames(rng), fps=30)
    (tmp_path / "s" / "frame_000001.ppm").unlink()
    with pytest.raises(StoreError):
        FrameStore.open(tmp_path / "s")

    empty = tmp_path / "e"
    empty.mkdir()
    write_json(empty / MANIFEST_FILE, StoreManifest(fps=30, width=4, height=4, count=0))
    with pytest.raises(StoreError):
        FrameStore.open(empty)


def test_manifest_schema_mismatch(tmp_path: Path):
    d = tmp_path / "m"
    d.mkdir()
    (d / MANIFEST_FILE).write_text('{"fps": -1, "width": 4, "height": 4, "count": 0}', encoding="utf-8")
    with pytest.raises(SchemaMismatch):
        FrameStore.open(d)


def test_rewrite_removes_stale_frames(tmp_path: Path, rng):
    FrameStore.write(tmp_path / "s", _color_frames(rng, 3), fps=30)
    FrameStore.write(tmp_path / "s", _color_frames(rng, 2), fps=30)
    assert len(FrameStore.open(tmp_path / "s")) == 2


# ------------------------------ Secuencias ------------------------------------


def test_encoded_round_trip(tmp_path: Path, gray_lab, small_modulation):
    enc = encode_video([gray_lab()] * 3, PayloadPlan().payloads(3), small_modulation())
    write_encoded(tmp_path / "enc", enc)
    assert (tmp_path / "enc" / SCHEDULE_FILE).exists()
    back = read_encoded(tmp_path / "enc")
    assert back.schedule == enc.schedule
    assert back.roles == enc.roles
    for a, b in zip(back.frames, enc.frames):
        assert np.abs(a.L - b.L).max() < 1.0


@pytest.mark.parametrize("mode", ["pair", "step4", "trivial4"])
def test_period_mean_survives_8bit_files(tmp_path: Path, texture_lab, small_modulation, mode):
    # tras cuantizar a 8 bits, la media temporal por código sigue a <0.5 L* del frame fuente
    lab = texture_lab(128, 128)
    mp = small_modulation(mode=mode, fps_tx=60 if mode == "pair" else 120)
    enc = encode_video([lab] * 2, PayloadPlan().payloads(2), mp)
    write_encoded(tmp_path / mode, enc)
    back = read_encoded(tmp_path / mode)
    for e in back.schedule.packets:
        mean = np.mean([f.L for f in back.frames[e.start_frame:e.end_frame]], axis=0)
        assert np.abs(mean - lab.L).max() < 0.5


def test_read_encoded_requires_schedule(tmp_path: Path):
    FrameStore.write(tmp_path / "s", [RgbFrame.gray(10, 4, 4)], fps=60)
    with pytest.raises(StoreError):
        read_encoded(tmp_path / "s")


def test_captured_round_trip_keeps_drops(tmp_path: Path, gray_lab, small_modulation):
    enc = encode_video([gray_lab()] * 2, PayloadPlan().payloads(2), small_modulation())
    cap = capture(enc, ChannelParams(forced_drops=[1], seed=4))
    write_captured(tmp_path / "cap", cap)
    assert (tmp_path / "cap" / CAPTURE_FILE).exists()
    assert len(FrameStore.open(tmp_path / "cap")) == 3

    back = read_captured(tmp_path / "cap")
    assert back.frames[1] is None
    assert back.dropped_slots == [1]
    assert back.timestamps_ms == pytest.approx(cap.timestamps_ms)
    assert back.params.seed == 4
    assert back.schedule == enc.schedule


def test_read_captured_without_sidecar(tmp_path: Path):
    FrameStore.write(tmp_path / "s", [RgbFrame.gray(v, 4, 4) for v in (10, 20, 30)], fps=50)
    cap = read_captured(tmp_path / "s")
    assert cap.timestamps_ms == pytest.approx([0.0, 20.0, 40.0])
    assert cap.source_index == [0, 1, 2] and cap.schedule is None


def test_read_model_roundtrip(tmp_path: Path):
    m = StoreManifest(fps=25, width=2, height=3, count=1, pixel_format="gray8")
    write_json(tmp_path / "m.json", m)
    assert read_model(tmp_path / "m.json", StoreManifest) == m
    assert (tmp_path / "m.json").read_text(encoding="utf-8").endswith("\n")
