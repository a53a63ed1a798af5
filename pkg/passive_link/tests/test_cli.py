# passive_link/tests/test_cli.py
from __future__ import annotations

"""
Tests de integración del CLI y del servicio.

Principios:
- Stores sintéticos chicos en tmp_path (rápidos y deterministas).
- Contrato de salida: JSON en stdout con ok/command/data, códigos de salida 0/1/2.
- Cadena completa encode -> simulate -> decode -> sync-demo.
"""

import json
from pathlib import Path
from typing import Any, Dict, List

import pytest

from passive_link.cli import EXIT_INVALID, EXIT_OK, main
from passive_link.codec.config import AppConfig
from passive_link.codec.schema import METRICS_FILE, PACKETS_FILE, POSITIONS_FILE, RESULTS_CSV, SCHEDULE_FILE
from passive_link.codec.service import run_command


# ------------------------------ Helpers --------------------------------------


def _write(path: Path, obj: Dict[str, Any]) -> Path:
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


def _run(capsys, argv: List[str], cfg: AppConfig) -> tuple:
    code = main(argv, app_cfg=cfg)
    out = capsys.readouterr()
    return code, json.loads(out.out) if out.out.strip() else None, out.err


@pytest.fixture()
def cfg(tmp_path: Path) -> AppConfig:
    tracks = _write(tmp_path / "tracks.json", {"tracks": [
        {"id": 1, "title": "Demo", "duration_ms": 60000, "fps_tx": 60},
    ]})
    return AppConfig(data_dir=tmp_path, tracks_path=tracks, recipes_dir=tmp_path / "recipes", seed=0)


@pytest.fixture()
def encode_cfg(tmp_path: Path) -> Path:
    return _write(tmp_path / "encode.json", {
        "source": {"kind": "uniform", "gray": 48, "width": 96, "height": 96},
        "packets": 6,
        "modulation": {"perception": {"delta_e00": 2.0}, "layout": {"module_px": 3}},
        "payload": {"song_id": 1, "first_frame": 0},
    })


# ------------------------------ Cadena completa -------------------------------


def test_full_pipeline(tmp_path: Path, capsys, cfg: AppConfig, encode_cfg: Path):
    enc, cap = tmp_path / "enc", tmp_path / "cap"

    code, out, _ = _run(capsys, ["encode", "--config", str(encode_cfg), "--out", str(enc)], cfg)
    assert code == EXIT_OK and out["ok"] is True
    assert out["data"]["packets"] == 6 and out["data"]["frames"] == 12
    assert (enc / SCHEDULE_FILE).exists()

    code, out, _ = _run(capsys, ["simulate", "--input", str(enc), "--preset", "ideal", "--out", str(cap)], cfg)
    assert code == EXIT_OK and out["data"]["delivered"] == 12

    # canal ideal: los frames capturados son idénticos byte a byte
    for f in sorted(enc.glob("frame_*")):
        assert (cap / f.name).read_bytes() == f.read_bytes()

    code, out, _ = _run(capsys, ["decode", "--input", str(cap)], cfg)
    assert code == EXIT_OK
    assert out["data"]["psr"] == 1.0
    metrics = json.loads((cap / METRICS_FILE).read_text(encoding="utf-8"))
    assert metrics["psr"] == 1.0 and metrics["transmitted"] == 6
    packets = json.loads((cap / PACKETS_FILE).read_text(encoding="utf-8"))
    assert [p["payload"]["frame_num"] for p in packets] == list(range(6))

    code, out, _ = _run(capsys, ["sync-demo", "--input", str(cap)], cfg)
    assert code == EXIT_OK and out["data"]["resolved"] == 6
    positions = json.loads((cap / POSITIONS_FILE).read_text(encoding="utf-8"))
    assert positions[0]["ok"] is True and positions[0]["title"] == "Demo"


def test_encode_is_byte_identical_on_rerun(tmp_path: Path, capsys, cfg: AppConfig, encode_cfg: Path):
    for name in ("a", "b"):
        code, _, _ = _run(capsys, ["encode", "--config", str(encode_cfg), "--out", str(tmp_path / name)], cfg)
        assert code == EXIT_OK
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files_a == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in files_a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_simulate_seed_flag_is_reproducible(tmp_path: Path, capsys, cfg: AppConfig, encode_cfg: Path):
    enc = tmp_path / "enc"
    _run(capsys, ["encode", "--config", str(encode_cfg), "--out", str(enc)], cfg)
    for name in ("s1", "s2"):
        code, out, _ = _run(
            capsys, ["simulate", "--input", str(enc), "--preset", "iso400-s1000", "--seed", "42", "--out", str(tmp_path / name)], cfg
        )
        assert code == EXIT_OK and out["meta"]["seed"] == 42
    frames_1 = sorted((tmp_path / "s1").glob("frame_*"))
    assert frames_1 and len(frames_1) == len(list((tmp_path / "s2").glob("frame_*")))
    for f in frames_1:
        assert (tmp_path / "s2" / f.name).read_bytes() == f.read_bytes()


def test_evaluate_from_recipe(tmp_path: Path, capsys, cfg: AppConfig):
    cfg.recipes_dir.mkdir()
    _write(cfg.recipes_dir / "tiny.json", {
        "name": "tiny",
        "source": {"kind": "uniform", "gray": 48, "width": 96, "height": 96},
        "modulation": {"layout": {"module_px": 3}},
        "grid": {"delta_e00": [2.0]},
        "packets": 3,
    })
    code, out, _ = _run(capsys, ["evaluate", "--recipe", "tiny", "--seed", "5", "--out", str(tmp_path / "rep")], cfg)
    assert code == EXIT_OK
    assert out["data"]["rows"] == 1 and out["meta"]["seed"] == 5
    assert (tmp_path / "rep" / RESULTS_CSV).exists()


# ------------------------------ Errores ---------------------------------------


def test_bad_json_config_exits_invalid(tmp_path: Path, capsys, cfg: AppConfig):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops", encoding="utf-8")
    code, out, err = _run(capsys, ["evaluate", "--config", str(bad), "--out", str(tmp_path / "r")], cfg)
    assert code == EXIT_INVALID and out is None
    assert "configuración inválida" in err


def test_unknown_preset_exits_invalid(tmp_path: Path, capsys, cfg: AppConfig, encode_cfg: Path):
    _run(capsys, ["encode", "--config", str(encode_cfg), "--out", str(tmp_path / "enc")], cfg)
    code, out, err = _run(capsys, ["simulate", "--input", str(tmp_path / "enc"), "--preset", "iso9000", "--out", str(tmp_path / "c")], cfg)
    assert code == EXIT_INVALID
    assert out["ok"] is False and "InvalidParam" in out["error"]
    assert "iso9000" in err


def test_decode_empty_store_exits_invalid(tmp_path: Path, capsys, cfg: AppConfig):
    empty = tmp_path / "empty"
    empty.mkdir()
    _write(empty / "manifest.json", {"fps": 60, "width": 8, "height": 8, "count": 0})
    code, out, _ = _run(capsys, ["decode", "--input", str(empty)], cfg)
    assert code == EXIT_INVALID and "StoreError" in out["error"]


def test_service_reports_validation_errors(cfg: AppConfig):
    res = run_command("decode", {"input": "x", "decoder": {"denoise_ksize": 4}}, app_cfg=cfg)
    assert res.ok is False and res.error.startswith("Request inválido")
    assert "denoise_ksize" in res.data["detail"]


def test_service_requires_input(cfg: AppConfig):
    res = run_command("simulate", {"out": "y"}, app_cfg=cfg)
    assert res.ok is False and "--input" in res.error
