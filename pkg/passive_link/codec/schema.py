# passive_link/codec/schema.py
from __future__ import annotations

from typing import Final, List

# Nombres canónicos de archivos (evita strings sueltos en el resto del código)
MANIFEST_FILE: Final[str] = "manifest.json"
SCHEDULE_FILE: Final[str] = "schedule.json"
CAPTURE_FILE: Final[str] = "capture.json"
PACKETS_FILE: Final[str] = "packets.json"
METRICS_FILE: Final[str] = "metrics.json"
POSITIONS_FILE: Final[str] = "positions.json"
RESULTS_CSV: Final[str] = "results.csv"
SUMMARY_CSV: Final[str] = "summary.csv"
CDF_DIR: Final[str] = "cdf"

FRAME_PATTERN: Final[str] = "frame_{index:06d}.{ext}"
PIXEL_FORMAT_EXT: Final[dict] = {"rgb24": "ppm", "gray8": "pgm"}

# Columnas de results.csv (orden estable)
CONDITION_ID: Final[str] = "condition_id"
TRIAL: Final[str] = "trial"
DELTA_E00: Final[str] = "delta_e00"
TILES: Final[str] = "tiles"
EC_LEVEL: Final[str] = "ec_level"
MODE: Final[str] = "mode"
GAUSSIAN: Final[str] = "gaussian"
MOTION_COMP: Final[str] = "motion_comp"
CHANNEL_PRESET: Final[str] = "channel_preset"
PSR: Final[str] = "psr"
RT_P50: Final[str] = "rt_p50_ms"
RT_P95: Final[str] = "rt_p95_ms"

CONDITION_COLS: Final[List[str]] = [DELTA_E00, TILES, EC_LEVEL, MODE, GAUSSIAN, MOTION_COMP, CHANNEL_PRESET]
RESULT_COLS: Final[List[str]] = [CONDITION_ID, TRIAL, *CONDITION_COLS, PSR, RT_P50, RT_P95]

# Columnas de summary.csv (una fila por condición)
TRIALS: Final[str] = "trials"
PSR_MEAN: Final[str] = "psr_mean"
PSR_STD: Final[str] = "psr_std"
DECODED: Final[str] = "decoded"
EXPERIENCE_LEVELS: Final[List[str]] = ["instantaneous", "immediate", "transient", "beyond"]
SUMMARY_COLS: Final[List[str]] = [
    CONDITION_ID, *CONDITION_COLS, TRIALS, PSR_MEAN, PSR_STD, DECODED, RT_P50, RT_P95,
    *[f"frac_{k}" for k in EXPERIENCE_LEVELS],
]

# Columnas de los CDF por condición
RESPONSE_MS: Final[str] = "response_ms"
CDF: Final[str] = "cdf"
CDF_COLS: Final[List[str]] = [RESPONSE_MS, CDF]

# Umbrales de experiencia de usuario (ms)
INSTANTANEOUS_MS: Final[float] = 300.0
IMMEDIATE_MS: Final[float] = 1000.0
TRANSIENT_MS: Final[float] = 5000.0
