# passive_link/codec/formatters.py
from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import logging
import math

import pandas as pd

from .dto import CommandLiteral, CommandResult, MetaInfo
from .experiment import TrialOutcome
from .metrics import percentile_at, response_time_cdf, rt_percentile, threshold_fractions
from .schema import (
    CDF_COLS, CDF_DIR, CONDITION_COLS, CONDITION_ID, DECODED, PSR, PSR_MEAN, PSR_STD, RESULT_COLS, RESULTS_CSV,
    RT_P50, RT_P95, SUMMARY_COLS, SUMMARY_CSV, TRIAL, TRIALS,
)

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6f"


# —— Resultado de comando ——

def build_meta(seed: Optional[int] = None, elapsed_ms: float = 0.0) -> MetaInfo:
    ts = datetime.now(tz=timezone.utc).isoformat(timespec="seconds")
    return MetaInfo(generated_at=ts, seed=seed, elapsed_ms=round(elapsed_ms, 3))


def to_result(
    command: CommandLiteral,
    data: Dict[str, Any],
    out_dir: Optional[Path] = None,
    warnings: Optional[List[str]] = None,
    seed: Optional[int] = None,
    elapsed_ms: float = 0.0,
) -> CommandResult:
    return CommandResult(
        ok=True,
        command=command,
        out_dir=str(out_dir) if out_dir is not None else None,
        warnings=warnings or [],
        meta=build_meta(seed=seed, elapsed_ms=elapsed_ms),
        data=data,
    )


# —— Reportes CSV ——

def results_frame(outcomes: Sequence[TrialOutcome]) -> pd.DataFrame:
    """Una fila por (condición, trial) en el orden de `RESULT_COLS`."""
    rows: List[Dict[str, Any]] = []
    for o in outcomes:
        rows.append({
            CONDITION_ID: o.condition.condition_id,
            TRIAL: o.trial,
            **o.condition.as_row(),
            PSR: o.psr,
            RT_P50: rt_percentile(o.response_time_ms, 50),
            RT_P95: rt_percentile(o.response_time_ms, 95),
        })
    return pd.DataFrame(rows, columns=RESULT_COLS)


def _pooled_samples(outcomes: Sequence[TrialOutcome]) -> Dict[str, List[float]]:
    pooled: Dict[str, List[float]] = {}
    for o in outcomes:
        pooled.setdefault(o.condition.condition_id, []).extend(o.response_time_ms)
    return pooled


def summary_frame(outcomes: Sequence[TrialOutcome]) -> pd.DataFrame:
    """Agrega trials por condición: PSR medio, percentiles de la CDF conjunta y fracciones por umbral."""
    if not outcomes:
        return pd.DataFrame(columns=SUMMARY_COLS)
    results = results_frame(outcomes)
    grouped = results.groupby(CONDITION_ID, sort=False)
    summary = grouped[CONDITION_COLS].first()
    summary[TRIALS] = grouped[TRIAL].count()
    summary[PSR_MEAN] = grouped[PSR].mean()
    summary[PSR_STD] = grouped[PSR].std(ddof=0)
    summary = summary.reset_index()

    pooled = _pooled_samples(outcomes)
    extra: List[Dict[str, Any]] = []
    for cid in summary[CONDITION_ID]:
        samples = pooled.get(cid, [])
        cdf = response_time_cdf(samples)
        p50, p95 = percentile_at(cdf, 0.50), percentile_at(cdf, 0.95)
        extra.append({
            DECODED: len(samples),
            RT_P50: math.nan if p50 is None else p50,
            RT_P95: math.nan if p95 is None else p95,
            **{f"frac_{k}": v for k, v in threshold_fractions(samples).items()},
        })
    return pd.concat([summary, pd.DataFrame(extra)], axis=1)[SUMMARY_COLS]


def cdf_frames(outcomes: Sequence[TrialOutcome]) -> Dict[str, pd.DataFrame]:
    return {
        cid: pd.DataFrame(response_time_cdf(samples), columns=CDF_COLS)
        for cid, samples in _pooled_samples(outcomes).items()
    }


def _to_csv(df: pd.DataFrame, path: Path) -> None:
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")


def write_reports(out_dir: Path, outcomes: Sequence[TrialOutcome]) -> Dict[str, Any]:
    """results.csv, summary.csv y cdf/<condition_id>.csv; sin marcas de tiempo (salida reproducible)."""
    out_dir = Path(out_dir)
    cdf_dir = out_dir / CDF_DIR
    cdf_dir.mkdir(parents=True, exist_ok=True)

    results = results_frame(outcomes)
    summary = summary_frame(outcomes)
    _to_csv(results, out_dir / RESULTS_CSV)
    _to_csv(summary, out_dir / SUMMARY_CSV)
    cdfs = cdf_frames(outcomes)
    for cid, df in cdfs.items():
        _to_csv(df, cdf_dir / f"{cid}.csv")

    logger.info("Reportes escritos en %s (%s filas, %s condiciones)", out_dir, len(results), len(summary))
    return {
        "rows": int(len(results)),
        "conditions": int(len(summary)),
        "results_csv": str(out_dir / RESULTS_CSV),
        "summary_csv": str(out_dir / SUMMARY_CSV),
        "cdf_files": len(cdfs),
    }
