# passive_link/codec/commands/evaluate.py
from __future__ import annotations

import logging

from ..channel import CHANNEL_PRESETS
from ..config import AppConfig
from ..dto import ExperimentSpec
from ..experiment import run_experiment
from ..formatters import write_reports
from ..validators import validate_experiment
from .base import CommandOutput, require_path

logger = logging.getLogger(__name__)


class EvaluateHandler:
    """ExperimentSpec -> results.csv, summary.csv y cdf/ por condición."""
    request_model = ExperimentSpec

    def run(self, spec: ExperimentSpec, cfg: AppConfig) -> CommandOutput:
        out = require_path(spec.out_dir, "--out")
        presets = {**CHANNEL_PRESETS, **spec.presets}
        validate_experiment(spec, presets)

        workers = spec.workers or cfg.workers
        outcomes = run_experiment(spec, presets, workers=workers)
        data = write_reports(out, outcomes)
        data["name"] = spec.name
        data["workers"] = workers
        return CommandOutput(data=data, out_dir=out, seed=spec.seed)
