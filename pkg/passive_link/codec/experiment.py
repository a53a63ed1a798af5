# passive_link/codec/experiment.py
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
import itertools
from typing import Dict, List, Tuple
import logging

import numpy as np

from .channel import capture
from .colorspace import srgb_to_lab
from .dto import ChannelParams, EcLiteral, ExperimentSpec, GridSpec, ModeLiteral, ModulationParams, SourceSpec
from .encoder import encode_video
from .frames import LabFrame
from .metrics import compute_metrics
from .receiver import stream_decode
from .schema import CHANNEL_PRESET, DELTA_E00, EC_LEVEL, GAUSSIAN, MODE, MOTION_COMP, TILES
from .synth import load_source

logger = logging.getLogger(__name__)

DEFAULT_SIGMA = 1.0  # cuando la base trae sigma=0 y la condición pide suavizado


@dataclass(frozen=True)
class Condition:
    delta_e00: float
    tiles: int
    ec_level: EcLiteral
    mode: ModeLiteral
    gaussian: bool
    motion_comp: bool
    channel_preset: str

    @property
    def condition_id(self) -> str:
        return (
            f"de{self.delta_e00:.2f}-t{self.tiles}-{self.ec_level}-{self.mode}"
            f"-g{int(self.gaussian)}-m{int(self.motion_comp)}-{self.channel_preset}"
        )

    def as_row(self) -> Dict[str, object]:
        return {
            DELTA_E00: self.delta_e00,
            TILES: self.tiles,
            EC_LEVEL: self.ec_level,
            MODE: self.mode,
            GAUSSIAN: self.gaussian,
            MOTION_COMP: self.motion_comp,
            CHANNEL_PRESET: self.channel_preset,
        }


@dataclass(frozen=True)
class TrialOutcome:
    condition: Condition
    trial: int
    psr: float
    transmitted: int
    successes: int
    attempts: int
    false_decodes: int
    response_time_ms: List[float] = field(default_factory=list)


def expand_grid(grid: GridSpec) -> List[Condition]:
    """Producto cartesiano en orden estable (ΔE00 es el eje más externo)."""
    return [
        Condition(de, tiles, ec, mode, g, mc, preset)
        for de, tiles, ec, mode, g, mc, preset in itertools.product(
            grid.delta_values(), grid.tiles, grid.ec_levels, grid.modes, grid.gaussian, grid.motion_comp,
            grid.channel_presets,
        )
    ]


def condition_modulation(base: ModulationParams, c: Condition) -> ModulationParams:
    sigma = (base.smoothing_sigma or DEFAULT_SIGMA) if c.gaussian else 0.0
    return base.model_copy(
        update={
            "perception": base.perception.model_copy(update={"delta_e00": c.delta_e00}),
            "layout": base.layout.model_copy(update={"count": c.tiles}),
            "ec": c.ec_level,
            "mode": c.mode,
            "smoothing_sigma": sigma,
            "code_fps": None,
        }
    )


def trial_seed(seed: int, trial: int) -> int:
    """Semilla del canal: depende de (seed, trial) y no de la condición (números aleatorios comunes)."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint64)[0])


@lru_cache(maxsize=8)
def _source_labs(source_json: str) -> Tuple[LabFrame, ...]:
    return tuple(srgb_to_lab(f) for f in load_source(SourceSpec.model_validate_json(source_json)))


def run_trial(task: Tuple[ExperimentSpec, Dict[str, ChannelParams], Condition, int]) -> TrialOutcome:
    """Codifica, pasa por el canal y decodifica una condición x trial (ejecutable en otro proceso)."""
    spec, presets, c, trial = task
    labs = _source_labs(spec.source.model_dump_json())
    frames = [labs[i % len(labs)] for i in range(spec.packets)]
    enc = encode_video(frames, spec.payload.payloads(spec.packets), condition_modulation(spec.modulation, c))

    cp = presets[c.channel_preset].model_copy(update={"seed": trial_seed(spec.seed, trial)})
    cap = capture(enc, cp)
    report = stream_decode(cap, spec.decoder.model_copy(update={"motion_comp": c.motion_comp}))
    m = report.metrics or compute_metrics(report.results, enc.schedule, attempts=report.attempts)
    return TrialOutcome(
        condition=c,
        trial=trial,
        psr=m.psr,
        transmitted=m.transmitted,
        successes=m.successes,
        attempts=m.attempts,
        false_decodes=m.false_decodes,
        response_time_ms=list(m.response_time_ms),
    )


def run_experiment(spec: ExperimentSpec, presets: Dict[str, ChannelParams], workers: int = 1) -> List[TrialOutcome]:
    conditions = expand_grid(spec.grid)
    tasks = [(spec, presets, c, t) for c in conditions for t in range(spec.trials)]
    logger.info("Experimento '%s': %s condiciones x %s trials (workers=%s)", spec.name, len(conditions), spec.trials, workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_trial, tasks))
    else:
        outcomes = [run_trial(t) for t in tasks]
    order = {c: i for i, c in enumerate(conditions)}
    return sorted(outcomes, key=lambda o: (order[o.condition], o.trial))
