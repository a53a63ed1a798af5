# passive_link/tests/conftest.py
from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from passive_link.codec.colorspace import srgb_to_lab
from passive_link.codec.dto import ModulationParams, PerceptionParams, TileLayout
from passive_link.codec.frames import LabFrame
from passive_link.codec.synth import texture_frame, uniform_frame


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: barridos largos (oráculo GLCM, ruido, paralelismo)")


# ------------------------------ Fábricas --------------------------------------


@pytest.fixture()
def gray_lab() -> Callable[..., LabFrame]:
    """Frame Lab uniforme; gris 48 => L* ≈ 19.8."""
    def _make(gray: int = 48, width: int = 96, height: int = 96) -> LabFrame:
        return srgb_to_lab(uniform_frame(gray, width, height))
    return _make


@pytest.fixture()
def texture_lab() -> Callable[..., LabFrame]:
    def _make(width: int = 128, height: int = 128, seed: int = 3, amplitude: float = 30.0, sigma: float = 3.0) -> LabFrame:
        return srgb_to_lab(texture_frame(width, height, 128, amplitude, sigma, seed))
    return _make


@pytest.fixture()
def small_modulation() -> Callable[..., ModulationParams]:
    """Módulos de 3 px: un QR v1 con zona de silencio mide 87 px y cabe en 96x96."""
    def _make(delta_e00: float = 2.0, **kwargs) -> ModulationParams:
        layout = kwargs.pop("layout", TileLayout(module_px=3))
        return ModulationParams(perception=PerceptionParams(delta_e00=delta_e00), layout=layout, **kwargs)
    return _make


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
