# passive_link/codec/config.py
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Final

from dotenv import load_dotenv

load_dotenv()

# —— Rutas ——
DATA_DIR: Final[Path] = Path(os.getenv("PASSIVE_LINK_DATA_DIR", "data"))
TRACKS_FILENAME: Final[str] = os.getenv("PASSIVE_LINK_TRACKS", "tracks.json")
TRACKS_PATH: Final[Path] = DATA_DIR / TRACKS_FILENAME
RECIPES_DIR: Final[Path] = Path(os.getenv("PASSIVE_LINK_RECIPES_DIR", str(DATA_DIR / "recipes")))

# —— Logging ——
LOG_LEVEL: Final[str] = os.getenv("PASSIVE_LINK_LOG_LEVEL", "WARNING").upper()

# —— Ejecución ——
CACHE_ITEMS: Final[int] = int(os.getenv("PASSIVE_LINK_CACHE_ITEMS", "64"))
WORKERS:     Final[int] = int(os.getenv("PASSIVE_LINK_WORKERS", "1"))
SEED:        Final[int] = int(os.getenv("PASSIVE_LINK_SEED", "0"))


@dataclass(frozen=True)
class AppConfig:
    """Snapshot inmutable de configuración consumida por el servicio y los comandos."""
    data_dir: Path = DATA_DIR
    tracks_path: Path = TRACKS_PATH
    recipes_dir: Path = RECIPES_DIR
    log_level: str = LOG_LEVEL
    cache_items: int = CACHE_ITEMS
    workers: int = WORKERS
    seed: int = SEED
