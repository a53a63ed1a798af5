# passive_link/codec/commands/base.py
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Protocol, Type
import logging

from pydantic import BaseModel

from ..config import AppConfig
from ..exceptions import InvalidParam

logger = logging.getLogger(__name__)


@dataclass
class CommandOutput:
    data: Dict[str, Any] = field(default_factory=dict)
    out_dir: Optional[Path] = None
    warnings: List[str] = field(default_factory=list)
    seed: Optional[int] = None


class ICommandHandler(Protocol):
    """Contrato de los comandos: request validado -> artefactos en disco + resumen."""
    request_model: Type[BaseModel]

    def run(self, req: Any, cfg: AppConfig) -> CommandOutput: ...


def require_path(value: Optional[Path], flag: str) -> Path:
    if value is None:
        raise InvalidParam(f"Falta {flag}.")
    return Path(value)


def get_handler(command: str) -> ICommandHandler:
    """Devuelve el handler del subcomando (import perezoso)."""
    if command == "encode":
        from .encode import EncodeHandler
        return EncodeHandler()
    if command == "simulate":
        from .simulate import SimulateHandler
        return SimulateHandler()
    if command == "decode":
        from .decode import DecodeHandler
        return DecodeHandler()
    if command == "evaluate":
        from .evaluate import EvaluateHandler
        return EvaluateHandler()
    if command == "sync-demo":
        from .sync_demo import SyncDemoHandler
        return SyncDemoHandler()
    raise InvalidParam(f"Comando no soportado: {command}")
