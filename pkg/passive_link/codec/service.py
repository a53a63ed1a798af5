# passive_link/codec/service.py
from __future__ import annotations

from typing import Any, Mapping, Optional
import logging
import time

from pydantic import ValidationError

from .commands.base import get_handler
from .config import AppConfig
from .dto import CommandLiteral, CommandResult
from .exceptions import CodecError
from .formatters import build_meta, to_result

logger = logging.getLogger(__name__)

UNEXPECTED_ERROR = "Unexpected error"


def _elapsed_ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0


def run_command(command: CommandLiteral, raw: Mapping[str, Any], app_cfg: Optional[AppConfig] = None) -> CommandResult:
    """
    Punto de entrada de los comandos del codec:
    handler -> validación del request -> ejecución -> CommandResult.
    Nunca propaga excepciones: los fallos vuelven como ok=False.
    """
    cfg = app_cfg or AppConfig()
    t0 = time.perf_counter()
    try:
        handler = get_handler(command)
        req = handler.request_model.model_validate(dict(raw))
        logger.info("Comando %s iniciado", command)
        out = handler.run(req, cfg)
        logger.info("Comando %s terminado en %.1f ms", command, _elapsed_ms(t0))
        return to_result(
            command, out.data, out_dir=out.out_dir, warnings=out.warnings, seed=out.seed, elapsed_ms=_elapsed_ms(t0)
        )

    except ValidationError as ve:
        logger.exception("Request inválido para %s.", command)
        return CommandResult.failed(command, build_meta(elapsed_ms=_elapsed_ms(t0)), f"Request inválido: {ve.error_count()} error(es)", str(ve))
    except CodecError as ce:
        logger.exception("Error de dominio en %s.", command)
        return CommandResult.failed(command, build_meta(elapsed_ms=_elapsed_ms(t0)), f"{type(ce).__name__}: {ce}")
    except Exception as ex:
        logger.exception("Fallo no controlado en %s.", command)
        return CommandResult.failed(command, build_meta(elapsed_ms=_elapsed_ms(t0)), UNEXPECTED_ERROR, f"{type(ex).__name__}: {ex}")
