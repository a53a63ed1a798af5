# passive_link/cli.py
from __future__ import annotations

import argparse
import dataclasses
from datetime import date, datetime
import json
import logging
import math
from pathlib import Path
import sys
from typing import Any, Dict, List, Optional

import numpy as np

# === Capa de dominio =========================================================
from .codec.config import AppConfig
from .codec.service import UNEXPECTED_ERROR, run_command

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INVALID = 2

COMMANDS = ("encode", "simulate", "decode", "evaluate", "sync-demo")


# ------------------------------- Helpers -------------------------------------
def _json_safe(obj: Any) -> Any:
    """Convierte recursivamente a tipos JSON-serializables."""
    if isinstance(obj, (date, datetime)):
        return obj.isoformat()
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return None
    if isinstance(obj, Path):
        return str(obj)

    # numpy
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    if isinstance(obj, np.ndarray):
        return [_json_safe(x) for x in obj.tolist()]

    # estructuras
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [_json_safe(v) for v in obj]

    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _json_safe(dataclasses.asdict(obj))

    # pydantic v2
    model_dump = getattr(obj, "model_dump", None)
    if callable(model_dump):
        return _json_safe(model_dump(mode="json"))

    return obj


def _load_config(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: se esperaba un objeto JSON en la raíz.")
    return raw


def _resolve_config_path(args: argparse.Namespace, cfg: AppConfig) -> Optional[Path]:
    """--config tiene prioridad; --recipe NOMBRE busca <recipes_dir>/NOMBRE.json."""
    if args.config is not None:
        return args.config
    recipe = getattr(args, "recipe", None)
    if recipe:
        return cfg.recipes_dir / f"{recipe}.json"
    return None


def _apply_overrides(command: str, raw: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    """Los flags de línea de comandos pisan los valores del archivo de configuración."""
    out = dict(raw)
    if args.out is not None:
        out["out_dir" if command == "evaluate" else "out"] = str(args.out)
    for flag in ("input", "schedule", "tracks", "preset", "workers"):
        value = getattr(args, flag, None)
        if value is not None:
            out[flag] = str(value) if isinstance(value, Path) else value
    seed = getattr(args, "seed", None)
    if seed is not None:
        if command == "encode":
            out["source"] = {**out.get("source", {}), "seed": seed}
        else:
            out["seed"] = seed
    return out


def _setup_logging(verbose: int, cfg: AppConfig) -> None:
    if verbose >= 2:
        level: Any = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = cfg.log_level
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="passive-link",
        description="Códigos QR invisibles en video para enlaces pantalla→cámara sobre displays pasivos.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v INFO, -vv DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    def _common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, default=None, help="Archivo JSON con el request del comando")
        p.add_argument("--out", type=Path, default=None, help="Directorio de salida")

    p = sub.add_parser("encode", help="Incrusta paquetes en un store de frames")
    _common(p)
    p.add_argument("--input", type=Path, default=None, help="Store fuente (si falta, se usa source sintético)")
    p.add_argument("--seed", type=int, default=None, help="Semilla de la fuente sintética")

    p = sub.add_parser("simulate", help="Pasa un store codificado por el canal display→cámara")
    _common(p)
    p.add_argument("--input", type=Path, default=None)
    p.add_argument("--preset", default=None, help="Preset de canal (ideal, iso50-s90, handheld, ...)")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("decode", help="Decodifica un store capturado")
    _common(p)
    p.add_argument("--input", type=Path, default=None)
    p.add_argument("--schedule", type=Path, default=None, help="schedule.json alternativo (ground truth)")

    p = sub.add_parser("evaluate", help="Corre una grilla de condiciones y escribe reportes CSV/CDF")
    _common(p)
    p.add_argument("--recipe", default=None, help="Nombre de receta en el directorio de recetas")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("sync-demo", help="Decodifica y resuelve la posición de reproducción")
    _common(p)
    p.add_argument("--input", type=Path, default=None)
    p.add_argument("--tracks", type=Path, default=None, help="Registro de pistas (JSON)")
    return parser


# --------------------------------- main --------------------------------------
def main(argv: Optional[List[str]] = None, app_cfg: Optional[AppConfig] = None) -> int:
    cfg = app_cfg or AppConfig()
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose, cfg)
    command: str = args.command

    try:
        raw = _apply_overrides(command, _load_config(_resolve_config_path(args, cfg)), args)
    except (OSError, ValueError) as exc:
        # json.JSONDecodeError es ValueError
        print(f"passive-link {command}: configuración inválida: {exc}", file=sys.stderr)
        return EXIT_INVALID

    result = run_command(command, raw, app_cfg=cfg)  # type: ignore[arg-type]
    print(json.dumps(_json_safe(result), indent=2, ensure_ascii=False))
    if result.ok:
        return EXIT_OK
    print(f"passive-link {command}: {result.error}", file=sys.stderr)
    return EXIT_UNEXPECTED if result.error == UNEXPECTED_ERROR else EXIT_INVALID
