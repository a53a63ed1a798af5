# passive_link/codec/cache.py
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
import hashlib
from typing import Any, Callable, Hashable, Optional, Tuple

import numpy as np

from .config import CACHE_ITEMS
from .dto import ModulationParams, Payload


@dataclass(frozen=True)
class CacheConfig:
    max_items: int = CACHE_ITEMS


class LRUCache:
    """Memoiza planos de bits y mapas de profundidad dentro de un proceso; cuenta aciertos y fallos."""
    def __init__(self, cfg: Optional[CacheConfig] = None) -> None:
        self._max = (cfg or CacheConfig()).max_items
        self._items: "OrderedDict[Hashable, Any]" = OrderedDict()
        self.hits = 0
        self.misses = 0

    def get(self, key: Hashable) -> Any:
        if key not in self._items:
            return None
        self._items.move_to_end(key)
        return self._items[key]

    def put(self, key: Hashable, value: Any) -> None:
        self._items[key] = value
        self._items.move_to_end(key)
        while len(self._items) > self._max:
            self._items.popitem(last=False)

    def clear(self) -> None:
        self._items.clear()

    def __len__(self) -> int:
        return len(self._items)


def digest_array(arr: np.ndarray) -> str:
    """Huella estable del contenido (forma + bytes)."""
    h = hashlib.blake2b(digest_size=16)
    h.update(repr(arr.shape).encode())
    h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def build_plane_key(p: Payload, mp: ModulationParams, width: int, height: int) -> Tuple[Any, ...]:
    """Clave del plano suavizado: solo lo que cambia el plano."""
    lay = mp.layout
    return (
        "plane",
        p.serialize(),
        mp.ec,
        lay.count,
        lay.module_px,
        lay.quiet_zone,
        lay.version,
        width,
        height,
        mp.smoothing_sigma,
    )


def build_depth_key(L: np.ndarray, mp: ModulationParams) -> Tuple[Any, ...]:
    t = mp.texture
    return (
        "depth",
        digest_array(L),
        mp.perception.delta_e00,
        mp.perception.k_l,
        t.window,
        t.k,
    )


def get_or_compute(cache: LRUCache, key: Tuple[Any, ...], compute_fn: Callable[[], Any]) -> Any:
    """Lectura con cómputo perezoso; actualiza los contadores hits/misses."""
    val = cache.get(key)
    if val is not None:
        cache.hits += 1
        return val
    cache.misses += 1
    val = compute_fn()
    cache.put(key, val)
    return val
