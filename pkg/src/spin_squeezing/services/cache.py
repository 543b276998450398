"""
Caché en memoria para resultados numéricos costosos.

Guarda operadores colectivos, matrices de Hamiltonianos y descomposiciones espectrales
para que los barridos de temperatura diagonalicen cada Hamiltoniano una sola vez.
"""
import hashlib
import logging
import threading
from collections import OrderedDict
from functools import wraps
from typing import Any, Callable, Dict, Optional

import numpy as np

from spin_squeezing.services.config import get_config

logger = logging.getLogger(__name__)


def _freeze(value: Any) -> Any:
    """Marca como sólo lectura los arrays (también dentro de tuplas)."""
    if isinstance(value, np.ndarray):
        value.setflags(write=False)
    elif isinstance(value, tuple):
        for item in value:
            _freeze(item)
    elif isinstance(value, dict):
        for item in value.values():
            _freeze(item)
    return value


def array_digest(array: np.ndarray) -> str:
    """Huella estable del contenido y la forma de un array."""
    data = np.ascontiguousarray(array)
    h = hashlib.sha1(data.tobytes())
    h.update(str(data.shape).encode())
    h.update(str(data.dtype).encode())
    return h.hexdigest()


class CacheManager:
    """Caché LRU acotada y segura entre hilos."""

    def __init__(self, max_entries: Optional[int] = None):
        """
        Inicializa la caché.

        Args:
            max_entries: Número máximo de entradas; por defecto `cache.max_entries`.
        """
        self.max_entries = max_entries or int(get_config().get('cache.max_entries', 128))
        self._store: "OrderedDict[str, Any]" = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @property
    def enabled(self) -> bool:
        return bool(get_config().get('cache.enabled', True))

    def get(self, key: str) -> Optional[Any]:
        """
        Obtiene un valor de la caché.

        Returns:
            Valor almacenado o None si no existe
        """
        with self._lock:
            if key not in self._store:
                self.misses += 1
                return None
            self._store.move_to_end(key)
            self.hits += 1
            return self._store[key]

    def set(self, key: str, value: Any) -> bool:
        """Guarda un valor, descartando la entrada menos usada si hace falta."""
        with self._lock:
            self._store[key] = _freeze(value)
            self._store.move_to_end(key)
            while len(self._store) > self.max_entries:
                evicted, _ = self._store.popitem(last=False)
                logger.debug(f"Entrada expulsada de la caché: {evicted}")
        return True

    def delete(self, key: str) -> bool:
        with self._lock:
            return self._store.pop(key, None) is not None

    def clear_all(self) -> bool:
        """Limpia toda la caché."""
        with self._lock:
            self._store.clear()
            self.hits = 0
            self.misses = 0
        return True

    def stats(self) -> Dict[str, int]:
        with self._lock:
            return {'entries': len(self._store), 'hits': self.hits, 'misses': self.misses}


def _default_key(args, kwargs) -> str:
    key = ''
    for arg in args:
        if isinstance(arg, np.ndarray):
            key += f":{array_digest(arg)}"
        elif isinstance(arg, (str, int, float, bool, tuple)) or arg is None:
            key += f":{arg!r}"
        else:
            raise TypeError(f"Argumento no cacheable: {type(arg).__name__}")
    for k, v in sorted(kwargs.items()):
        key += f":{k}={v!r}"
    return key


def cache_result(cache_key_prefix: str = "func", key_fn: Optional[Callable[..., str]] = None):
    """
    Decorador para cachear resultados de funciones puras.

    Args:
        cache_key_prefix: Prefijo para la clave de caché
        key_fn: Función opcional que construye la clave a partir de los argumentos

    Returns:
        Función decorada con caché
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            if not cache_manager.enabled:
                return func(*args, **kwargs)

            suffix = key_fn(*args, **kwargs) if key_fn else _default_key(args, kwargs)
            cache_key = f"{cache_key_prefix}:{func.__name__}{suffix}"

            cached_result = cache_manager.get(cache_key)
            if cached_result is not None:
                logger.debug(f"Caché hit para {cache_key[:80]}")
                return cached_result

            result = func(*args, **kwargs)
            if result is not None:
                cache_manager.set(cache_key, result)
            return result
        return wrapper
    return decorator


# Instancia global del cache manager
cache_manager = CacheManager()
