"""
Módulo para monitorización de los cálculos largos.
Registra eventos, métricas de duración y excepciones en el log local.
"""
import logging
import threading
import time
import traceback
import uuid
from datetime import datetime, timezone
from functools import wraps
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class Monitor:
    """Sistema centralizado de monitoreo para el solver y las tablas."""

    def __init__(self, app_name: str = "SpinSqueezing"):
        """
        Inicializa el sistema de monitorización.

        Args:
            app_name: Nombre de la aplicación para identificarla en los datos
        """
        self.app_name = app_name
        self.timing_stats: Dict[str, Dict[str, float]] = {}
        self._lock = threading.Lock()

    def log_event(self, event_name: str, properties: Optional[Dict[str, Any]] = None) -> None:
        """
        Registra un evento personalizado.

        Args:
            event_name: Nombre del evento
            properties: Propiedades adicionales del evento
        """
        properties = dict(properties or {})
        properties.update({
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "app_name": self.app_name,
        })
        logger.info(f"Evento: {event_name} - {properties}")

    def track_metric(self, metric_name: str, value: float, properties: Optional[Dict[str, Any]] = None) -> None:
        """
        Registra una métrica y actualiza sus estadísticas acumuladas.

        Args:
            metric_name: Nombre de la métrica
            value: Valor numérico de la métrica
            properties: Propiedades/dimensiones adicionales
        """
        with self._lock:
            stats = self.timing_stats.setdefault(metric_name, {
                "count": 0, "total": 0.0, "min": float('inf'), "max": 0.0,
            })
            stats["count"] += 1
            stats["total"] += value
            stats["min"] = min(stats["min"], value)
            stats["max"] = max(stats["max"], value)
        logger.info(f"Métrica: {metric_name}={value:.6g} {properties or {}}")

    def track_exception(self, exception: Exception, properties: Optional[Dict[str, Any]] = None) -> None:
        """
        Registra una excepción.

        Args:
            exception: La excepción a registrar
            properties: Propiedades adicionales del contexto
        """
        properties = dict(properties or {})
        properties.update({
            "exception_type": type(exception).__name__,
            "exception_message": str(exception),
            "stack_trace": traceback.format_exc(),
            "app_name": self.app_name,
        })
        logger.error(f"Excepción: {type(exception).__name__} - {properties['exception_message']}")
        logger.debug(properties["stack_trace"])

    def get_stats(self) -> Dict[str, Dict[str, float]]:
        """
        Obtiene estadísticas acumuladas de cada métrica.

        Returns:
            Diccionario con count, total, min, max y avg por métrica
        """
        with self._lock:
            result = {}
            for name, stats in self.timing_stats.items():
                entry = dict(stats)
                if stats["count"]:
                    entry["avg"] = stats["total"] / stats["count"]
                result[name] = entry
            return result


def measure_execution_time(monitor_attr='monitor'):
    """
    Decorador para medir tiempo de ejecución de un método y registrarlo como métrica.

    Args:
        monitor_attr: Nombre del atributo que contiene el monitor en la clase

    Returns:
        Función decorada que mide y reporta su tiempo de ejecución
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            monitor = getattr(args[0], monitor_attr, None) if args else None
            if not monitor:
                return func(*args, **kwargs)

            execution_id = str(uuid.uuid4())
            function_name = func.__name__
            start_time = time.perf_counter()
            monitor.log_event(f"{function_name}.start", {"execution_id": execution_id})

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                duration = time.perf_counter() - start_time
                monitor.track_metric(f"{function_name}.duration", duration,
                                     {"execution_id": execution_id, "status": "error"})
                monitor.track_exception(e, {"function": function_name, "execution_id": execution_id})
                raise

            duration = time.perf_counter() - start_time
            monitor.track_metric(f"{function_name}.duration", duration,
                                 {"execution_id": execution_id, "status": "success"})
            monitor.log_event(f"{function_name}.complete",
                              {"execution_id": execution_id, "duration": duration, "status": "success"})
            return result
        return wrapper
    return decorator

