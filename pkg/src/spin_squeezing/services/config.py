"""
Módulo para gestión centralizada de la configuración numérica y de ejecución.
Permite acceder a tolerancias, límites de capacidad y parámetros del solver desde un único punto.
"""
import copy
import json
import logging
import os
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

# Cargar variables de entorno desde .env
load_dotenv()

logger = logging.getLogger(__name__)

ENV_PREFIX = 'SPINSQ_'

# Variables de entorno con nombre corto
ENV_ALIASES = {
    'SPINSQ_MAX_QUBITS': 'numerics.max_qubits',
    'SPINSQ_JOBS': 'parallel.jobs',
    'SPINSQ_LOG_LEVEL': 'logging.level',
}


class ConfigManager:
    """Gestor centralizado de configuración para la librería y la CLI."""

    DEFAULTS = {
        'app': {
            'name': 'SpinSqueezing',
            'version': '0.1.0',
            'environment': os.getenv('ENVIRONMENT', 'development'),
        },
        'numerics': {
            'max_qubits': 12,
            'hermitian_tol': 1e-10,
            'trace_tol': 1e-10,
            'psd_tol': 1e-9,
            'violation_tol': 1e-9,
            'degeneracy_tol': 1e-9,
            'orthogonality_tol': 1e-9,
            'applicability_tol': 1e-12,
        },
        'solver': {
            'tol': 1e-3,
            'scan_points': 64,
            't_min_ratio': 0.01,
            # 2x el mayor T_c relevante de cada familia
            't_max': {
                'heisenberg_chain': 12.0,
                'xy_chain': 7.0,
                'heisenberg_complete': 18.0,
                'xy_complete': 10.0,
                'lmg': 10.0,
                'ising_transverse': 5.0,
                'nanotube': 800.0,
                'custom': 10.0,
            },
        },
        'sampling': {
            'mixing_components': 4,
            'aligned_fraction': 0.5,
            'hull_trials': 1_000_000,
        },
        'cache': {
            'enabled': True,
            'max_entries': 128,
        },
        'parallel': {
            'jobs': None,
        },
        'logging': {
            'level': 'WARNING',
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        },
        'output': {
            'csv_digits': 17,
            'summary_digits': 4,
        },
    }

    def __init__(self, config_path: Optional[str] = None):
        """
        Inicializa el gestor de configuración.

        Args:
            config_path: Ruta al archivo de configuración JSON (opcional).
                        Si no se proporciona, se usan los valores por defecto.
        """
        self._config = self._load_config(config_path) if config_path else {}
        self._config = self._merge_configs(self.DEFAULTS, self._config)

        # Las variables de entorno tienen prioridad sobre el archivo
        self._load_from_env()

        logger.debug(f"Configuración cargada. Entorno: {self.get('app.environment')}")

    def _load_config(self, config_path: str) -> Dict[str, Any]:
        """Carga la configuración desde un archivo JSON."""
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                config = json.load(f)
            logger.info(f"Configuración cargada desde {config_path}")
            return config
        except FileNotFoundError:
            logger.debug(f"Archivo de configuración no encontrado: {config_path}. Usando valores por defecto.")
            return {}
        except json.JSONDecodeError as e:
            logger.error(f"Error al decodificar el archivo de configuración {config_path}: {e}")
            return {}

    def _merge_configs(self, default: Dict[str, Any], custom: Dict[str, Any]) -> Dict[str, Any]:
        """Combina la configuración por defecto con la personalizada."""
        result = copy.deepcopy(default)

        for key, value in custom.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value

        return result

    def _load_from_env(self):
        """Carga configuración desde variables de entorno."""
        for key, value in os.environ.items():
            if key in ENV_ALIASES:
                self._set_nested(self._config, ENV_ALIASES[key].split('.'), value)
            elif key.startswith(ENV_PREFIX) and '__' in key:
                # SPINSQ_SOLVER__TOL -> solver.tol
                parts = key[len(ENV_PREFIX):].lower().split('__')
                self._set_nested(self._config, parts, value)

    @staticmethod
    def _coerce(value: str) -> Any:
        lowered = value.strip().lower()
        if lowered == 'true':
            return True
        if lowered == 'false':
            return False
        if lowered in ('none', 'null'):
            return None
        try:
            return int(lowered)
        except ValueError:
            pass
        try:
            return float(lowered)
        except ValueError:
            return value

    def _set_nested(self, config: Dict[str, Any], path: List[str], value: Any):
        """Establece un valor anidado en la configuración."""
        if len(path) == 1:
            if isinstance(value, str):
                value = self._coerce(value)
            config[path[0]] = value
        else:
            if not isinstance(config.get(path[0]), dict):
                config[path[0]] = {}
            self._set_nested(config[path[0]], path[1:], value)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Obtiene un valor de configuración por su clave.

        Args:
            key: Clave en formato 'seccion.subseccion.clave'
            default: Valor por defecto si la clave no existe

        Returns:
            El valor de la configuración o el valor por defecto si no existe
        """
        try:
            value = self._config
            for part in key.split('.'):
                value = value[part]
            return value
        except (KeyError, TypeError):
            return default

    def update(self, key: str, value: Any):
        """
        Actualiza un valor de configuración.

        Args:
            key: Clave en formato 'seccion.subseccion.clave'
            value: Nuevo valor
        """
        self._set_nested(self._config, key.split('.'), value)
        logger.debug(f"Configuración actualizada: {key} = {value}")

    def to_dict(self) -> Dict[str, Any]:
        """Devuelve la configuración como un diccionario."""
        return copy.deepcopy(self._config)


_config_manager: Optional[ConfigManager] = None


def init_config(config_path: Optional[str] = None) -> ConfigManager:
    """Crea (o recrea) la instancia global a partir de un archivo opcional."""
    global _config_manager
    _config_manager = ConfigManager(config_path or os.getenv('SPINSQ_CONFIG', 'config.json'))
    return _config_manager


def get_config() -> ConfigManager:
    """Devuelve la instancia global, creándola la primera vez."""
    if _config_manager is None:
        return init_config()
    return _config_manager
