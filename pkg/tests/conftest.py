import json

import numpy as np
import pytest

from spin_squeezing.core.operators import DensityOperator
from spin_squeezing.services.cache import cache_manager
from spin_squeezing.services.config import init_config


@pytest.fixture(autouse=True)
def fresh_config():
    """Cada prueba parte de la configuración por defecto."""
    config = init_config()
    yield config
    init_config()


@pytest.fixture
def clean_cache():
    """Vacía la caché global antes y después de la prueba."""
    cache_manager.clear_all()
    yield cache_manager
    cache_manager.clear_all()


@pytest.fixture
def singlet_state() -> DensityOperator:
    """Singlete de dos qubits (|01> - |10>)/√2."""
    return DensityOperator.pure(np.array([0, 1, -1, 0]) / np.sqrt(2), (2, 2))


@pytest.fixture
def write_json(tmp_path):
    """Escribe un objeto JSON en un archivo temporal y devuelve su ruta."""
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding='utf-8')
        return str(path)
    return _write
