"""
Lectura y escritura de los formatos de intercambio: estados, momentos, modelos,
informes, poliedros y tablas CSV.
"""
import io
import json
import logging
import os
import sys
import tempfile
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Sequence, TextIO, Union

import numpy as np
import pandas as pd

from spin_squeezing.core.collective import CollectiveMoments
from spin_squeezing.core.models import HamiltonianSpec
from spin_squeezing.core.operators import DensityOperator
from spin_squeezing.exceptions import ArgumentError
from spin_squeezing.services.config import get_config

logger = logging.getLogger(__name__)


@contextmanager
def output_sink(path: Optional[str] = None) -> Iterator[TextIO]:
    """
    Context manager que acumula la salida y la escribe sólo si no hubo errores.

    Uso:
        with output_sink('informe.json') as out:
            out.write(texto)
    """
    buffer = io.StringIO()
    try:
        yield buffer
    except Exception:
        logger.debug(f"Salida descartada para {path or 'stdout'}")
        raise
    if path is None or path == '-':
        sys.stdout.write(buffer.getvalue())
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.spinsq-')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(buffer.getvalue())
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.info(f"Salida escrita en {path}")


def read_json(path: str) -> Any:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ArgumentError(f"Archivo no encontrado: {path}") from e
    except json.JSONDecodeError as e:
        raise ArgumentError(f"JSON inválido en {path}: {e}") from e


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def state_to_dict(rho: DensityOperator) -> Dict:
    return {
        'n_sites': rho.n_sites,
        'local_dims': list(rho.local_dims),
        're': rho.entries.real.tolist(),
        'im': rho.entries.imag.tolist(),
    }


def state_from_dict(data: Dict) -> DensityOperator:
    try:
        dims = [int(d) for d in data['local_dims']]
        entries = np.asarray(data['re'], dtype=float) + 1j * np.asarray(data['im'], dtype=float)
    except KeyError as e:
        raise ArgumentError(f"Falta el campo {e} en el estado") from e
    if 'n_sites' in data and int(data['n_sites']) != len(dims):
        raise ArgumentError("n_sites no coincide con local_dims")
    return DensityOperator.from_matrix(entries, dims)


def is_state_document(data: Any) -> bool:
    return isinstance(data, dict) and {'re', 'im', 'local_dims'} <= set(data)


def is_moments_document(data: Any) -> bool:
    return isinstance(data, dict) and {'n', 'j', 'c'} <= set(data)


def load_state(path: str) -> DensityOperator:
    return state_from_dict(read_json(path))


def load_moments(path: str) -> CollectiveMoments:
    return CollectiveMoments.from_dict(read_json(path))


def load_model(path: str) -> HamiltonianSpec:
    return HamiltonianSpec.from_dict(read_json(path))


def reports_to_json(reports: Sequence[Any]) -> str:
    return dumps([r.to_dict() for r in reports])


def frame_to_csv(frame: pd.DataFrame) -> str:
    """CSV con dígitos suficientes para reconstruir cada double."""
    digits = int(get_config().get('output.csv_digits', 17))
    return frame.to_csv(index=False, float_format=f'%.{digits}g', lineterminator='\n')


def rows_to_csv(rows: Sequence[Dict]) -> str:
    return frame_to_csv(pd.DataFrame(list(rows)))
