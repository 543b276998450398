"""
Módulo que implementa el orquestador principal siguiendo el patrón Fachada de Servicio.
Coordina análisis de estados, barridos de temperatura y las tablas de referencia.
"""
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from spin_squeezing.core.collective import CollectiveMoments, moments, reduced_av2
from spin_squeezing.core.models import HamiltonianSpec
from spin_squeezing.core.operators import DensityOperator
from spin_squeezing.exceptions import SpinSqueezingError
from spin_squeezing.processing import criteria, detection, polytope
from spin_squeezing.services.cache import CacheManager, cache_manager
from spin_squeezing.services.config import ConfigManager, get_config
from spin_squeezing.utils.monitoring import Monitor, measure_execution_time
from spin_squeezing.utils.parallel import map_ordered

logger = logging.getLogger(__name__)

# (familia, fábrica de modelos, detector de momentos)
TABLE2_FAMILIES = (
    ('heisenberg_chain', lambda n: HamiltonianSpec('heisenberg_chain', n), 'OSSI-8b'),
    ('xy_chain', lambda n: HamiltonianSpec('xy_chain', n), 'OSSI-8b'),
    ('heisenberg_complete', lambda n: HamiltonianSpec('heisenberg_complete', n), 'OSSI-8b'),
    ('xy_complete', HamiltonianSpec.xy_complete, 'OSSI-8b'),
    ('ising_transverse(B=0.5)', lambda n: HamiltonianSpec('ising_transverse', n, {'B': 0.5}), 'OSSI-8c'),
    ('ising_transverse(B=1)', lambda n: HamiltonianSpec('ising_transverse', n, {'B': 1.0}), 'OSSI-8c'),
    ('ising_transverse(B=2)', lambda n: HamiltonianSpec('ising_transverse', n, {'B': 2.0}), 'OSSI-8c'),
)
TABLE2_SIZES = tuple(range(3, 10))
TABLE2_COLUMNS = ['model', 'n', 'detector', 't_c', 'bracket_lo', 'bracket_hi',
                  'scan_validated', 'status', 'error']


class EntanglementOrchestrator:
    """
    Fachada de servicio que coordina los análisis de entrelazamiento.

    Responsabilidades:
    - Evaluar todos los criterios sobre estados o momentos
    - Orquestar barridos de temperatura y las tablas de temperaturas críticas
    - Manejar errores por celda y métricas
    """

    def __init__(self, cache: CacheManager = None, custom_config: ConfigManager = None,
                 monitor: Monitor = None, jobs: Optional[int] = None):
        """
        Inicializa el orquestador con sus dependencias.

        Args:
            cache: Caché de resultados numéricos (opcional)
            custom_config: Manejador de configuración personalizado (opcional)
            monitor: Sistema de monitoreo (opcional)
            jobs: Hilos máximos para las tareas paralelas
        """
        self.config = custom_config or get_config()
        self.cache = cache or cache_manager
        self.monitor = monitor or Monitor(app_name=self.config.get('app.name', 'SpinSqueezing'))
        self.jobs = jobs
        logger.debug("Orquestador inicializado correctamente")

    def analyze_state(self, rho: DensityOperator) -> Dict[str, Any]:
        """
        Momentos, todos los criterios (incluidas las formas de dos qubits) y la cota de qubits no entrelazados.

        Args:
            rho: Estado de n qubits

        Returns:
            Diccionario con 'moments', 'reports' y 'unentangled_bound'
        """
        m = moments(rho)
        av2 = reduced_av2(rho) if rho.n_sites >= 2 else None
        return self._analysis(m, av2)

    def analyze_moments(self, m: CollectiveMoments) -> Dict[str, Any]:
        return self._analysis(m, None)

    def _analysis(self, m: CollectiveMoments, av2: Optional[DensityOperator]) -> Dict[str, Any]:
        reports = criteria.evaluate_all(m, av2)
        bound = criteria.unentangled_bound(m)
        if bound == 0:
            logger.info("Ningún qubit puede estar desentrelazado del resto")
        return {'moments': m, 'reports': reports, 'unentangled_bound': bound}

    @measure_execution_time()
    def critical_temperature(self, model: HamiltonianSpec, detector_id: str, t_max: Optional[float] = None,
                             tol: Optional[float] = None) -> detection.CriticalTemperature:
        return detection.critical_temperature(model, detector_id, t_max=t_max, tol=tol, jobs=self.jobs)

    def _table_cell(self, cell) -> Dict[str, Any]:
        family, factory, detector_id, n, tol = cell
        try:
            result = detection.critical_temperature(factory(n), detector_id, tol=tol, jobs=1)
            row = result.to_row()
            row['model'] = family
            row['error'] = None
            return row
        except SpinSqueezingError as e:
            logger.error(f"Fallo en la celda ({family}, n={n}, {detector_id}): {e}", exc_info=True)
            self.monitor.track_exception(e, {'family': family, 'n': n, 'detector': detector_id})
            return {'model': family, 'n': n, 'detector': detector_id, 't_c': None, 'bracket_lo': None,
                    'bracket_hi': None, 'scan_validated': False, 'status': 'error', 'error': str(e)}

    @measure_execution_time()
    def critical_temperature_table(self, sizes: Sequence[int] = TABLE2_SIZES,
                                   families: Optional[Sequence[str]] = None,
                                   tol: Optional[float] = None) -> pd.DataFrame:
        """
        Tabla de temperaturas críticas (criterio de momentos y PPT) para cada familia y tamaño.

        Las celdas se calculan en paralelo; un fallo se anota en su fila y el resto continúa.

        Returns:
            DataFrame con columnas TABLE2_COLUMNS, ordenado por familia, detector y n
        """
        selected = [f for f in TABLE2_FAMILIES if families is None or f[0] in families]
        cells = [(family, factory, detector_id, n, tol)
                 for family, factory, ssi in selected
                 for detector_id in (ssi, detection.PPT_ANY)
                 for n in sizes]
        logger.info(f"Calculando {len(cells)} celdas de temperaturas críticas")
        rows = map_ordered(self._table_cell, cells, self.jobs)
        return pd.DataFrame(rows, columns=TABLE2_COLUMNS)

    @measure_execution_time()
    def bound_scan(self, model: HamiltonianSpec, t_grid: Sequence[float]) -> pd.DataFrame:
        points = detection.bound_window(model, t_grid, jobs=self.jobs)
        frame = pd.DataFrame([p._asdict() for p in points], columns=['t', 'fully_ppt', 'ssi_detected'])
        frame['bound_entangled'] = frame['fully_ppt'] & frame['ssi_detected']
        return frame

    @measure_execution_time()
    def nanotube(self, tol: Optional[float] = None) -> detection.NanotubeReport:
        return detection.nanotube_report(tol=tol, jobs=self.jobs)

    def ground_state_table(self, n: int = 8) -> pd.DataFrame:
        return pd.DataFrame(detection.ground_state_table(n))

    def polytope_geometry(self, space: str, n: int, j: Optional[Sequence[float]] = None) -> polytope.PolytopeGeometry:
        return polytope.geometry_for(space, n, j)

    @measure_execution_time()
    def sample(self, n: int, count: int, seed: int, mixing_components: Optional[int] = None,
               zero_mean: bool = False, j_max: Optional[float] = None,
               aligned_fraction: Optional[float] = None) -> pd.DataFrame:
        return polytope.sample_separable(n, count, seed, mixing_components=mixing_components,
                                         j_max=j_max, zero_mean=zero_mean, aligned_fraction=aligned_fraction)


def temperature_grid(t_min: float, t_max: float, points: int) -> List[float]:
    return [float(t) for t in np.linspace(t_min, t_max, points)]
