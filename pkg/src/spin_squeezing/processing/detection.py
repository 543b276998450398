"""
Detectores a nivel de estado (PPT y CCNR sobre todas las biparticiones), búsqueda de
temperaturas críticas y ventanas de entrelazamiento ligado.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from spin_squeezing.core.collective import CollectiveMoments, moments
from spin_squeezing.core.models import HamiltonianSpec, ThermalEnsemble, ground_state
from spin_squeezing.core.operators import (
    Bipartition, DensityOperator, all_bipartitions, min_eigenvalue, partial_transpose_array,
    realign_array, trace_norm,
)
from spin_squeezing.exceptions import ArgumentError
from spin_squeezing.processing import criteria
from spin_squeezing.services.config import get_config
from spin_squeezing.utils.parallel import map_ordered

logger = logging.getLogger(__name__)

PPT_ANY = 'PPT-any'
CCNR_ANY = 'CCNR-any'
STATE_DETECTORS = (PPT_ANY, CCNR_ANY)

# Familias de criterios: mínimo de los márgenes cuyos ids empiezan por el prefijo
FAMILY_DETECTORS = {
    'OSSI-8c': ('OSSI-8c(',),
    'OSSI-8d': ('OSSI-8d(',),
    'OSSI-any': ('OSSI-8b', 'OSSI-8c(', 'OSSI-8d('),
    'KCL-34': ('KCL-34(',),
    'KCL-any': ('KCL-',),
    'AV2-45c': ('AV2-45c(',),
    'AV2-45d': ('AV2-45d(',),
}

STATUS_FOUND = 'found'
STATUS_NONE_FOUND = 'none-found'
STATUS_ABOVE_RANGE = 'above-range'


@dataclass(frozen=True)
class DetectorVerdict:
    detector_id: str
    detected: bool
    witness_value: Optional[float]
    bipartition: Optional[Bipartition] = None

    def to_dict(self) -> Dict:
        data = {'detector_id': self.detector_id, 'detected': self.detected,
                'witness_value': self.witness_value}
        if self.bipartition is not None:
            side_a, side_b = self.bipartition.labels()
            data['bipartition'] = {'side_a': list(side_a), 'side_b': list(side_b)}
        return data


@dataclass(frozen=True)
class CriticalTemperature:
    """Resultado de la búsqueda de T_c para un modelo y un detector."""

    model: HamiltonianSpec
    detector_id: str
    t_c: Optional[float]
    bracket: Optional[Tuple[float, float]]
    scan_validated: bool
    status: str = STATUS_FOUND
    transitions: Tuple[Tuple[float, float], ...] = ()
    witness_bipartition: Optional[Bipartition] = None

    def to_row(self) -> Dict:
        lo, hi = self.bracket if self.bracket else (None, None)
        return {
            'model': self.model.label(),
            'n': self.model.n,
            'detector': self.detector_id,
            't_c': self.t_c,
            'bracket_lo': lo,
            'bracket_hi': hi,
            'scan_validated': self.scan_validated,
            'status': self.status,
        }

    def to_dict(self) -> Dict:
        data = self.to_row()
        data['model'] = self.model.to_dict()
        data['transitions'] = [list(t) for t in self.transitions]
        return data


class BoundPoint(NamedTuple):
    t: float
    fully_ppt: bool
    ssi_detected: bool

    @property
    def bound_entangled(self) -> bool:
        return self.fully_ppt and self.ssi_detected


def _tol() -> float:
    return criteria.violation_tol()


def _ppt_witness(entries: np.ndarray, dims: Tuple[int, ...], part: Bipartition) -> float:
    return min_eigenvalue(partial_transpose_array(entries, dims, part.side_a))


def _ccnr_witness(entries: np.ndarray, dims: Tuple[int, ...], part: Bipartition) -> float:
    return trace_norm(realign_array(entries, dims, part)) - 1.0


def _scan_bipartitions(entries, dims, witness: Callable, pick_max: bool, early_exit: bool,
                       order: Optional[Sequence[Bipartition]], jobs: Optional[int]):
    parts = list(order) if order else list(all_bipartitions(len(dims)))
    tol = _tol()
    if early_exit:
        best, best_part = None, None
        for part in parts:
            value = witness(entries, dims, part)
            if best is None or (value > best if pick_max else value < best):
                best, best_part = value, part
            if (value > tol) if pick_max else (value < -tol):
                break
        return best, best_part
    values = map_ordered(lambda p: witness(entries, dims, p), parts, jobs)
    index = int(np.argmax(values) if pick_max else np.argmin(values))
    return float(values[index]), parts[index]


def ppt_any(rho: DensityOperator, early_exit: bool = False, jobs: Optional[int] = None,
            order: Optional[Sequence[Bipartition]] = None) -> DetectorVerdict:
    """
    Criterio PPT sobre todas las biparticiones canónicas.

    Args:
        rho: Estado de n qubits
        early_exit: Detenerse en la primera bipartición NPT (el testigo deja de ser el mínimo global)
        jobs: Hilos para evaluar biparticiones
        order: Orden alternativo de biparticiones

    Returns:
        DetectorVerdict con el menor autovalor de la transpuesta parcial
    """
    return _ppt_from_array(rho.entries, rho.local_dims, early_exit, jobs, order)


def _ppt_from_array(entries, dims, early_exit=False, jobs=None, order=None) -> DetectorVerdict:
    witness, part = _scan_bipartitions(entries, dims, _ppt_witness, False, early_exit, order, jobs)
    return DetectorVerdict(PPT_ANY, witness < -_tol(), witness, part)


def ccnr_any(rho: DensityOperator, jobs: Optional[int] = None) -> DetectorVerdict:
    """Criterio de realineamiento: norma traza de la matriz realineada mayor que 1."""
    return _ccnr_from_array(rho.entries, rho.local_dims, jobs=jobs)


def _ccnr_from_array(entries, dims, early_exit=False, jobs=None, order=None) -> DetectorVerdict:
    witness, part = _scan_bipartitions(entries, dims, _ccnr_witness, True, early_exit, order, jobs)
    return DetectorVerdict(CCNR_ANY, witness > _tol(), witness, part)


def _moment_reports(m: CollectiveMoments) -> List[criteria.CriterionReport]:
    reports = criteria.evaluate_ossi(m)
    reports += criteria.evaluate_invariant_ossi(m)
    reports += criteria.evaluate_eigenspace_ossi(m)
    reports += list(criteria.original_squeezing(m))
    reports += criteria.original_squeezing_axes(m)
    reports += criteria.kcl(m)
    reports += list(criteria.dicke_criterion(m))
    reports += criteria.evaluate_unknown_mean(m)
    return reports


def moment_verdict(m: CollectiveMoments, detector_id: str) -> DetectorVerdict:
    """Veredicto de un criterio de momentos (id exacto o familia como 'OSSI-8c')."""
    reports = _moment_reports(m)
    prefixes = FAMILY_DETECTORS.get(detector_id)
    if prefixes:
        selected = [r for r in reports if r.criterion_id.startswith(prefixes)]
    else:
        selected = [r for r in reports if r.criterion_id == detector_id]
    if not selected:
        raise ArgumentError(f"Detector desconocido: {detector_id!r}")
    applicable = [r for r in selected if r.margin is not None]
    if not applicable:
        return DetectorVerdict(detector_id, False, None)
    worst = min(applicable, key=lambda r: r.margin)
    return DetectorVerdict(detector_id, worst.violated, worst.margin)


def detect(rho: DensityOperator, detector_id: str, jobs: Optional[int] = None) -> DetectorVerdict:
    """Evalúa cualquier detector sobre un estado."""
    if detector_id == PPT_ANY:
        return ppt_any(rho, jobs=jobs)
    if detector_id == CCNR_ANY:
        return ccnr_any(rho, jobs=jobs)
    return moment_verdict(moments(rho), detector_id)


def validate_detector(detector_id: str):
    if detector_id in STATE_DETECTORS or detector_id in FAMILY_DETECTORS:
        return
    # los ids exactos se comprueban con un estado de prueba barato
    sample = CollectiveMoments.from_measurements(2, [0, 0, 1], np.diag([0.5, 0.5, 1.0]))
    moment_verdict(sample, detector_id)


class _ThermalDetector:
    """
    Evalúa un detector sobre los estados térmicos de un conjunto fijo.

    La bipartición que detectó en la última llamada secuencial se prueba primero en la
    siguiente; las llamadas desde hilos (use_hint=False) ni la leen ni la modifican.
    """

    def __init__(self, ensemble: ThermalEnsemble, detector_id: str, jobs: Optional[int] = None):
        validate_detector(detector_id)
        self.ensemble = ensemble
        self.detector_id = detector_id
        self.jobs = jobs
        self._hint: Optional[Bipartition] = None
        self._parts = list(all_bipartitions(ensemble.n)) if detector_id in STATE_DETECTORS else []

    def _order(self) -> List[Bipartition]:
        hint = self._hint
        if hint is None:
            return self._parts
        return [hint] + [p for p in self._parts if p != hint]

    def verdict(self, t: float, early_exit: bool = True, use_hint: bool = True) -> DetectorVerdict:
        if self.detector_id in STATE_DETECTORS:
            scan = _ppt_from_array if self.detector_id == PPT_ANY else _ccnr_from_array
            order = self._order() if use_hint else self._parts
            result = scan(self.ensemble.matrix(t), self.ensemble.hamiltonian.local_dims,
                          early_exit=early_exit, jobs=1, order=order)
            if use_hint and result.detected:
                self._hint = result.bipartition
            return result
        return moment_verdict(self.ensemble.moments(t), self.detector_id)

    def fires(self, t: float, use_hint: bool = True) -> bool:
        return self.verdict(t, use_hint=use_hint).detected


def default_t_max(model: HamiltonianSpec) -> float:
    table = get_config().get('solver.t_max', {}) or {}
    return float(table.get(model.family, table.get(model.kind, table.get('custom', 10.0))))


def critical_temperature(model: HamiltonianSpec, detector_id: str, t_max: Optional[float] = None,
                         tol: Optional[float] = None, jobs: Optional[int] = None,
                         scan_points: Optional[int] = None) -> CriticalTemperature:
    """
    Temperatura por debajo de la cual el detector certifica entrelazamiento.

    Primero se evalúa una rejilla logarítmica hasta t_max; después se biseca el intervalo
    de la transición detección -> no detección de temperatura más alta.

    Args:
        model: Modelo de espín
        detector_id: 'PPT-any', 'CCNR-any' o un id de criterio de momentos
        t_max: Temperatura máxima del barrido (por defecto según la familia)
        tol: Anchura final del intervalo (por defecto solver.tol)
        jobs: Hilos para evaluar la rejilla
        scan_points: Puntos de la rejilla (por defecto solver.scan_points)

    Returns:
        CriticalTemperature
    """
    config = get_config()
    t_max = float(t_max if t_max is not None else default_t_max(model))
    tol = float(tol if tol is not None else config.get('solver.tol', 1e-3))
    points = int(scan_points or config.get('solver.scan_points', 64))
    if t_max <= 0 or tol <= 0 or points < 2:
        raise ArgumentError("t_max, tol y scan_points deben ser positivos")

    ensemble = ThermalEnsemble.for_model(model)
    detector = _ThermalDetector(ensemble, detector_id, jobs)
    grid = np.geomspace(t_max * float(config.get('solver.t_min_ratio', 0.01)), t_max, points)
    logger.info(f"Barrido de {points} temperaturas para {model.label()} n={model.n} con {detector_id}")
    flags = map_ordered(lambda t: detector.fires(t, use_hint=False), grid, jobs)

    downs = [i for i in range(points - 1) if flags[i] and not flags[i + 1]]
    ups = [i for i in range(points - 1) if not flags[i] and flags[i + 1]]
    transitions = tuple((float(grid[i]), float(grid[i + 1])) for i in sorted(downs + ups))
    validated = bool(flags[0]) and len(downs) == 1 and not ups

    if not any(flags):
        logger.info(f"{detector_id} no detecta entrelazamiento en {model.label()} hasta T={t_max:g}")
        return CriticalTemperature(model, detector_id, None, None, False, STATUS_NONE_FOUND, transitions)
    if flags[-1]:
        logger.warning(f"{detector_id} detecta todavía en T={t_max:g}; aumente t_max")
        return CriticalTemperature(model, detector_id, None, (t_max, float('inf')), False,
                                   STATUS_ABOVE_RANGE, transitions)
    if not validated:
        logger.warning(f"Barrido no monótono para {model.label()} n={model.n} con {detector_id}: "
                       f"transiciones {transitions}")

    lo, hi = float(grid[downs[-1]]), float(grid[downs[-1] + 1])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if detector.fires(mid):
            lo = mid
        else:
            hi = mid
    witness_part = None
    if detector_id in STATE_DETECTORS:
        witness_part = detector.verdict(lo, early_exit=False).bipartition
    t_c = 0.5 * (lo + hi)
    logger.info(f"T_c({model.label()}, n={model.n}, {detector_id}) = {t_c:.4f}")
    return CriticalTemperature(model, detector_id, t_c, (lo, hi), validated, STATUS_FOUND,
                               transitions, witness_part)


def bound_window(model: HamiltonianSpec, t_grid: Sequence[float], jobs: Optional[int] = None) -> List[BoundPoint]:
    """Veredictos conjuntos (totalmente PPT, violación de 8b-8d) en cada temperatura."""
    ensemble = ThermalEnsemble.for_model(model)
    ppt = _ThermalDetector(ensemble, PPT_ANY)
    ssi = _ThermalDetector(ensemble, 'OSSI-any')

    def evaluate(t: float) -> BoundPoint:
        return BoundPoint(float(t), not ppt.fires(t, use_hint=False), ssi.fires(t, use_hint=False))

    points = map_ordered(evaluate, [float(t) for t in t_grid], jobs)
    window = [p.t for p in points if p.bound_entangled]
    if window:
        logger.info(f"Entrelazamiento ligado en {model.label()} n={model.n} para T en {window}")
    return points


@dataclass
class NanotubeReport:
    critical: Dict[str, CriticalTemperature] = field(default_factory=dict)

    @property
    def bound_window(self) -> Optional[Tuple[float, float]]:
        ppt, ssi = self.critical.get(PPT_ANY), self.critical.get('OSSI-8b')
        if ppt is None or ssi is None or ppt.t_c is None or ssi.t_c is None or ssi.t_c <= ppt.t_c:
            return None
        return ppt.t_c, ssi.t_c

    def to_dict(self) -> Dict:
        data = {'critical_temperatures': {k: v.to_dict() for k, v in self.critical.items()}}
        ppt = self.critical.get(PPT_ANY)
        if ppt is not None and ppt.witness_bipartition is not None:
            side_a, side_b = ppt.witness_bipartition.labels()
            data['ppt_splitting'] = {'side_a': list(side_a), 'side_b': list(side_b)}
        data['undetected'] = [k for k, v in self.critical.items() if v.status == STATUS_NONE_FOUND]
        data['bound_window'] = list(self.bound_window) if self.bound_window else None
        return data


NANOTUBE_DETECTORS = ('OSSI-8a', 'OSSI-8b', 'OSSI-8c', 'OSSI-8d', PPT_ANY)


def nanotube_report(tol: Optional[float] = None, jobs: Optional[int] = None) -> NanotubeReport:
    """T_c del nanotubo de 9 espines para cada desigualdad y para PPT, con su bipartición."""
    model = HamiltonianSpec('nanotube', 9)
    report = NanotubeReport()
    for detector_id in NANOTUBE_DETECTORS:
        report.critical[detector_id] = critical_temperature(model, detector_id, tol=tol, jobs=jobs)
    return report


GROUND_STATE_MODELS = (
    ('heisenberg_chain', lambda n: HamiltonianSpec('heisenberg_chain', n)),
    ('xy_chain', lambda n: HamiltonianSpec('xy_chain', n)),
    ('heisenberg_complete', lambda n: HamiltonianSpec('heisenberg_complete', n)),
    ('lmg_positive', lambda n: HamiltonianSpec('lmg', n, {'lambda': 1.0, 'gamma': 1.0, 'h': 0.0})),
    ('lmg_negative', HamiltonianSpec.xy_complete),
)


def ground_state_table(n: int = 8) -> List[Dict]:
    """Qué familias de criterios detectan el estado fundamental de cada modelo."""
    rows = []
    for name, factory in GROUND_STATE_MODELS:
        m = moments(ground_state(factory(n)))
        rows.append({
            'model': name,
            'n': n,
            'original_squeezing': moment_verdict(m, 'ORIG-3').detected,
            'kcl': moment_verdict(m, 'KCL-any').detected,
            'ossi': moment_verdict(m, 'OSSI-any').detected,
        })
    return rows
