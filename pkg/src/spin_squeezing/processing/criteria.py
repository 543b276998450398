"""
Criterios de entrelazamiento basados en momentos colectivos.

Cada criterio devuelve un CriterionReport con un margen: positivo (o cero) cuando la
desigualdad se cumple y negativo cuando se viola. Un margen menor que
-numerics.violation_tol implica entrelazamiento.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from spin_squeezing.core.collective import AXES, CollectiveMoments
from spin_squeezing.core.operators import PAULI, DensityOperator
from spin_squeezing.exceptions import ArgumentError, InconsistentMomentsError
from spin_squeezing.services.config import get_config

logger = logging.getLogger(__name__)

STATUS_OK = 'ok'
STATUS_NOT_APPLICABLE = 'not-applicable'

# (k, l, m): m es el eje distinguido
AXIS_TRIPLES = (('y', 'z', 'x'), ('x', 'z', 'y'), ('x', 'y', 'z'))
IDX = {axis: i for i, axis in enumerate(AXES)}


@dataclass(frozen=True)
class CriterionReport:
    """Margen y veredicto de una desigualdad para un estado o conjunto de momentos."""

    criterion_id: str
    margin: Optional[float]
    violated: bool
    status: str = STATUS_OK
    axes: Optional[Tuple] = None

    def to_dict(self) -> Dict:
        data = {
            'criterion_id': self.criterion_id,
            'margin': self.margin,
            'violated': self.violated,
            'status': self.status,
        }
        if self.axes is not None:
            data['axes'] = [list(a) if isinstance(a, (tuple, list)) else a for a in self.axes]
        return data


def violation_tol() -> float:
    return float(get_config().get('numerics.violation_tol', 1e-9))


def _report(criterion_id: str, margin: float, axes: Optional[Tuple] = None) -> CriterionReport:
    margin = float(margin)
    return CriterionReport(criterion_id, margin, margin < -violation_tol(), STATUS_OK, axes)


def _not_applicable(criterion_id: str) -> CriterionReport:
    return CriterionReport(criterion_id, None, False, STATUS_NOT_APPLICABLE)


def _most_violated(reports: Sequence[CriterionReport]) -> CriterionReport:
    return min(reports, key=lambda r: r.margin)


def _triple_id(prefix: str, triple: Tuple[str, str, str]) -> str:
    return f"{prefix}({','.join(triple)})"


def _check_consistency(m: CollectiveMoments):
    n = m.n
    margin = n * (n + 2) / 4 - float(np.sum(m.k2))
    if margin < -violation_tol():
        raise InconsistentMomentsError(
            f"Σ<J_l²> = {np.sum(m.k2):.6g} supera N(N+2)/4 = {n * (n + 2) / 4:.6g}; "
            "ningún estado tiene estos momentos")
    return margin


def evaluate_ossi(m: CollectiveMoments) -> List[CriterionReport]:
    """
    Las ocho desigualdades óptimas de compresión de espín en los ejes dados.

    Returns:
        Informes OSSI-8a, OSSI-8b, tres OSSI-8c(k,l,m) y tres OSSI-8d(k,l,m)
    """
    n = m.n
    k2, var = m.k2, m.variances
    reports = [_report('OSSI-8a', _check_consistency(m)),
               _report('OSSI-8b', float(np.sum(var)) - n / 2)]
    for triple in AXIS_TRIPLES:
        k, l, mm = (IDX[a] for a in triple)
        reports.append(_report(_triple_id('OSSI-8c', triple),
                               (n - 1) * var[mm] - k2[k] - k2[l] + n / 2, triple))
    for triple in AXIS_TRIPLES:
        k, l, mm = (IDX[a] for a in triple)
        reports.append(_report(_triple_id('OSSI-8d', triple),
                               (n - 1) * (var[k] + var[l]) - k2[mm] - n * (n - 2) / 4, triple))
    return reports


def evaluate_invariant_ossi(m: CollectiveMoments) -> List[CriterionReport]:
    """Forma invariante bajo rotaciones: trazas de C y γ y extremos del espectro de 𝔛."""
    n = m.n
    _check_consistency(m)
    lam = m.chi_eigenvalues()
    return [
        _report('INV-26a', n * (n + 2) / 4 - m.trace_c),
        _report('INV-26b', m.trace_gamma - n / 2),
        _report('INV-26c', lam[0] - m.trace_c + n / 2),
        _report('INV-26d', (n - 1) * m.trace_gamma - n * (n - 2) / 4 - lam[-1]),
    ]


def evaluate_eigenspace_ossi(m: CollectiveMoments) -> List[CriterionReport]:
    """Misma familia expresada con Tr 𝔛 y |<J>|²; los márgenes a/b son N veces los invariantes."""
    n = m.n
    _check_consistency(m)
    lam = m.chi_eigenvalues()
    tr, j2 = float(np.sum(lam)), m.j_norm2
    return [
        _report('EIG-28a', n * n * (n + 2) / 4 - (n - 1) * j2 - tr),
        _report('EIG-28b', tr - n * n / 2 - j2),
        _report('EIG-28c', lam[0] - tr / n - (n - 1) * j2 / n + n / 2),
        _report('EIG-28d', (n - 1) * tr / n - (n - 1) * j2 / n - n * (n - 2) / 4 - lam[-1]),
    ]


def original_squeezing_axes(m: CollectiveMoments) -> List[CriterionReport]:
    """
    Criterio de compresión original para cada eje de varianza.

    ORIG-3(k,l,m) compara Var(J_m) con el espín medio en el plano (k, l); ORIG-3(x,y,z) es la
    forma habitual con la varianza en z. Sin espín medio en el plano el informe es no aplicable.
    """
    n = m.n
    floor = float(get_config().get('numerics.applicability_tol', 1e-12))
    var, j = m.variances, m.j
    reports = []
    for triple in AXIS_TRIPLES:
        k, l, mm = (IDX[a] for a in triple)
        denominator = j[k] ** 2 + j[l] ** 2
        if denominator > floor:
            reports.append(_report(_triple_id('ORIG-3', triple), var[mm] / denominator - 1 / n, triple))
        else:
            reports.append(_not_applicable(_triple_id('ORIG-3', triple)))
    return reports


def original_squeezing(m: CollectiveMoments) -> Tuple[CriterionReport, CriterionReport]:
    """
    Criterio de compresión original y su forma con ejes óptimos.

    ORIG-3 es la elección de ejes más violada entre las de original_squeezing_axes; sus
    ejes quedan en `axes`.
    """
    candidates = [r for r in original_squeezing_axes(m) if r.margin is not None]
    if candidates:
        worst = _most_violated(candidates)
        eq3 = CriterionReport('ORIG-3', worst.margin, worst.violated, STATUS_OK, worst.axes)
    else:
        eq3 = _not_applicable('ORIG-3')
    eq31 = _report('ORIG-31', m.chi_eigenvalues()[0] - m.j_norm2)
    return eq3, eq31


def _is_symmetric(m: CollectiveMoments) -> bool:
    # Tr C = N(N+2)/4 sólo en el subespacio simétrico
    n = m.n
    return n * (n + 2) / 4 - m.trace_c <= violation_tol() * max(1.0, n * n)


def kcl(m: CollectiveMoments) -> List[CriterionReport]:
    """
    Criterio basado en el entrelazamiento de dos qubits (forma por ejes, invariante y simétrica).

    Returns:
        KCL-34 para cada eje distinguido, KCL-37, KCL-38 y KCL-40. Las dos últimas sólo
        se aplican a estados simétricos.
    """
    n = m.n
    k2, j = m.k2, m.j
    b = n * (n - 2) / 4
    reports = []
    for triple in AXIS_TRIPLES:
        k, l, mm = (IDX[a] for a in triple)
        margin = (k2[mm] + b) ** 2 - (k2[k] + k2[l] - n / 2) ** 2 - (n - 1) ** 2 * j[mm] ** 2
        reports.append(_report(_triple_id('KCL-34', triple), margin, triple))

    a = m.trace_c - n / 2
    mat = (n * n / 2 + 1 - 2 * m.trace_c) * m.c - (n - 1) ** 2 * m.gamma
    reports.append(_report('KCL-37', b * b - a * a - np.linalg.eigvalsh(mat)[-1]))

    if _is_symmetric(m):
        per_axis = 4 * m.variances / n - 1 + 4 * j ** 2 / n ** 2
        axis = int(np.argmin(per_axis))
        reports.append(_report('KCL-38', per_axis[axis], (AXES[axis],)))
        reports.append(_report('KCL-40', m.chi_eigenvalues()[0] - n * n / 4))
    else:
        reports.extend([_not_applicable('KCL-38'), _not_applicable('KCL-40')])
    return reports


def dicke_criterion(m: CollectiveMoments) -> Tuple[CriterionReport, CriterionReport]:
    """Cota de <J_k²> + <J_l²> para estados separables y su forma invariante."""
    n = m.n
    pairs = [_report(f"DICKE-41({k},{l})", n * (n + 1) / 4 - m.k2[IDX[k]] - m.k2[IDX[l]], (k, l))
             for k, l, _ in AXIS_TRIPLES]
    worst = _most_violated(pairs)
    eq41 = CriterionReport('DICKE-41', worst.margin, worst.violated, STATUS_OK, worst.axes)
    eq42 = _report('DICKE-42', np.linalg.eigvalsh(m.c)[0] - m.trace_c + n * (n + 1) / 4)
    return eq41, eq42


def _two_qubit_expectations(rho_av2: DensityOperator) -> Tuple[np.ndarray, np.ndarray]:
    if rho_av2.local_dims != (2, 2):
        raise ArgumentError(f"Se esperaba un estado de dos qubits, dimensiones {rho_av2.local_dims}")
    r = rho_av2.entries
    single = np.array([np.trace(r @ np.kron(PAULI[a], PAULI['0'])).real for a in AXES])
    corr = np.array([np.trace(r @ np.kron(PAULI[a], PAULI[a])).real for a in AXES])
    return single, corr


def av2_forms(rho_av2: DensityOperator, n: int) -> List[CriterionReport]:
    """
    Desigualdades óptimas reescritas sobre el estado medio de dos qubits.

    Args:
        rho_av2: Estado reducido promedio (simétrico bajo intercambio)
        n: Número de qubits del sistema completo

    Returns:
        AV2-45a, AV2-45b, AV2-45c(k,l,m) x3, AV2-45d(k,l,m) x3 y AV2-44
    """
    if n < 2:
        raise ArgumentError("Las formas de dos qubits requieren n ≥ 2")
    s, t = _two_qubit_expectations(rho_av2)
    total = float(np.sum(t))
    f = n / (n - 1)
    reports = [
        _report('AV2-45a', 1 - total),
        _report('AV2-45b', total + 1 / (n - 1) - f * float(np.sum(s ** 2))),
    ]
    for triple in AXIS_TRIPLES:
        mm = IDX[triple[2]]
        reports.append(_report(_triple_id('AV2-45c', triple), 1 + n * (t[mm] - s[mm] ** 2) - total, triple))
    for triple in AXIS_TRIPLES:
        k, l, mm = (IDX[a] for a in triple)
        reports.append(_report(_triple_id('AV2-45d', triple),
                               total + 1 / (n - 1) - f * (s[k] ** 2 + s[l] ** 2) - f * t[mm], triple))
    planar = [_report('AV2-44', 1 - t[IDX[k]] - t[IDX[l]], (k, l)) for k, l, _ in AXIS_TRIPLES]
    reports.append(_most_violated(planar))
    return reports


def unentangled_bound(m: CollectiveMoments) -> int:
    """Cota superior del número de qubits no entrelazados: floor(2 Σ Var(J_l)) en [0, N]."""
    value = int(np.floor(2 * float(np.sum(m.variances)) + violation_tol()))
    return max(0, min(m.n, value))


def optimal_directions(m: CollectiveMoments) -> np.ndarray:
    """
    Matriz ortogonal O cuyas filas son autovectores de 𝔛 en orden ascendente.

    Los autoespacios degenerados se completan proyectando los ejes x, y, z en ese orden,
    de modo que 𝔛 = cI devuelve la identidad.
    """
    w, v = np.linalg.eigh(m.chi)
    tol = float(get_config().get('numerics.degeneracy_tol', 1e-9)) * max(1.0, float(np.max(np.abs(w))))
    rows = []
    start = 0
    while start < 3:
        stop = start + 1
        while stop < 3 and w[stop] - w[start] <= tol:
            stop += 1
        basis = v[:, start:stop]
        projector = basis @ basis.T
        picked = []
        for axis in np.eye(3):
            u = projector @ axis
            for prev in picked:
                u = u - (prev @ u) * prev
            if np.linalg.norm(u) > 1e-6:
                picked.append(u / np.linalg.norm(u))
            if len(picked) == stop - start:
                break
        rows.extend(picked)
        start = stop
    o = np.vstack(rows)
    # signo: componente de mayor módulo positiva
    for row in o:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1
    return o


def evaluate_unknown_mean(m: CollectiveMoments) -> List[CriterionReport]:
    """Desigualdades con <J> = 0 aplicadas al vector K (KONLY) y al de varianzas (VARONLY)."""
    n = m.n
    reports = []
    for prefix, vec in (('KONLY', m.k2), ('VARONLY', m.variances)):
        reports.append(_report(f'{prefix}-8b', float(np.sum(vec)) - n / 2))
        for triple in AXIS_TRIPLES:
            k, l, mm = (IDX[a] for a in triple)
            reports.append(_report(_triple_id(f'{prefix}-8c', triple),
                                   (n - 1) * vec[mm] - vec[k] - vec[l] + n / 2, triple))
        for triple in AXIS_TRIPLES:
            k, l, mm = (IDX[a] for a in triple)
            reports.append(_report(_triple_id(f'{prefix}-8d', triple),
                                   (n - 1) * (vec[k] + vec[l]) - vec[mm] - n * (n - 2) / 4, triple))
    return reports


def evaluate_all(m: CollectiveMoments, rho_av2: Optional[DensityOperator] = None) -> List[CriterionReport]:
    """Todos los criterios del módulo; las formas de dos qubits sólo si se da ρ_av2."""
    reports = evaluate_ossi(m)
    reports += evaluate_invariant_ossi(m)
    reports += evaluate_eigenspace_ossi(m)
    reports += list(original_squeezing(m))
    reports += original_squeezing_axes(m)
    reports += kcl(m)
    reports += list(dicke_criterion(m))
    reports += evaluate_unknown_mean(m)
    if rho_av2 is not None:
        reports += av2_forms(rho_av2, m.n)
    violated = [r.criterion_id for r in reports if r.violated]
    logger.info(f"Evaluados {len(reports)} criterios para n={m.n}; violados: {violated or 'ninguno'}")
    return reports
