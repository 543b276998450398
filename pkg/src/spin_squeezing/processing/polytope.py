"""
Geometría del poliedro de estados separables en el espacio de segundos momentos.

Para N y <J> fijos, los estados separables ocupan un poliedro con seis vértices
(A_k, B_k) y ocho caras, una por cada desigualdad óptima de compresión de espín.
También se construyen los estados separables que realizan los vértices y se
muestrean nubes de puntos separables aleatorias.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.spatial import ConvexHull, Delaunay

from spin_squeezing.core.collective import (
    AXES, CollectiveMoments, mix_moments, product_moments,
)
from spin_squeezing.core.models import product_state
from spin_squeezing.core.operators import DensityOperator
from spin_squeezing.exceptions import ArgumentError
from spin_squeezing.processing.criteria import AXIS_TRIPLES, IDX, violation_tol
from spin_squeezing.services.config import get_config

logger = logging.getLogger(__name__)

K_SPACE = 'k-space'
EIGEN_SPACE = 'eigen-space'
VARIANCE_SPACE = 'variance-space'
SPACES = (K_SPACE, EIGEN_SPACE, VARIANCE_SPACE)

SAMPLE_COLUMNS = ['kx', 'ky', 'kz', 'jx', 'jy', 'jz']


def _check_mean(n: int, j: Sequence[float]) -> np.ndarray:
    if int(n) != n or n < 2:
        raise ArgumentError(f"El poliedro requiere n ≥ 2, se recibió {n}")
    j = np.asarray(j, dtype=float).ravel()
    if j.shape != (3,):
        raise ArgumentError(f"<J> debe tener 3 componentes, no {j.shape}")
    if np.linalg.norm(j) > n / 2 + 1e-9:
        raise ArgumentError(f"|<J>| = {np.linalg.norm(j):.6g} supera N/2 = {n / 2:g}")
    return j


@dataclass(frozen=True)
class PolytopeGeometry:
    """Vértices y semiespacios normal·x ≤ offset de un poliedro de separabilidad."""

    space: str
    n: int
    j: Tuple[float, float, float]
    vertices: Dict[str, np.ndarray] = field(default_factory=dict)
    facets: Dict[str, Tuple[np.ndarray, float]] = field(default_factory=dict)

    def margins(self, point: Sequence[float]) -> Dict[str, float]:
        """offset - normal·x para cada cara (negativo = fuera)."""
        x = np.asarray(point, dtype=float)
        return {label: float(offset - normal @ x) for label, (normal, offset) in self.facets.items()}

    def active_facets(self, point: Sequence[float], tol: float = 1e-9) -> List[str]:
        return sorted(label for label, margin in self.margins(point).items() if abs(margin) <= tol)

    def vertex_matrix(self) -> np.ndarray:
        return np.vstack([self.vertices[k] for k in sorted(self.vertices)])

    def to_dict(self) -> Dict:
        return {
            'space': self.space,
            'n': self.n,
            'j': list(self.j),
            'vertices': {k: v.tolist() for k, v in sorted(self.vertices.items())},
            'facets': {label: {'normal': normal.tolist(), 'offset': float(offset)}
                       for label, (normal, offset) in self.facets.items()},
        }

    def to_obj(self) -> str:
        """Malla triangulada (formato OBJ) de la envolvente de los vértices."""
        labels = sorted(self.vertices)
        points = np.vstack([self.vertices[k] for k in labels])
        lines = [f"# {self.space} n={self.n} j={list(self.j)}"]
        lines += [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in points]
        try:
            hull = ConvexHull(points)
        except Exception as e:  # poliedro degenerado (p. ej. |<J>| = N/2)
            logger.warning(f"No se pudo triangular el poliedro: {e}")
            return "\n".join(lines) + "\n"
        lines += ["f " + " ".join(str(i + 1) for i in simplex) for simplex in hull.simplices]
        return "\n".join(lines) + "\n"


def _k_space_facets(n: int, j: np.ndarray) -> Dict[str, Tuple[np.ndarray, float]]:
    j2 = j ** 2
    facets = {
        'OSSI-8a': (np.ones(3), n * (n + 2) / 4),
        'OSSI-8b': (-np.ones(3), -(n / 2 + float(np.sum(j2)))),
    }
    for k, l, m in AXIS_TRIPLES:
        normal = np.zeros(3)
        normal[IDX[k]] = normal[IDX[l]] = 1.0
        normal[IDX[m]] = -(n - 1)
        facets[f"OSSI-8c({k},{l},{m})"] = (normal, n / 2 - (n - 1) * j2[IDX[m]])
    for k, l, m in AXIS_TRIPLES:
        normal = np.zeros(3)
        normal[IDX[k]] = normal[IDX[l]] = -(n - 1)
        normal[IDX[m]] = 1.0
        facets[f"OSSI-8d({k},{l},{m})"] = (normal, -(n - 1) * (j2[IDX[k]] + j2[IDX[l]]) - n * (n - 2) / 4)
    return facets


def _eigen_space_facets(n: int, s: float) -> Dict[str, Tuple[np.ndarray, float]]:
    facets = {
        'EIG-28a': (np.ones(3), n * n * (n + 2) / 4 - (n - 1) * s),
        'EIG-28b': (-np.ones(3), -(n * n / 2 + s)),
    }
    for m in AXES:
        normal = np.full(3, 1 / n)
        normal[IDX[m]] -= 1
        facets[f"EIG-28c({m})"] = (normal, n / 2 - (n - 1) * s / n)
    for m in AXES:
        normal = np.full(3, -(n - 1) / n)
        normal[IDX[m]] += 1
        facets[f"EIG-28d({m})"] = (normal, -(n - 1) * s / n - n * (n - 2) / 4)
    return facets


def vertices_k_space(n: int, j: Sequence[float]) -> PolytopeGeometry:
    """
    Poliedro en el espacio (<J_x²>, <J_y²>, <J_z²>) para N y <J> dados.

    Args:
        n: Número de qubits
        j: Vector <J>

    Returns:
        PolytopeGeometry con vértices A_x..B_z y las ocho caras
    """
    j = _check_mean(n, j)
    kappa = (n - 1) / n
    j2 = j ** 2
    vertices = {}
    for axis in AXES:
        a = n / 4 + kappa * j2
        b = a.copy()
        i = IDX[axis]
        others = float(np.sum(j2) - j2[i])
        a[i] = n * n / 4 - kappa * others
        b[i] = j2[i] + others / n
        vertices[f"A_{axis}"] = a
        vertices[f"B_{axis}"] = b
    return PolytopeGeometry(K_SPACE, int(n), tuple(j.tolist()), vertices, _k_space_facets(n, j))


def vertices_eigen_space(n: int, j: Sequence[float]) -> PolytopeGeometry:
    """Poliedro en el espacio de autovalores de 𝔛; sólo depende de |<J>|²."""
    j = _check_mean(n, j)
    s = float(j @ j)
    vertices = {}
    for axis in AXES:
        a = np.full(3, n * n / 4)
        b = a.copy()
        a[IDX[axis]] = n ** 3 / 4 - (n - 1) * s
        b[IDX[axis]] = s
        vertices[f"a_{axis}"] = a
        vertices[f"b_{axis}"] = b
    return PolytopeGeometry(EIGEN_SPACE, int(n), tuple(j.tolist()), vertices, _eigen_space_facets(n, s))


def vertices_variance_space(n: int) -> PolytopeGeometry:
    """Poliedro con <J> = 0; contiene el vector de varianzas de todo estado separable."""
    geometry = vertices_k_space(n, np.zeros(3))
    return PolytopeGeometry(VARIANCE_SPACE, geometry.n, geometry.j, geometry.vertices, geometry.facets)


class MembershipResult(NamedTuple):
    inside: bool
    violated_facets: List[Tuple[str, float]]


def geometry_for(space: str, n: int, j: Optional[Sequence[float]] = None) -> PolytopeGeometry:
    if space == K_SPACE:
        return vertices_k_space(n, j if j is not None else np.zeros(3))
    if space == EIGEN_SPACE:
        return vertices_eigen_space(n, j if j is not None else np.zeros(3))
    if space == VARIANCE_SPACE:
        return vertices_variance_space(n)
    raise ArgumentError(f"Espacio desconocido: {space!r}. Opciones: {', '.join(SPACES)}")


def membership(point: Sequence[float], space: str, n: int,
               j: Optional[Sequence[float]] = None) -> MembershipResult:
    """Comprueba si un punto cumple todas las caras (con tolerancia)."""
    point = np.asarray(point, dtype=float).ravel()
    if point.shape != (3,):
        raise ArgumentError(f"El punto debe tener 3 coordenadas, no {point.shape}")
    margins = geometry_for(space, n, j).margins(point)
    violated = [(label, margin) for label, margin in margins.items() if margin < -violation_tol()]
    return MembershipResult(not violated, violated)


def _vertex_blochs(n: int, j: Sequence[float], axis: str):
    """Vectores de Bloch ψ± y probabilidad p del vértice asociado a `axis`."""
    j = _check_mean(n, j)
    if axis not in IDX:
        raise ArgumentError(f"Eje desconocido: {axis!r}")
    big_j = n / 2
    i = IDX[axis]
    off_axis = float(np.sum(j ** 2) - j[i] ** 2)
    if off_axis > big_j ** 2 + 1e-12:
        raise ArgumentError("Las componentes perpendiculares de <J> superan N/2")
    c = float(np.sqrt(max(0.0, 1 - off_axis / big_j ** 2)))
    if c <= 1e-12:
        p = 0.5
    else:
        p = 0.5 * (1 + j[i] / (big_j * c))
    if p < -1e-12 or p > 1 + 1e-12:
        raise ArgumentError(f"Probabilidad de vértice fuera de [0, 1]: p = {p:.6g}")
    p = min(1.0, max(0.0, p))
    plus = j / big_j
    plus[i] = c
    minus = plus.copy()
    minus[i] = -c
    return c, p, plus, minus


def construct_vertex_state_A(n: int, j: Sequence[float], axis: str) -> DensityOperator:
    """Mezcla p ψ+^⊗N + (1-p) ψ-^⊗N, que realiza el vértice A_axis."""
    _, p, plus, minus = _vertex_blochs(n, j, axis)
    parts = [(p, plus), (1 - p, minus)]
    weights = [w for w, _ in parts if w > 0]
    states = [product_state([r] * n) for w, r in parts if w > 0]
    return DensityOperator.mixture(weights, states) if len(states) > 1 else states[0]


def construct_vertex_state_B(n: int, j: Sequence[float], axis: str) -> Tuple[DensityOperator, bool]:
    """
    Estado producto ψ+^⊗M ⊗ ψ-^⊗(N-M) con M = Np que realiza el vértice B_axis.

    Si M no es entero se mezclan floor(M) y floor(M)+1; el resultado se desvía del
    vértice como mucho ¼ en la coordenada <J_axis²>.

    Returns:
        (estado, exacto)
    """
    c, p, plus, minus = _vertex_blochs(n, j, axis)
    big_m = n * p
    lower = int(np.floor(big_m + 1e-9))
    eps = big_m - lower
    if eps <= 1e-9:
        components = [(1.0, lower)]
    else:
        components = [(1 - eps, lower), (eps, lower + 1)]

    blochs = [[plus] * m + [minus] * (n - m) for _, m in components]
    weights = [w for w, _ in components]
    states = [product_state(b) for b in blochs]
    state = DensityOperator.mixture(weights, states) if len(states) > 1 else states[0]

    target = vertices_k_space(n, j).vertices[f"B_{axis}"]
    achieved = mix_moments(weights, [product_moments(b) for b in blochs]).k2
    exact = bool(np.max(np.abs(achieved - target)) <= 1e-9)
    if not exact:
        logger.info(f"Vértice B_{axis} aproximado: desviación {np.max(np.abs(achieved - target)):.3g}")
    return state, exact


def random_product_blochs(n: int, rng: np.random.Generator) -> np.ndarray:
    """n vectores de Bloch puros distribuidos uniformemente en la esfera."""
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def aligned_product_blochs(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Producto ψ+^⊗M ⊗ ψ-^⊗(N-M) sobre un eje aleatorio, con M uniforme en 0..N.

    Son los estados de los vértices con <J> = 0: M = N (o 0) da A_eje y M = N/2 da B_eje.
    """
    axis = random_product_blochs(1, rng)[0]
    m = int(rng.integers(0, n + 1))
    signs = np.where(rng.permutation(n) < m, 1.0, -1.0)
    return signs[:, None] * axis


def _random_components(n: int, rng: np.random.Generator, mixing_components: int, zero_mean: bool,
                       aligned_fraction: float):
    count = int(rng.integers(1, mixing_components + 1))
    weights = rng.dirichlet(np.ones(count))
    blochs = [aligned_product_blochs(n, rng) if rng.random() < aligned_fraction
              else random_product_blochs(n, rng) for _ in range(count)]
    if zero_mean:
        # cada componente con su antípoda: <J> = 0 y K intacto
        blochs = blochs + [-b for b in blochs]
        weights = np.concatenate([weights, weights]) / 2
    return weights, blochs


def _mixing(mixing_components: Optional[int]) -> int:
    value = int(mixing_components or get_config().get('sampling.mixing_components', 4))
    if value < 1:
        raise ArgumentError("mixing_components debe ser ≥ 1")
    return value


def _aligned_fraction(aligned_fraction: Optional[float]) -> float:
    value = float(aligned_fraction if aligned_fraction is not None
                  else get_config().get('sampling.aligned_fraction', 0.5))
    if not 0.0 <= value <= 1.0:
        raise ArgumentError(f"aligned_fraction debe estar en [0, 1], no {value:g}")
    return value


def random_separable_moments(n: int, rng: np.random.Generator, mixing_components: Optional[int] = None,
                             zero_mean: bool = False,
                             aligned_fraction: Optional[float] = None) -> CollectiveMoments:
    weights, blochs = _random_components(n, rng, _mixing(mixing_components), zero_mean,
                                         _aligned_fraction(aligned_fraction))
    return mix_moments(weights, [product_moments(b) for b in blochs])


def random_separable_state(n: int, rng: np.random.Generator, mixing_components: Optional[int] = None,
                           zero_mean: bool = False, aligned_fraction: Optional[float] = None) -> DensityOperator:
    """Estado separable con la misma ley de muestreo que sample_separable."""
    weights, blochs = _random_components(n, rng, _mixing(mixing_components), zero_mean,
                                         _aligned_fraction(aligned_fraction))
    states = [product_state(b) for b in blochs]
    return DensityOperator.mixture(weights, states) if len(states) > 1 else states[0]


def sample_separable(n: int, count: int, seed: int, mixing_components: Optional[int] = None,
                     j_max: Optional[float] = None, zero_mean: bool = False,
                     start: int = 0, aligned_fraction: Optional[float] = None) -> pd.DataFrame:
    """
    Nube de puntos (K, <J>) de estados separables aleatorios.

    Cada mezcla tiene entre 1 y mixing_components productos con pesos de Dirichlet plano.
    Cada producto es, con probabilidad aligned_fraction, un producto alineado (ψ± sobre un
    eje aleatorio) y si no, un producto de qubits uniformes en la esfera. La muestra i usa
    su propio generador numpy.random.default_rng([seed, i]), así que cualquier rango de
    índices es reproducible por separado.

    Args:
        n: Número de qubits
        count: Número de muestras generadas
        seed: Semilla
        mixing_components: Máximo de componentes producto por mezcla
        j_max: Si se da, descarta muestras con |<J>| > j_max
        zero_mean: Empareja cada componente con su antípoda (<J> = 0)
        start: Índice de la primera muestra
        aligned_fraction: Probabilidad de un producto alineado (por defecto sampling.aligned_fraction)

    Returns:
        DataFrame con columnas kx, ky, kz, jx, jy, jz
    """
    if count < 1:
        raise ArgumentError("count debe ser ≥ 1")
    if n < 1:
        raise ArgumentError("n debe ser ≥ 1")
    mixing = _mixing(mixing_components)
    aligned = _aligned_fraction(aligned_fraction)
    rows = []
    for i in range(start, start + count):
        rng = np.random.default_rng([int(seed), i])
        m = random_separable_moments(n, rng, mixing, zero_mean, aligned)
        rows.append(np.concatenate([m.k2, m.j]))
    frame = pd.DataFrame(rows, columns=SAMPLE_COLUMNS)
    if j_max is not None:
        norms = np.linalg.norm(frame[['jx', 'jy', 'jz']].to_numpy(), axis=1)
        frame = frame[norms <= j_max].reset_index(drop=True)
    logger.info(f"Muestreados {len(frame)} puntos separables (n={n}, semilla={seed})")
    return frame


def hull_volume_fraction(points: np.ndarray, n: int, j: Sequence[float], trials: Optional[int] = None,
                         seed: int = 0) -> float:
    """Fracción Monte Carlo del volumen del poliedro K cubierta por la envolvente de `points`."""
    geometry = vertices_k_space(n, j)
    trials = int(trials or get_config().get('sampling.hull_trials', 1_000_000))
    verts = geometry.vertex_matrix()
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    rng = np.random.default_rng(seed)
    trial = rng.uniform(lo, hi, size=(trials, 3))
    inside = np.ones(trials, dtype=bool)
    for normal, offset in geometry.facets.values():
        inside &= trial @ normal <= offset + 1e-12
    if not inside.any():
        raise ArgumentError("El poliedro tiene volumen nulo")
    points = np.asarray(points, dtype=float)
    hull = Delaunay(points[ConvexHull(points).vertices])
    covered = hull.find_simplex(trial[inside]) >= 0
    return float(covered.mean())
