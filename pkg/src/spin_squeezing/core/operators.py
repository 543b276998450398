"""
Sustrato de matrices complejas densas sobre productos tensoriales de qubits.

Convenciones: el sitio 0 es el índice de variación más lenta y |0> es el estado
con σ_z = +1.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from spin_squeezing.exceptions import ArgumentError, CapacityError, NumericError
from spin_squeezing.services.cache import cache_result
from spin_squeezing.services.config import get_config

logger = logging.getLogger(__name__)

# Controladores LAPACK probados en orden cuando eigh no converge
EIGH_DRIVERS = ('evd', 'evr', 'ev')


def _pauli(entries) -> np.ndarray:
    m = np.array(entries, dtype=complex)
    m.setflags(write=False)
    return m


PAULI = {
    '0': _pauli([[1, 0], [0, 1]]),
    'x': _pauli([[0, 1], [1, 0]]),
    'y': _pauli([[0, -1j], [1j, 0]]),
    'z': _pauli([[1, 0], [0, -1]]),
}


def max_dimension() -> int:
    """Dimensión máxima admitida (2**numerics.max_qubits)."""
    return 2 ** int(get_config().get('numerics.max_qubits', 12))


def _tol(name: str, default: float) -> float:
    return float(get_config().get(f'numerics.{name}', default))


def _check_capacity(dim: int):
    limit = max_dimension()
    if dim > limit:
        raise CapacityError(f"Dimensión {dim} supera el máximo configurado {limit}")


@dataclass(frozen=True)
class ComplexOperator:
    """Matriz compleja cuadrada inmutable con su estructura de sitios."""

    entries: np.ndarray
    local_dims: Tuple[int, ...]

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ArgumentError(f"Se esperaba una matriz cuadrada, forma {entries.shape}")
        dims = tuple(int(d) for d in self.local_dims)
        if not dims or any(d < 1 for d in dims):
            raise ArgumentError(f"Dimensiones locales inválidas: {self.local_dims}")
        if int(np.prod(dims)) != entries.shape[0]:
            raise ArgumentError(
                f"El producto de dimensiones locales {dims} no coincide con {entries.shape[0]}")
        _check_capacity(entries.shape[0])
        if not np.all(np.isfinite(entries)):
            raise NumericError("La matriz contiene valores no finitos")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'local_dims', dims)

    @classmethod
    def qubits(cls, entries) -> 'ComplexOperator':
        """Interpreta la matriz como operador sobre qubits."""
        dim = np.shape(entries)[0]
        n = int(round(np.log2(dim))) if dim > 0 else 0
        if dim < 2 or 2 ** n != dim:
            raise ArgumentError(f"La dimensión {dim} no es una potencia de 2")
        return cls(entries, (2,) * n)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_sites(self) -> int:
        return len(self.local_dims)

    def dagger(self) -> 'ComplexOperator':
        return ComplexOperator(self.entries.conj().T, self.local_dims)


@dataclass(frozen=True)
class DensityOperator:
    """Operador hermítico, de traza unidad y semidefinido positivo."""

    op: ComplexOperator

    def __post_init__(self):
        m = self.op.entries
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > _tol('hermitian_tol', 1e-10) * scale:
            raise ArgumentError("El operador densidad no es hermítico")
        if abs(np.trace(m).real - 1.0) > _tol('trace_tol', 1e-10):
            raise ArgumentError(f"Traza {np.trace(m).real:.12g} distinta de 1")
        sym = 0.5 * (m + m.conj().T)
        lam_min = float(la.eigvalsh(sym, subset_by_index=[0, 0])[0])
        if lam_min < -_tol('psd_tol', 1e-9):
            raise ArgumentError(f"El operador densidad no es positivo (λ_min={lam_min:.3e})")
        object.__setattr__(self, 'op', ComplexOperator(sym, self.op.local_dims))

    @classmethod
    def from_matrix(cls, entries, local_dims: Sequence[int] = None) -> 'DensityOperator':
        if local_dims is None:
            return cls(ComplexOperator.qubits(entries))
        return cls(ComplexOperator(entries, tuple(local_dims)))

    @classmethod
    def pure(cls, vector, local_dims: Sequence[int] = None) -> 'DensityOperator':
        """Proyector sobre un vector de estado (se normaliza)."""
        psi = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if norm == 0 or not np.isfinite(norm):
            raise ArgumentError("Vector de estado nulo o no finito")
        psi = psi / norm
        return cls.from_matrix(np.outer(psi, psi.conj()), local_dims)

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence['DensityOperator']) -> 'DensityOperator':
        weights = np.asarray(weights, dtype=float)
        if len(weights) != len(states) or np.any(weights < 0) or not np.isclose(weights.sum(), 1.0):
            raise ArgumentError("Pesos de mezcla inválidos")
        dims = states[0].local_dims
        acc = sum(w * s.entries for w, s in zip(weights, states))
        return cls.from_matrix(acc, dims)

    @property
    def entries(self) -> np.ndarray:
        return self.op.entries

    @property
    def local_dims(self) -> Tuple[int, ...]:
        return self.op.local_dims

    @property
    def n_sites(self) -> int:
        return self.op.n_sites

    @property
    def dim(self) -> int:
        return self.op.dim


OperatorLike = Union[ComplexOperator, DensityOperator]


def _unwrap(x: OperatorLike) -> Tuple[np.ndarray, Tuple[int, ...]]:
    if isinstance(x, DensityOperator):
        return x.entries, x.local_dims
    if isinstance(x, ComplexOperator):
        return x.entries, x.local_dims
    raise ArgumentError(f"Se esperaba un operador, se recibió {type(x).__name__}")


@dataclass(frozen=True)
class Bipartition:
    """División de los sitios en dos conjuntos no vacíos; side_a es el menor."""

    side_a: Tuple[int, ...]
    side_b: Tuple[int, ...]

    @classmethod
    def of(cls, side: Iterable[int], n_sites: int) -> 'Bipartition':
        """Forma canónica: el lado menor primero; en empate, el que contiene el sitio 0."""
        a = tuple(sorted(set(int(s) for s in side)))
        if any(s < 0 or s >= n_sites for s in a):
            raise ArgumentError(f"Sitios fuera de rango en {a} para n={n_sites}")
        b = tuple(s for s in range(n_sites) if s not in a)
        if not a or not b:
            raise ArgumentError("Ambos lados de la bipartición deben ser no vacíos")
        if len(b) < len(a) or (len(b) == len(a) and b[0] < a[0]):
            a, b = b, a
        return cls(a, b)

    def labels(self, one_based: bool = True) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        shift = 1 if one_based else 0
        return tuple(s + shift for s in self.side_a), tuple(s + shift for s in self.side_b)


def all_bipartitions(n_sites: int) -> Iterator[Bipartition]:
    """Enumera las 2^(n-1) - 1 biparticiones canónicas."""
    if n_sites < 2:
        raise ArgumentError("Se necesitan al menos 2 sitios para biparticionar")
    for size in range(1, n_sites // 2 + 1):
        for side in itertools.combinations(range(n_sites), size):
            if 2 * size == n_sites and side[0] != 0:
                continue
            yield Bipartition(side, tuple(s for s in range(n_sites) if s not in side))


def kron(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    """Producto tensorial; los sitios de `a` preceden a los de `b`."""
    _check_capacity(a.dim * b.dim)
    return ComplexOperator(np.kron(a.entries, b.entries), a.local_dims + b.local_dims)


def pauli_string(ops: Mapping[int, str], n_sites: int) -> np.ndarray:
    """Producto tensorial de Paulis en los sitios dados e identidad en el resto."""
    _check_capacity(2 ** n_sites)
    for site, label in ops.items():
        if not 0 <= site < n_sites or label not in PAULI:
            raise ArgumentError(f"Término de Pauli inválido: sitio {site}, eje {label!r}")
    factors = [PAULI[ops.get(site, '0')] for site in range(n_sites)]
    return reduce(np.kron, factors)


def partial_trace_array(entries: np.ndarray, dims: Tuple[int, ...], keep: Sequence[int]) -> np.ndarray:
    """Traza parcial sobre arrays sin validar; conserva el orden de `keep`."""
    n = len(dims)
    keep = tuple(keep)
    t = entries.reshape(dims + dims)
    rows = list(range(n))
    cols = [s if s not in keep else n + s for s in range(n)]
    out = list(keep) + [n + s for s in keep]
    reduced = np.einsum(t, rows + cols, out)
    d = int(np.prod([dims[s] for s in keep]))
    return reduced.reshape(d, d)


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Traza parcial que conserva los sitios `keep` en orden ascendente."""
    entries, dims = _unwrap(rho)
    keep = tuple(sorted(set(int(s) for s in keep)))
    if not keep or any(s < 0 or s >= len(dims) for s in keep):
        raise ArgumentError(f"Conjunto de sitios a conservar inválido: {keep}")
    return DensityOperator.from_matrix(partial_trace_array(entries, dims, keep),
                                       [dims[s] for s in keep])


def partial_transpose_array(entries: np.ndarray, dims: Tuple[int, ...], side_a: Sequence[int]) -> np.ndarray:
    n = len(dims)
    perm = list(range(2 * n))
    for s in side_a:
        perm[s], perm[n + s] = n + s, s
    d = entries.shape[0]
    return np.transpose(entries.reshape(dims + dims), perm).reshape(d, d)


def partial_transpose(rho: OperatorLike, part: Bipartition) -> ComplexOperator:
    """Transpuesta respecto a los índices de `part.side_a`."""
    entries, dims = _unwrap(rho)
    _check_part(part, len(dims))
    return ComplexOperator(partial_transpose_array(entries, dims, part.side_a), dims)


def realign_array(entries: np.ndarray, dims: Tuple[int, ...], part: Bipartition) -> np.ndarray:
    n = len(dims)
    order = list(part.side_a) + list(part.side_b)
    t = np.transpose(entries.reshape(dims + dims), order + [n + s for s in order])
    da = int(np.prod([dims[s] for s in part.side_a]))
    db = int(np.prod([dims[s] for s in part.side_b]))
    # R[(i,j),(k,l)] = ρ[(i,k),(j,l)]
    return t.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)


def realign(rho: OperatorLike, part: Bipartition) -> np.ndarray:
    """Matriz realineada de dimensión dA² x dB²."""
    entries, dims = _unwrap(rho)
    _check_part(part, len(dims))
    return realign_array(entries, dims, part)


def _check_part(part: Bipartition, n_sites: int):
    sites = sorted(part.side_a + part.side_b)
    if sites != list(range(n_sites)):
        raise ArgumentError(f"La bipartición {part} no cubre los {n_sites} sitios")


def _hermitian_array(h: Union[OperatorLike, np.ndarray]) -> np.ndarray:
    m = h if isinstance(h, np.ndarray) else _unwrap(h)[0]
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"Se esperaba una matriz cuadrada, forma {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericError("La matriz contiene valores no finitos")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > _tol('hermitian_tol', 1e-10) * scale:
        raise NumericError("La matriz no es hermítica")
    return 0.5 * (m + m.conj().T)


@cache_result(cache_key_prefix="spectrum")
def _eigh_cached(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    for attempt in Retrying(stop=stop_after_attempt(len(EIGH_DRIVERS)),
                            retry=retry_if_exception_type(la.LinAlgError),
                            reraise=True):
        with attempt:
            driver = EIGH_DRIVERS[attempt.retry_state.attempt_number - 1]
            if attempt.retry_state.attempt_number > 1:
                logger.warning(f"eigh no convergió; reintentando con el controlador {driver}")
            return la.eigh(m, driver=driver)


def herm_eig(h: Union[OperatorLike, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Descomposición espectral de una matriz hermítica.

    Args:
        h: Operador o matriz; se simetriza si la asimetría es menor que la tolerancia

    Returns:
        (autovalores ascendentes, autovectores en columnas), ambos de sólo lectura
    """
    try:
        return _eigh_cached(_hermitian_array(h))
    except la.LinAlgError as e:
        raise NumericError(f"La diagonalización no convergió: {e}") from e


def min_eigenvalue(m: np.ndarray) -> float:
    """Menor autovalor de una matriz hermítica (sin caché)."""
    return float(la.eigvalsh(m, subset_by_index=[0, 0], check_finite=False)[0])


def spectral_fn(h: OperatorLike, f: Callable[[np.ndarray], np.ndarray]) -> ComplexOperator:
    """Aplica `f` a los autovalores: V f(Λ) V†."""
    w, v = herm_eig(h)
    fw = np.asarray(f(w), dtype=complex)
    if fw.shape != w.shape:
        fw = np.array([f(x) for x in w], dtype=complex)
    if not np.all(np.isfinite(fw)):
        raise NumericError("La función espectral produjo valores no finitos")
    return ComplexOperator((v * fw) @ v.conj().T, _unwrap(h)[1])


def trace_norm(m: Union[np.ndarray, OperatorLike]) -> float:
    """Suma de valores singulares."""
    arr = m if isinstance(m, np.ndarray) else _unwrap(m)[0]
    return float(np.sum(la.svdvals(arr)))


def trace_distance(a: OperatorLike, b: OperatorLike) -> float:
    return 0.5 * trace_norm(_unwrap(a)[0] - _unwrap(b)[0])
