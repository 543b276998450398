"""
Operadores de momento angular colectivo y sus momentos de primer y segundo orden.

J_l = ½ Σ_i σ_l^(i). A partir de un estado (o de datos de medida) se obtienen el
vector de medias, la matriz de correlación C, la covarianza γ y 𝔛 = (N-1)γ + C.
"""
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Dict, Iterable, Sequence, Tuple, Union

import numpy as np

from spin_squeezing.core.operators import (
    PAULI, ComplexOperator, DensityOperator, partial_trace_array, pauli_string,
    _check_capacity, _tol,
)
from spin_squeezing.exceptions import ArgumentError, InconsistentMomentsError
from spin_squeezing.services.cache import cache_result

logger = logging.getLogger(__name__)

AXES = ('x', 'y', 'z')
AXIS_INDEX = {axis: i for i, axis in enumerate(AXES)}

SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BlochVector:
    """Vector de Bloch de un qubit, |r| ≤ 1."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if np.linalg.norm(self.as_array()) > 1 + 1e-12:
            raise ArgumentError(f"Vector de Bloch con norma mayor que 1: {self.as_array()}")

    @classmethod
    def from_array(cls, r: Sequence[float]) -> 'BlochVector':
        r = np.asarray(r, dtype=float).ravel()
        if r.shape != (3,):
            raise ArgumentError(f"Un vector de Bloch tiene 3 componentes, no {r.shape}")
        return cls(float(r[0]), float(r[1]), float(r[2]))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> 'BlochVector':
        return cls(np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def density(self) -> np.ndarray:
        return 0.5 * (PAULI['0'] + self.x * PAULI['x'] + self.y * PAULI['y'] + self.z * PAULI['z'])


BlochLike = Union[BlochVector, Sequence[float], np.ndarray]


def bloch_array(blochs: Iterable[BlochLike]) -> np.ndarray:
    """Apila vectores de Bloch en un array (n, 3) validado."""
    rows = [b.as_array() if isinstance(b, BlochVector) else BlochVector.from_array(b).as_array()
            for b in blochs]
    if not rows:
        raise ArgumentError("Se necesita al menos un vector de Bloch")
    return np.vstack(rows)


@dataclass(frozen=True)
class CollectiveMoments:
    """Momentos colectivos: n, j = <J>, k2 = <J_l²>, C, γ y 𝔛."""

    n: int
    j: np.ndarray
    k2: np.ndarray
    c: np.ndarray
    gamma: np.ndarray
    chi: np.ndarray

    @classmethod
    def from_measurements(cls, n: int, j: Sequence[float], c: Sequence[Sequence[float]],
                          validate: bool = True) -> 'CollectiveMoments':
        """
        Construye los momentos a partir de <J_l> y la matriz de correlación simetrizada.

        Args:
            n: Número de qubits
            j: Medias <J_x>, <J_y>, <J_z>
            c: Matriz C_kl = ½<J_k J_l + J_l J_k>
            validate: Si es False se omiten las comprobaciones físicas

        Returns:
            CollectiveMoments con γ y 𝔛 recalculados
        """
        if int(n) != n or n < 1:
            raise ArgumentError(f"n debe ser un entero positivo, se recibió {n}")
        n = int(n)
        j = np.asarray(j, dtype=float).ravel()
        c = np.asarray(c, dtype=float)
        if j.shape != (3,) or c.shape != (3, 3):
            raise ArgumentError(f"Formas inválidas: j {j.shape}, c {c.shape}")
        if not (np.all(np.isfinite(j)) and np.all(np.isfinite(c))):
            raise ArgumentError("Momentos no finitos")
        scale = max(1.0, float(np.max(np.abs(c))))
        if np.max(np.abs(c - c.T)) > _tol('hermitian_tol', 1e-10) * scale:
            raise ArgumentError("La matriz de correlación no es simétrica")
        c = 0.5 * (c + c.T)
        gamma = c - np.outer(j, j)
        chi = (n - 1) * gamma + c

        if validate:
            tol = _tol('psd_tol', 1e-9)
            if np.any(np.abs(j) > n / 2 + tol):
                raise InconsistentMomentsError(f"|<J_l>| supera N/2: {j}")
            if np.trace(c) > n * (n + 2) / 4 + tol * scale:
                raise InconsistentMomentsError(
                    f"Tr C = {np.trace(c):.6g} supera N(N+2)/4 = {n * (n + 2) / 4:.6g}")
            if np.linalg.eigvalsh(gamma)[0] < -tol * scale:
                raise InconsistentMomentsError("La matriz de covarianza no es semidefinida positiva")

        return cls(n, _readonly(j), _readonly(np.diag(c)), _readonly(c), _readonly(gamma), _readonly(chi))

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.gamma).copy()

    @property
    def trace_c(self) -> float:
        return float(np.trace(self.c))

    @property
    def trace_gamma(self) -> float:
        return float(np.trace(self.gamma))

    @property
    def j_norm2(self) -> float:
        return float(self.j @ self.j)

    def chi_eigenvalues(self) -> np.ndarray:
        """Autovalores de 𝔛 en orden ascendente."""
        return np.linalg.eigvalsh(self.chi)

    def to_dict(self) -> Dict:
        return {
            'n': self.n,
            'j': self.j.tolist(),
            'c': self.c.tolist(),
            'k2': self.k2.tolist(),
            'gamma': self.gamma.tolist(),
            'chi': self.chi.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict, validate: bool = True) -> 'CollectiveMoments':
        try:
            return cls.from_measurements(data['n'], data['j'], data['c'], validate=validate)
        except KeyError as e:
            raise ArgumentError(f"Falta el campo {e} en los momentos") from e


@cache_result(cache_key_prefix="collective")
def _collective_matrix(axis: str, n: int) -> np.ndarray:
    _check_capacity(2 ** n)
    dim = 2 ** n
    if axis == 'z':
        # σ_z diagonal: J_z = ½ Σ (1 - 2 b_i)
        bits = (np.arange(dim)[:, None] >> np.arange(n)[None, :]) & 1
        return np.diag(0.5 * (n - 2 * bits.sum(axis=1))).astype(complex)
    total = np.zeros((dim, dim), dtype=complex)
    for site in range(n):
        total += pauli_string({site: axis}, n)
    return 0.5 * total


def collective_operator(axis: str, n: int) -> ComplexOperator:
    """J_axis para n qubits."""
    if axis not in AXIS_INDEX:
        raise ArgumentError(f"Eje desconocido: {axis!r}")
    if n < 1:
        raise ArgumentError("n debe ser positivo")
    return ComplexOperator(_collective_matrix(axis, n), (2,) * n)


@cache_result(cache_key_prefix="collective")
def moment_operators(n: int) -> Dict[str, np.ndarray]:
    """J_l y productos simetrizados ½{J_k, J_l} indexados por 'x', 'xy', ..."""
    ops = {axis: _collective_matrix(axis, n) for axis in AXES}
    for a in range(3):
        for b in range(a, 3):
            ja, jb = ops[AXES[a]], ops[AXES[b]]
            prod = ja @ jb
            ops[AXES[a] + AXES[b]] = 0.5 * (prod + prod.conj().T)
    return ops


def moments_from_expectation(n: int, expect: Callable[[str], float],
                             validate: bool = True) -> CollectiveMoments:
    """Ensambla los momentos a partir de una función de valores esperados por clave."""
    j = [expect(axis) for axis in AXES]
    c = np.zeros((3, 3))
    for a in range(3):
        for b in range(a, 3):
            c[a, b] = c[b, a] = expect(AXES[a] + AXES[b])
    return CollectiveMoments.from_measurements(n, j, c, validate=validate)


def _qubit_count(rho: DensityOperator) -> int:
    if any(d != 2 for d in rho.local_dims):
        raise ArgumentError(f"Se esperaban qubits, dimensiones locales {rho.local_dims}")
    return rho.n_sites


def moments(rho: DensityOperator) -> CollectiveMoments:
    """Momentos colectivos de un estado de n qubits."""
    n = _qubit_count(rho)
    ops = moment_operators(n)
    m = rho.entries
    return moments_from_expectation(n, lambda key: float(np.einsum('ij,ji->', m, ops[key]).real))


def rotate_moments(m: CollectiveMoments, o: np.ndarray) -> CollectiveMoments:
    """Momentos en un sistema de ejes rotado: j' = O j, C' = O C Oᵀ."""
    o = np.asarray(o, dtype=float)
    if o.shape != (3, 3) or np.max(np.abs(o @ o.T - np.eye(3))) > _tol('orthogonality_tol', 1e-9):
        raise ArgumentError("La matriz de rotación no es ortogonal")
    return CollectiveMoments.from_measurements(m.n, o @ m.j, o @ m.c @ o.T, validate=False)


def mix_moments(weights: Sequence[float], parts: Sequence[CollectiveMoments]) -> CollectiveMoments:
    """Momentos de una mezcla: j y C son lineales en el estado."""
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(parts) or not parts:
        raise ArgumentError("Número de pesos y de componentes distinto")
    if np.any(weights < 0) or not np.isclose(weights.sum(), 1.0):
        raise ArgumentError("Los pesos deben ser no negativos y sumar 1")
    n = parts[0].n
    if any(p.n != n for p in parts):
        raise ArgumentError("Todas las componentes deben tener el mismo n")
    j = sum(w * p.j for w, p in zip(weights, parts))
    c = sum(w * p.c for w, p in zip(weights, parts))
    return CollectiveMoments.from_measurements(n, j, c, validate=False)


def reduced_av2(rho: DensityOperator) -> DensityOperator:
    """Promedio de los estados reducidos de dos qubits sobre pares ordenados (i, j), i ≠ j."""
    n = _qubit_count(rho)
    if n < 2:
        raise ArgumentError("reduced_av2 requiere al menos 2 qubits")
    acc = np.zeros((4, 4), dtype=complex)
    for i in range(n):
        for k in range(i + 1, n):
            r = partial_trace_array(rho.entries, rho.local_dims, (i, k))
            acc += r + SWAP @ r @ SWAP
    return DensityOperator.from_matrix(acc / (n * (n - 1)), (2, 2))


@cache_result(cache_key_prefix="collective")
def _global_pauli(axis: str, n: int) -> np.ndarray:
    return reduce(np.kron, [PAULI[axis]] * n)


def twirl(rho: DensityOperator) -> DensityOperator:
    """Promedio sobre rotaciones π globales: anula <J> y conserva <J_l²>."""
    n = _qubit_count(rho)
    m = rho.entries
    acc = m.copy()
    for axis in AXES:
        u = _global_pauli(axis, n)
        acc = acc + u @ m @ u
    return DensityOperator.from_matrix(0.25 * acc, rho.local_dims)


def product_moments(blochs: Iterable[BlochLike]) -> CollectiveMoments:
    """Momentos en forma cerrada de un estado producto con los vectores de Bloch dados."""
    r = bloch_array(blochs)
    n = r.shape[0]
    s = r.sum(axis=0)
    j = 0.5 * s
    # C_kl = N/4 δ_kl + ¼ Σ_{i≠j} r_ik r_jl
    c = 0.25 * n * np.eye(3) + 0.25 * (np.outer(s, s) - r.T @ r)
    return CollectiveMoments.from_measurements(n, j, c, validate=False)
