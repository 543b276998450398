"""
Modelos de espín de prueba: Hamiltonianos, estados térmicos, estados de Dicke y
estados producto.
"""
import itertools
import json
import logging
from dataclasses import dataclass, field
from math import comb
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np

from spin_squeezing.core.collective import (
    AXES, BlochLike, CollectiveMoments, bloch_array, collective_operator, moment_operators,
    moments_from_expectation,
)
from spin_squeezing.core.operators import (
    ComplexOperator, DensityOperator, herm_eig, pauli_string, _check_capacity,
)
from spin_squeezing.exceptions import ArgumentError
from spin_squeezing.services.cache import cache_result
from spin_squeezing.services.config import get_config

logger = logging.getLogger(__name__)

KINDS = ('heisenberg_chain', 'xy_chain', 'heisenberg_complete', 'lmg',
         'ising_transverse', 'nanotube', 'custom')

# Parámetros por defecto de cada familia
DEFAULT_PARAMS: Dict[str, Dict[str, Any]] = {
    'heisenberg_chain': {},
    'xy_chain': {},
    'heisenberg_complete': {},
    'lmg': {'lambda': 1.0, 'gamma': 1.0, 'h': 0.0},
    'ising_transverse': {'B': 1.0},
    # Acoplamientos en K; sitios con segundo vecino numerados desde 1
    'nanotube': {'c1': 200.0, 'c2': 140.0, 'c2_sites': [2, 3, 5, 6, 8, 9]},
    'custom': {},
}

NANOTUBE_SITES = 9


@dataclass(frozen=True)
class HamiltonianSpec:
    """Descripción simbólica de un modelo de espín (cadenas siempre periódicas)."""

    kind: str
    n: int
    params: Mapping[str, Any] = field(default_factory=dict)
    name: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"Modelo desconocido: {self.kind!r}. Opciones: {', '.join(KINDS)}")
        if int(self.n) != self.n or self.n < 2:
            raise ArgumentError(f"El modelo necesita n ≥ 2, se recibió {self.n}")
        if self.kind == 'nanotube' and self.n != NANOTUBE_SITES:
            raise ArgumentError(f"El nanotubo tiene {NANOTUBE_SITES} sitios")
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.kind]) - ({'terms'} if self.kind == 'custom' else set())
        if unknown:
            raise ArgumentError(f"Parámetros desconocidos para {self.kind}: {sorted(unknown)}")
        merged = {**DEFAULT_PARAMS[self.kind], **dict(self.params)}
        if self.kind == 'custom':
            _validate_terms(merged.get('terms'), int(self.n))
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'params', merged)

    @classmethod
    def xy_complete(cls, n: int) -> 'HamiltonianSpec':
        """Modelo XY totalmente conectado: LMG con λ = -1, γ = 1, h = 0."""
        return cls('lmg', n, {'lambda': -1.0, 'gamma': 1.0, 'h': 0.0}, name='xy_complete')

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'HamiltonianSpec':
        try:
            kind, n = data['kind'], data['n']
        except KeyError as e:
            raise ArgumentError(f"Falta el campo {e} en el modelo") from e
        if kind == 'xy_complete':
            return cls.xy_complete(n)
        return cls(kind, n, dict(data.get('params') or {}), data.get('name'))

    def to_dict(self) -> Dict[str, Any]:
        data = {'kind': self.kind, 'n': self.n, 'params': dict(self.params)}
        if self.name:
            data['name'] = self.name
        return data

    def key(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @property
    def family(self) -> str:
        return self.name or self.kind

    def label(self) -> str:
        if self.kind == 'ising_transverse':
            return f"ising_transverse(B={self.params['B']:g})"
        if self.kind == 'lmg' and not self.name:
            p = self.params
            return f"lmg(lambda={p['lambda']:g},gamma={p['gamma']:g},h={p['h']:g})"
        return self.family


def _validate_terms(terms, n: int):
    if not terms:
        raise ArgumentError("El modelo 'custom' necesita una lista 'terms'")
    for term in terms:
        ops = term.get('ops') if isinstance(term, Mapping) else None
        if not isinstance(ops, Mapping) or 'coef' not in term:
            raise ArgumentError(f"Término inválido: {term!r}")
        for site, axis in ops.items():
            if not 0 <= int(site) < n or axis not in AXES:
                raise ArgumentError(f"Operador inválido en el término {term!r}")


def _ring_bonds(n: int, distance: int = 1):
    # n = 2 cuenta el único enlace dos veces
    return [(k, (k + distance) % n) for k in range(n)]


def _coupling(n: int, i: int, j: int, axes: Sequence[str]) -> np.ndarray:
    return sum(pauli_string({i: a, j: a}, n) if i != j else np.eye(2 ** n) for a in axes)


@cache_result(cache_key_prefix="hamiltonian", key_fn=lambda spec: f":{spec.key()}")
def _hamiltonian_matrix(spec: HamiltonianSpec) -> np.ndarray:
    n, p = spec.n, spec.params
    _check_capacity(2 ** n)
    logger.debug(f"Construyendo Hamiltoniano {spec.label()} con n={n}")

    if spec.kind == 'heisenberg_chain':
        return sum(_coupling(n, i, j, AXES) for i, j in _ring_bonds(n))
    if spec.kind == 'xy_chain':
        return sum(_coupling(n, i, j, ('x', 'y')) for i, j in _ring_bonds(n))

    jx, jy, jz = (collective_operator(a, n).entries for a in AXES)
    if spec.kind == 'heisenberg_complete':
        return jx @ jx + jy @ jy + jz @ jz
    if spec.kind == 'lmg':
        return -(p['lambda'] / n) * (jx @ jx + p['gamma'] * (jy @ jy)) - p['h'] * jz
    if spec.kind == 'ising_transverse':
        h = sum(pauli_string({i: 'z', j: 'z'}, n) for i, j in _ring_bonds(n))
        return h + p['B'] * sum(pauli_string({i: 'x'}, n) for i in range(n))
    if spec.kind == 'nanotube':
        second = {s - 1 for s in p['c2_sites']}
        h = sum(p['c1'] / 4 * _coupling(n, i, j, AXES) for i, j in _ring_bonds(n))
        h = h + sum(p['c2'] / 4 * _coupling(n, i, j, AXES)
                    for i, j in _ring_bonds(n, 2) if i in second)
        return h
    # custom: Σ coef · Π σ
    return sum(float(t['coef']) * pauli_string({int(s): a for s, a in t['ops'].items()}, n)
               for t in p['terms'])


def build_hamiltonian(spec: HamiltonianSpec) -> ComplexOperator:
    """Matriz densa del Hamiltoniano descrito por `spec`."""
    return ComplexOperator(np.asarray(_hamiltonian_matrix(spec), dtype=complex), (2,) * spec.n)


def _boltzmann_weights(w: np.ndarray, t: float) -> np.ndarray:
    if t < 0 or not np.isfinite(t):
        raise ArgumentError(f"La temperatura debe ser finita y no negativa, se recibió {t}")
    shifted = w - w[0]
    if t == 0:
        weights = (shifted <= float(get_config().get('numerics.degeneracy_tol', 1e-9))).astype(float)
    else:
        weights = np.exp(-shifted / t)
    return weights / weights.sum()


def thermal_state(h: ComplexOperator, t: float) -> DensityOperator:
    """
    Estado de Gibbs exp(-H/T)/Z.

    Args:
        h: Hamiltoniano
        t: Temperatura; con t = 0 se devuelve el proyector normalizado sobre el espacio fundamental

    Returns:
        DensityOperator
    """
    w, v = herm_eig(h)
    weights = _boltzmann_weights(w, t)
    return DensityOperator.from_matrix((v * weights) @ v.conj().T, h.local_dims)


class ThermalEnsemble:
    """Estados térmicos de un Hamiltoniano a partir de una única diagonalización."""

    def __init__(self, hamiltonian: ComplexOperator, label: str = "custom"):
        self.hamiltonian = hamiltonian
        self.label = label
        self.n = hamiltonian.n_sites
        self.eigenvalues, self.eigenvectors = herm_eig(hamiltonian)
        self._diagonals: Optional[Dict[str, np.ndarray]] = None

    @classmethod
    def for_model(cls, spec: HamiltonianSpec) -> 'ThermalEnsemble':
        return cls(build_hamiltonian(spec), spec.label())

    def weights(self, t: float) -> np.ndarray:
        return _boltzmann_weights(self.eigenvalues, t)

    def matrix(self, t: float) -> np.ndarray:
        """Matriz densidad sin validar (para los detectores)."""
        v = self.eigenvectors
        return (v * self.weights(t)) @ v.conj().T

    def state(self, t: float) -> DensityOperator:
        return DensityOperator.from_matrix(self.matrix(t), self.hamiltonian.local_dims)

    def moments(self, t: float) -> CollectiveMoments:
        """Momentos colectivos a partir de las diagonales proyectadas, sin construir ρ."""
        if self._diagonals is None:
            v = self.eigenvectors
            self._diagonals = {key: np.einsum('ij,ij->j', v.conj(), op @ v).real
                               for key, op in moment_operators(self.n).items()}
        w = self.weights(t)
        return moments_from_expectation(self.n, lambda key: float(w @ self._diagonals[key]))


def ground_state(spec: HamiltonianSpec) -> DensityOperator:
    return thermal_state(build_hamiltonian(spec), 0.0)


def dicke_state(n: int, m: int) -> DensityOperator:
    """Estado de Dicke simétrico con m excitaciones (|1> tiene σ_z = -1)."""
    if n < 1 or not 0 <= m <= n:
        raise ArgumentError(f"Estado de Dicke inválido: n={n}, m={m}")
    _check_capacity(2 ** n)
    psi = np.zeros(2 ** n, dtype=complex)
    amplitude = 1 / np.sqrt(comb(n, m))
    for ones in itertools.combinations(range(n), m):
        psi[sum(1 << (n - 1 - s) for s in ones)] = amplitude
    return DensityOperator.pure(psi, (2,) * n)


def product_state(blochs: Sequence[BlochLike]) -> DensityOperator:
    """Producto tensorial de estados de un qubit (I + r·σ)/2."""
    r = bloch_array(blochs)
    _check_capacity(2 ** r.shape[0])
    factors = [0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]]) for x, y, z in r]
    m = factors[0]
    for f in factors[1:]:
        m = np.kron(m, f)
    return DensityOperator.from_matrix(m, (2,) * r.shape[0])


# nombre -> (n, T, coeficientes de J_x², J_y², J_z², J_z)
EXAMPLE_STATES = {
    'sec5_8c': (8, 3.0, (-1.0, -1.0, 7.0, 0.0)),
    'sec5_orig': (8, 0.3, (2.0, 0.0, 0.0, -1.0)),
}
EXAMPLE_ALIASES = {'easy_plane': 'sec5_8c', 'one_axis_field': 'sec5_orig'}


def detection_example_state(which: str) -> DensityOperator:
    """
    Estados térmicos de ejemplo detectados por las desigualdades pero con ρ_av2 PPT.

    'sec5_8c' (alias 'easy_plane'): N = 8, T = 3, H = 7J_z² - J_x² - J_y²; viola 8c(x,y,z).
    'sec5_orig' (alias 'one_axis_field'): N = 8, T = 0.3, H = 2J_x² - J_z; viola la compresión original.
    """
    name = EXAMPLE_ALIASES.get(which, which)
    if name not in EXAMPLE_STATES:
        options = ', '.join(list(EXAMPLE_STATES) + list(EXAMPLE_ALIASES))
        raise ArgumentError(f"Ejemplo desconocido: {which!r}. Opciones: {options}")
    n, t, (ax, ay, az, bz) = EXAMPLE_STATES[name]
    jx, jy, jz = (collective_operator(a, n).entries for a in AXES)
    h = ax * (jx @ jx) + ay * (jy @ jy) + az * (jz @ jz) + bz * jz
    return thermal_state(ComplexOperator(h, (2,) * n), t)
