"""
Pruebas unitarias para los modelos de espín y los estados térmicos.
"""
import unittest

import numpy as np

from spin_squeezing.core.collective import collective_operator, moments
from spin_squeezing.core.models import (
    HamiltonianSpec, ThermalEnsemble, build_hamiltonian, detection_example_state, dicke_state,
    ground_state, product_state, thermal_state,
)
from spin_squeezing.exceptions import ArgumentError
from spin_squeezing.processing import criteria


def cyclic_shift(h: np.ndarray, n: int, shift: int) -> np.ndarray:
    """Conjuga H con la traslación cíclica de sitios k -> k + shift."""
    axes = [(k - shift) % n for k in range(n)]
    t = h.reshape((2,) * (2 * n))
    return np.transpose(t, axes + [n + a for a in axes]).reshape(h.shape)


class TestHamiltonianSpec(unittest.TestCase):
    """Caso de prueba para la validación de modelos."""

    def test_modelo_desconocido(self):
        with self.assertRaises(ArgumentError):
            HamiltonianSpec('potts', 3)

    def test_nanotubo_requiere_nueve_sitios(self):
        with self.assertRaises(ArgumentError):
            HamiltonianSpec('nanotube', 8)

    def test_parametro_desconocido(self):
        with self.assertRaises(ArgumentError):
            HamiltonianSpec('ising_transverse', 3, {'J': 1.0})

    def test_tamano_minimo(self):
        with self.assertRaises(ArgumentError):
            HamiltonianSpec('xy_chain', 1)

    def test_parametros_por_defecto(self):
        spec = HamiltonianSpec('lmg', 4, {'lambda': -1.0})
        self.assertEqual(spec.params['gamma'], 1.0)
        self.assertEqual(spec.params['h'], 0.0)

    def test_xy_completo(self):
        spec = HamiltonianSpec.xy_complete(5)
        self.assertEqual(spec.kind, 'lmg')
        self.assertEqual(spec.label(), 'xy_complete')
        self.assertEqual(HamiltonianSpec.from_dict({'kind': 'xy_complete', 'n': 5}), spec)

    def test_etiqueta_ising(self):
        self.assertEqual(HamiltonianSpec('ising_transverse', 3, {'B': 0.5}).label(), 'ising_transverse(B=0.5)')

    def test_diccionario(self):
        spec = HamiltonianSpec('ising_transverse', 4, {'B': 2.0})
        self.assertEqual(HamiltonianSpec.from_dict(spec.to_dict()), spec)

    def test_modelo_custom_sin_terminos(self):
        with self.assertRaises(ArgumentError):
            HamiltonianSpec('custom', 2)


class TestBuildHamiltonian(unittest.TestCase):
    """Caso de prueba para la construcción de Hamiltonianos."""

    def test_hermiticos(self):
        specs = [HamiltonianSpec(kind, 4) for kind in ('heisenberg_chain', 'xy_chain', 'heisenberg_complete',
                                                      'lmg', 'ising_transverse')]
        specs.append(HamiltonianSpec('nanotube', 9))
        for spec in specs:
            h = build_hamiltonian(spec).entries
            np.testing.assert_allclose(h, h.conj().T, atol=1e-12, err_msg=spec.label())

    def test_invariancia_por_traslacion(self):
        """Las cadenas conmutan con la traslación de un sitio; el nanotubo sólo con la de tres."""
        for kind in ('heisenberg_chain', 'xy_chain', 'ising_transverse'):
            h = build_hamiltonian(HamiltonianSpec(kind, 5)).entries
            np.testing.assert_allclose(cyclic_shift(h, 5, 1), h, atol=1e-12, err_msg=kind)
        tube = build_hamiltonian(HamiltonianSpec('nanotube', 9)).entries
        np.testing.assert_allclose(cyclic_shift(tube, 9, 3), tube, atol=1e-9)
        self.assertGreater(np.max(np.abs(cyclic_shift(tube, 9, 1) - tube)), 1.0)

    def test_lmg(self):
        """H_LMG = -(λ/N)(J_x² + γ J_y²) - h J_z."""
        spec = HamiltonianSpec('lmg', 3, {'lambda': 2.0, 'gamma': 0.5, 'h': 0.3})
        jx, jy, jz = (collective_operator(a, 3).entries for a in 'xyz')
        expected = -(2.0 / 3) * (jx @ jx + 0.5 * jy @ jy) - 0.3 * jz
        np.testing.assert_allclose(build_hamiltonian(spec).entries, expected, atol=1e-12)

    def test_heisenberg_completo_es_casimir(self):
        """Los autovalores de J² para tres espines son 3/4 y 15/4."""
        w = np.linalg.eigvalsh(build_hamiltonian(HamiltonianSpec('heisenberg_complete', 3)).entries)
        np.testing.assert_allclose(w, [0.75] * 4 + [3.75] * 4, atol=1e-12)

    def test_modelo_custom(self):
        spec = HamiltonianSpec('custom', 2, {'terms': [{'coef': 1.0, 'ops': {'0': 'z'}}]})
        w = np.linalg.eigvalsh(build_hamiltonian(spec).entries)
        np.testing.assert_allclose(w, [-1, -1, 1, 1], atol=1e-12)

    def test_termino_custom_invalido(self):
        with self.assertRaises(ArgumentError):
            HamiltonianSpec('custom', 2, {'terms': [{'coef': 1.0, 'ops': {'5': 'z'}}]})


class TestStates(unittest.TestCase):
    """Caso de prueba para estados térmicos, de Dicke y producto."""

    def test_temperatura_cero_da_el_singlete(self):
        rho = ground_state(HamiltonianSpec('heisenberg_chain', 2))
        singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
        self.assertAlmostEqual(float(np.real(singlet @ rho.entries @ singlet)), 1.0, places=9)

    def test_temperatura_alta(self):
        h = build_hamiltonian(HamiltonianSpec('xy_chain', 3))
        rho = thermal_state(h, 1e6)
        np.testing.assert_allclose(rho.entries, np.eye(8) / 8, atol=1e-5)

    def test_temperatura_negativa(self):
        h = build_hamiltonian(HamiltonianSpec('xy_chain', 3))
        with self.assertRaises(ArgumentError):
            thermal_state(h, -1.0)

    def test_ensamble_termico(self):
        """Los momentos proyectados coinciden con los del estado construido."""
        ensemble = ThermalEnsemble.for_model(HamiltonianSpec('xy_chain', 4))
        direct = moments(ensemble.state(1.3))
        projected = ensemble.moments(1.3)
        np.testing.assert_allclose(projected.c, direct.c, atol=1e-10)
        np.testing.assert_allclose(projected.j, direct.j, atol=1e-10)

    def test_margen_8b_en_la_temperatura_critica(self):
        """Cadena de Heisenberg de 3 sitios: el margen de 8b cambia de signo en T = 6/ln 3."""
        ensemble = ThermalEnsemble.for_model(HamiltonianSpec('heisenberg_chain', 3))
        margin = [r.margin for r in criteria.evaluate_ossi(ensemble.moments(5.46))
                  if r.criterion_id == 'OSSI-8b'][0]
        self.assertLess(abs(margin), 1e-3)

    def test_dicke_invalido(self):
        with self.assertRaises(ArgumentError):
            dicke_state(3, 4)

    def test_dicke_es_simetrico(self):
        """|1,2> = (|01> + |10>)/√2."""
        rho = dicke_state(2, 1)
        psi = np.array([0, 1, 1, 0]) / np.sqrt(2)
        self.assertAlmostEqual(float(np.real(psi @ rho.entries @ psi)), 1.0, places=12)

    def test_estado_producto(self):
        rho = product_state([[0, 0, 1], [0, 0, -1]])
        np.testing.assert_allclose(rho.entries, np.diag([0, 1, 0, 0]), atol=1e-12)

    def test_ejemplo_desconocido(self):
        with self.assertRaises(ArgumentError):
            detection_example_state('nope')

    def test_ejemplos_con_alias(self):
        """Los nombres descriptivos devuelven los mismos estados."""
        for name, alias in (('sec5_8c', 'easy_plane'), ('sec5_orig', 'one_axis_field')):
            rho = detection_example_state(name)
            self.assertEqual(rho.n_sites, 8)
            np.testing.assert_allclose(detection_example_state(alias).entries, rho.entries, atol=1e-12)


if __name__ == '__main__':
    unittest.main()
