"""
Pruebas unitarias para el poliedro de estados separables y el muestreo.
"""
import unittest

import numpy as np
import pandas as pd

from spin_squeezing.core.collective import moments
from spin_squeezing.exceptions import ArgumentError
from spin_squeezing.processing import polytope
from spin_squeezing.processing.polytope import (
    EIGEN_SPACE, K_SPACE, VARIANCE_SPACE, construct_vertex_state_A, construct_vertex_state_B,
    geometry_for, hull_volume_fraction, membership, sample_separable, vertices_eigen_space,
    vertices_k_space,
)

CASES = [(4, (0, 0, 0)), (10, (0, 0, 0)), (10, (0, 0, 4)), (4, (0, 0, 1))]


def expected_active(kind: str, axis: str):
    """Caras que pasan por A_axis o B_axis."""
    c_labels = {'x': 'OSSI-8c(y,z,x)', 'y': 'OSSI-8c(x,z,y)', 'z': 'OSSI-8c(x,y,z)'}
    d_labels = {'x': 'OSSI-8d(y,z,x)', 'y': 'OSSI-8d(x,z,y)', 'z': 'OSSI-8d(x,y,z)'}
    if kind == 'A':
        active = ['OSSI-8a', d_labels[axis]] + [c_labels[a] for a in 'xyz' if a != axis]
    else:
        active = ['OSSI-8b', c_labels[axis]] + [d_labels[a] for a in 'xyz' if a != axis]
    return sorted(active)


class TestVertices(unittest.TestCase):
    """Caso de prueba para los vértices en el espacio K."""

    def test_caras_activas(self):
        """A_m toca 8a, 8d(m) y 8c de los otros ejes; B_m toca 8b, 8c(m) y 8d de los otros."""
        for n, j in CASES:
            geometry = vertices_k_space(n, j)
            for label, vertex in geometry.vertices.items():
                kind, axis = label.split('_')
                self.assertEqual(geometry.active_facets(vertex, tol=1e-8), expected_active(kind, axis),
                                 msg=f"n={n}, j={j}, {label}")

    def test_vertices_dentro_del_poliedro(self):
        for n, j in CASES:
            geometry = vertices_k_space(n, j)
            for label, vertex in geometry.vertices.items():
                self.assertTrue(membership(vertex, K_SPACE, n, j).inside, msg=f"n={n}, j={j}, {label}")

    def test_seis_vertices_y_ocho_caras(self):
        geometry = vertices_k_space(4, (0, 0, 0))
        self.assertEqual(sorted(geometry.vertices), ['A_x', 'A_y', 'A_z', 'B_x', 'B_y', 'B_z'])
        self.assertEqual(len(geometry.facets), 8)

    def test_media_imposible(self):
        """|<J>| = 4 supera N/2 = 2 para cuatro qubits."""
        with self.assertRaises(ArgumentError):
            vertices_k_space(4, (0, 0, 4))

    def test_punto_fuera(self):
        """El origen viola 8b: Σ<J_l²> ≥ N/2 para estados separables."""
        result = membership([0, 0, 0], K_SPACE, 4, (0, 0, 0))
        self.assertFalse(result.inside)
        self.assertIn('OSSI-8b', [label for label, _ in result.violated_facets])

    def test_espacio_de_varianzas(self):
        variance = geometry_for(VARIANCE_SPACE, 6)
        k_space = vertices_k_space(6, (0, 0, 0))
        np.testing.assert_allclose(variance.vertex_matrix(), k_space.vertex_matrix())
        self.assertEqual(variance.space, VARIANCE_SPACE)

    def test_espacio_desconocido(self):
        with self.assertRaises(ArgumentError):
            geometry_for('r-space', 4)

    def test_espacio_de_autovalores(self):
        """Los vértices del espacio de autovalores cumplen las caras EIG-28."""
        for n, j in CASES:
            geometry = vertices_eigen_space(n, j)
            for label, vertex in geometry.vertices.items():
                self.assertTrue(membership(vertex, EIGEN_SPACE, n, j).inside, msg=f"n={n}, {label}")

    def test_obj(self):
        obj = vertices_k_space(4, (0, 0, 0)).to_obj()
        lines = obj.splitlines()
        self.assertEqual(sum(1 for line in lines if line.startswith('v ')), 6)
        self.assertEqual(sum(1 for line in lines if line.startswith('f ')), 8)

    def test_diccionario(self):
        data = vertices_k_space(4, (0, 0, 1)).to_dict()
        self.assertEqual(data['space'], K_SPACE)
        self.assertEqual(len(data['facets']), 8)
        self.assertEqual(data['j'], [0.0, 0.0, 1.0])


class TestTenQubitPolytope(unittest.TestCase):
    """Poliedro de diez qubits con <J> = 0 y con <J> = (0, 0, 4)."""

    def test_coordenadas_de_los_vertices(self):
        vertices = vertices_k_space(10, (0, 0, 0)).vertices
        for i, axis in enumerate('xyz'):
            a = np.full(3, 2.5)
            a[i] = 25.0
            b = np.full(3, 2.5)
            b[i] = 0.0
            np.testing.assert_allclose(vertices[f"A_{axis}"], a, atol=1e-12)
            np.testing.assert_allclose(vertices[f"B_{axis}"], b, atol=1e-12)

    def test_vertice_b_exacto_con_diez_qubits(self):
        """Con <J> = 0 y N par, M = 5 es entero y B_x se alcanza exactamente."""
        state, exact = construct_vertex_state_B(10, (0, 0, 0), 'x')
        self.assertTrue(exact)
        np.testing.assert_allclose(moments(state).k2, [0.0, 2.5, 2.5], atol=1e-9)

    def test_poliedro_con_media_contenido(self):
        """Los vértices del poliedro con <J> = (0, 0, 4) caen dentro del de <J> = 0."""
        for label, vertex in vertices_k_space(10, (0, 0, 4)).vertices.items():
            result = membership(vertex, K_SPACE, 10, (0, 0, 0))
            self.assertTrue(result.inside, f"{label} viola {result.violated_facets}")


class TestVertexStates(unittest.TestCase):
    """Caso de prueba para los estados que realizan los vértices."""

    def test_vertice_a(self):
        """A_z con <J> = (0, 0, 1) y N = 4 mezcla con p = 3/4."""
        n, j = 4, (0, 0, 1)
        geometry = vertices_k_space(n, j)
        for axis in 'xyz':
            m = moments(construct_vertex_state_A(n, j, axis))
            np.testing.assert_allclose(m.j, j, atol=1e-12)
            np.testing.assert_allclose(m.k2, geometry.vertices[f"A_{axis}"], atol=1e-12)
        self.assertAlmostEqual(geometry.vertices['A_x'][0], 3.25, places=12)
        _, p, _, _ = polytope._vertex_blochs(n, j, 'z')
        self.assertAlmostEqual(p, 0.75, places=12)

    def test_vertice_b_exacto(self):
        n, j = 4, (0, 0, 1)
        state, exact = construct_vertex_state_B(n, j, 'z')
        self.assertTrue(exact)
        m = moments(state)
        np.testing.assert_allclose(m.j, j, atol=1e-12)
        np.testing.assert_allclose(m.k2, vertices_k_space(n, j).vertices['B_z'], atol=1e-12)

    def test_vertice_b_aproximado(self):
        """Con N = 3 y <J> = 0, Np = 3/2 no es entero: desviación de a lo sumo 1/4."""
        state, exact = construct_vertex_state_B(3, (0, 0, 0), 'z')
        self.assertFalse(exact)
        m = moments(state)
        np.testing.assert_allclose(m.j, 0, atol=1e-12)
        deviation = np.max(np.abs(m.k2 - vertices_k_space(3, (0, 0, 0)).vertices['B_z']))
        self.assertLessEqual(deviation, 0.25 + 1e-9)

    def test_eje_desconocido(self):
        with self.assertRaises(ArgumentError):
            construct_vertex_state_A(4, (0, 0, 0), 'w')


class TestSampling(unittest.TestCase):
    """Caso de prueba para la nube de estados separables."""

    def test_reproducible(self):
        first = sample_separable(4, 20, seed=7)
        second = sample_separable(4, 20, seed=7)
        pd.testing.assert_frame_equal(first, second)
        self.assertEqual(list(first.columns), polytope.SAMPLE_COLUMNS)

    def test_rangos_independientes(self):
        """Las muestras [0, 10) y [10, 20) coinciden con las 20 generadas de una vez."""
        whole = sample_separable(5, 20, seed=3)
        parts = pd.concat([sample_separable(5, 10, seed=3),
                           sample_separable(5, 10, seed=3, start=10)], ignore_index=True)
        pd.testing.assert_frame_equal(whole, parts)

    def test_semillas_distintas(self):
        self.assertFalse(sample_separable(4, 5, seed=1).equals(sample_separable(4, 5, seed=2)))

    def test_filtro_de_media(self):
        frame = sample_separable(6, 50, seed=11, j_max=1.0)
        norms = np.linalg.norm(frame[['jx', 'jy', 'jz']].to_numpy(), axis=1)
        self.assertTrue(np.all(norms <= 1.0))

    def test_media_nula(self):
        frame = sample_separable(6, 20, seed=5, zero_mean=True)
        np.testing.assert_allclose(frame[['jx', 'jy', 'jz']].to_numpy(), 0, atol=1e-12)

    def test_muestras_dentro_del_poliedro(self):
        frame = sample_separable(6, 100, seed=13)
        for row in frame.itertuples(index=False):
            point = (row.kx, row.ky, row.kz)
            self.assertTrue(membership(point, K_SPACE, 6, (row.jx, row.jy, row.jz)).inside)

    def test_argumentos_invalidos(self):
        with self.assertRaises(ArgumentError):
            sample_separable(4, 0, seed=1)
        with self.assertRaises(ArgumentError):
            sample_separable(4, 5, seed=1, mixing_components=0)
        with self.assertRaises(ArgumentError):
            sample_separable(4, 5, seed=1, aligned_fraction=1.5)

    def test_productos_alineados(self):
        """Todos los qubits de un producto alineado apuntan a ± el mismo eje."""
        rng = np.random.default_rng(4)
        for _ in range(50):
            blochs = polytope.aligned_product_blochs(6, rng)
            np.testing.assert_allclose(np.linalg.norm(blochs, axis=1), 1.0, atol=1e-12)
            np.testing.assert_allclose(np.abs(blochs @ blochs[0]), 1.0, atol=1e-12)


class TestHullFraction(unittest.TestCase):
    """Caso de prueba para la fracción de volumen cubierta."""

    def test_vertices_cubren_el_poliedro(self):
        vertices = vertices_k_space(4, (0, 0, 0)).vertex_matrix()
        self.assertGreater(hull_volume_fraction(vertices, 4, (0, 0, 0), trials=20000), 0.99)

    def test_nube_aleatoria_llena_el_poliedro(self):
        """Diez qubits con <J> = 0: la nube de 10⁴ mezclas separables cubre al menos el 80 %."""
        frame = sample_separable(10, 10000, seed=0, zero_mean=True, j_max=0.05)
        self.assertEqual(len(frame), 10000)
        points = frame[['kx', 'ky', 'kz']].to_numpy()
        self.assertGreaterEqual(hull_volume_fraction(points, 10, (0, 0, 0), trials=20000), 0.8)

    def test_productos_generales_no_alcanzan_los_vertices(self):
        """Sin productos alineados la nube se queda cerca del centro."""
        frame = sample_separable(10, 2000, seed=0, zero_mean=True, aligned_fraction=0.0)
        points = frame[['kx', 'ky', 'kz']].to_numpy()
        self.assertLess(hull_volume_fraction(points, 10, (0, 0, 0), trials=20000), 0.5)


if __name__ == '__main__':
    unittest.main()
