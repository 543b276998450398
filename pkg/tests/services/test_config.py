"""
Pruebas unitarias para el gestor de configuración.
"""
import json
import os
import tempfile
import unittest
from unittest.mock import patch

from spin_squeezing.services.config import ConfigManager, get_config, init_config


class TestConfigManager(unittest.TestCase):
    """Caso de prueba para ConfigManager."""

    def test_valores_por_defecto(self):
        config = ConfigManager()
        self.assertEqual(config.get('numerics.max_qubits'), 12)
        self.assertEqual(config.get('solver.t_max.nanotube'), 800.0)
        self.assertIsNone(config.get('no.existe'))
        self.assertEqual(config.get('no.existe', 5), 5)

    def test_archivo_se_combina_con_los_valores_por_defecto(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'config.json')
            with open(path, 'w', encoding='utf-8') as f:
                json.dump({'solver': {'tol': 0.01}}, f)
            config = ConfigManager(path)
        self.assertEqual(config.get('solver.tol'), 0.01)
        self.assertEqual(config.get('solver.scan_points'), 64)

    def test_archivo_inexistente(self):
        config = ConfigManager('/ruta/que/no/existe.json')
        self.assertEqual(config.get('numerics.max_qubits'), 12)

    def test_variables_de_entorno(self):
        """Los alias cortos y las claves SECCION__CLAVE tienen prioridad."""
        env = {'SPINSQ_MAX_QUBITS': '8', 'SPINSQ_SOLVER__TOL': '0.05', 'SPINSQ_JOBS': 'none'}
        with patch.dict(os.environ, env):
            config = ConfigManager()
        self.assertEqual(config.get('numerics.max_qubits'), 8)
        self.assertEqual(config.get('solver.tol'), 0.05)
        self.assertIsNone(config.get('parallel.jobs'))

    def test_actualizar(self):
        config = ConfigManager()
        config.update('cache.enabled', False)
        self.assertFalse(config.get('cache.enabled'))
        self.assertTrue(ConfigManager().get('cache.enabled'))

    def test_to_dict_es_una_copia(self):
        config = ConfigManager()
        data = config.to_dict()
        data['numerics']['max_qubits'] = 1
        self.assertEqual(config.get('numerics.max_qubits'), 12)

    def test_instancia_global(self):
        first = init_config()
        self.assertIs(get_config(), first)
        self.assertIsNot(init_config(), first)


if __name__ == '__main__':
    unittest.main()
