"""
Pruebas unitarias para los formatos de entrada y salida.
"""
import io
import json

import numpy as np
import pandas as pd
import pytest

from spin_squeezing.core.collective import moments
from spin_squeezing.core.models import HamiltonianSpec, dicke_state
from spin_squeezing.exceptions import ArgumentError
from spin_squeezing.processing import criteria
from spin_squeezing.services import storage


def test_estado_ida_y_vuelta(singlet_state, write_json):
    path = write_json('singlete.json', storage.state_to_dict(singlet_state))
    again = storage.load_state(path)
    np.testing.assert_allclose(again.entries, singlet_state.entries, atol=1e-15)
    assert again.local_dims == (2, 2)


def test_estado_con_n_sites_incoherente(singlet_state):
    data = storage.state_to_dict(singlet_state)
    data['n_sites'] = 3
    with pytest.raises(ArgumentError):
        storage.state_from_dict(data)


def test_estado_incompleto():
    with pytest.raises(ArgumentError):
        storage.state_from_dict({'local_dims': [2], 're': [[1, 0], [0, 0]]})


def test_tipos_de_documento(singlet_state):
    state_doc = storage.state_to_dict(singlet_state)
    moments_doc = moments(singlet_state).to_dict()
    assert storage.is_state_document(state_doc)
    assert not storage.is_moments_document(state_doc)
    assert storage.is_moments_document(moments_doc)


def test_modelo(write_json):
    path = write_json('modelo.json', {'kind': 'ising_transverse', 'n': 4, 'params': {'B': 0.5}})
    assert storage.load_model(path) == HamiltonianSpec('ising_transverse', 4, {'B': 0.5})


def test_json_invalido(tmp_path):
    path = tmp_path / 'roto.json'
    path.write_text('{', encoding='utf-8')
    with pytest.raises(ArgumentError):
        storage.read_json(str(path))
    with pytest.raises(ArgumentError):
        storage.read_json(str(tmp_path / 'no_existe.json'))


def test_csv_con_diecisiete_digitos():
    """Cada double se reconstruye exactamente desde el CSV."""
    value = 1 / 3
    text = storage.rows_to_csv([{'t_c': value, 'n': 3}])
    assert text.endswith('\n') and '\r' not in text
    frame = pd.read_csv(io.StringIO(text), float_precision='round_trip')
    assert frame['t_c'][0] == value


def test_informes_json():
    reports = criteria.evaluate_ossi(moments(dicke_state(3, 1)))
    data = json.loads(storage.reports_to_json(reports))
    assert data[0]['criterion_id'] == 'OSSI-8a'
    assert data[2]['axes'] == ['y', 'z', 'x']


def test_salida_atomica(tmp_path):
    path = tmp_path / 'salida.txt'
    with storage.output_sink(str(path)) as sink:
        sink.write('hola\n')
    assert path.read_text(encoding='utf-8') == 'hola\n'


def test_salida_descartada_si_hay_error(tmp_path):
    """Si el bloque falla no se crea el archivo ni quedan temporales."""
    path = tmp_path / 'salida.txt'
    with pytest.raises(RuntimeError):
        with storage.output_sink(str(path)) as sink:
            sink.write('parcial')
            raise RuntimeError('fallo')
    assert not path.exists()
    assert list(tmp_path.iterdir()) == []


def test_salida_estandar(capsys):
    with storage.output_sink() as sink:
        sink.write('x\n')
    assert capsys.readouterr().out == 'x\n'
