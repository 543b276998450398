"""
Pruebas de la línea de comandos `spinsq`.
"""
import json

import numpy as np
import pytest

from spin_squeezing import main as cli
from spin_squeezing.core.models import dicke_state
from spin_squeezing.services import storage


@pytest.fixture
def singlet_file(singlet_state, write_json):
    return write_json('singlete.json', storage.state_to_dict(singlet_state))


def test_check_singlete(singlet_file, capsys):
    assert cli.main(['check', '--input', singlet_file]) == cli.EXIT_OK
    reports = {r['criterion_id']: r for r in json.loads(capsys.readouterr().out)}
    assert reports['OSSI-8b']['violated']
    assert reports['OSSI-8b']['margin'] == pytest.approx(-1.0)
    assert reports['ORIG-3']['status'] == 'not-applicable'


def test_check_texto(singlet_file, capsys):
    assert cli.main(['check', '--input', singlet_file, '--format', 'text']) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert 'VIOLADO' in out
    assert out.rstrip().endswith('Cota de qubits no entrelazados: 0')


def test_check_momentos(write_json, capsys):
    path = write_json('momentos.json', {'n': 2, 'j': [0, 0, 0], 'c': np.zeros((3, 3)).tolist()})
    assert cli.main(['check', '--input', path]) == cli.EXIT_OK
    ids = [r['criterion_id'] for r in json.loads(capsys.readouterr().out)]
    assert 'OSSI-8b' in ids
    assert not any(i.startswith('AV2') for i in ids)


def test_momentos(singlet_file, capsys):
    assert cli.main(['moments', '--input', singlet_file]) == cli.EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['n'] == 2
    np.testing.assert_allclose(data['j'], 0, atol=1e-12)


def test_error_de_argumentos(capsys):
    assert cli.main(['tc', '--model', 'heisenberg_chain', '--detector', 'OSSI-8b']) == cli.EXIT_ARGUMENT
    assert cli.main(['desconocido']) == cli.EXIT_ARGUMENT
    assert cli.main(['tc', '--model', 'potts', '--n', '3', '--detector', 'OSSI-8b']) == cli.EXIT_ARGUMENT
    assert 'spinsq: error' in capsys.readouterr().err


def test_momentos_inconsistentes(write_json):
    path = write_json('momentos.json', {'n': 2, 'j': [0, 0, 0], 'c': (2 * np.eye(3)).tolist()})
    assert cli.main(['check', '--input', path]) == cli.EXIT_ARGUMENT


def test_error_de_capacidad(write_json, capsys):
    """Un estado de tres qubits supera max_qubits = 2."""
    config = write_json('config.json', {'numerics': {'max_qubits': 2}})
    state = write_json('dicke.json', storage.state_to_dict(dicke_state(3, 1)))
    assert cli.main(['--config', config, 'check', '--input', state]) == cli.EXIT_NUMERIC
    assert 'error numérico' in capsys.readouterr().err


def test_muestras_reproducibles(tmp_path):
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    for path in (first, second):
        assert cli.main(['sample', '--n', '10', '--count', '200', '--seed', '7', '--out', str(path)]) == cli.EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    lines = first.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'kx,ky,kz,jx,jy,jz'
    assert len(lines) == 201


def test_temperatura_critica(capsys):
    """Cadena de Heisenberg de cuatro sitios con 8b: T_c ≈ 5.77."""
    argv = ['tc', '--model', 'heisenberg_chain', '--n', '4', '--detector', 'OSSI-8b', '--format', 'json']
    assert cli.main(argv) == cli.EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['t_c'] == pytest.approx(5.77, abs=0.01)
    assert data['status'] == 'found'


def test_temperatura_critica_csv(write_json, capsys):
    model = write_json('modelo.json', {'kind': 'ising_transverse', 'n': 3, 'params': {'B': 1.0}})
    assert cli.main(['tc', '--model', model, '--detector', 'OSSI-8c']) == cli.EXIT_OK
    header, row = capsys.readouterr().out.splitlines()
    assert header.startswith('model,n,detector,t_c')
    assert float(row.split(',')[3]) == pytest.approx(1.22, abs=0.01)


def test_poliedro_obj(tmp_path):
    path = tmp_path / 'poliedro.obj'
    argv = ['polytope', '--n', '10', '--j', '0', '0', '4', '--format', 'obj', '--out', str(path)]
    assert cli.main(argv) == cli.EXIT_OK
    lines = path.read_text(encoding='utf-8').splitlines()
    assert sum(1 for line in lines if line.startswith('v ')) == 6
    assert sum(1 for line in lines if line.startswith('f ')) == 8


def test_poliedro_json(capsys):
    assert cli.main(['polytope', '--n', '4', '--space', 'eigen-space']) == cli.EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data['space'] == 'eigen-space'
    assert len(data['vertices']) == 6


def test_barrido_ligado(capsys):
    argv = ['bound-scan', '--model', 'heisenberg_chain', '--n', '5', '--tmin', '5.3', '--tmax', '6.0',
            '--points', '2', '--format', 'json']
    assert cli.main(argv) == cli.EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert [row['bound_entangled'] for row in rows] == [True, False]
