"""
Pruebas para la monitorización de cálculos.
"""
import pytest

from spin_squeezing.utils import monitoring
from spin_squeezing.utils.monitoring import Monitor, measure_execution_time


class _Worker:
    def __init__(self, monitor):
        self.monitor = monitor

    @measure_execution_time()
    def succeed(self, x):
        return x + 1

    @measure_execution_time()
    def fail(self):
        raise ValueError("fallo")


def test_estadisticas_de_metricas():
    monitor = Monitor()
    monitor.track_metric('t', 2.0)
    monitor.track_metric('t', 4.0)
    stats = monitor.get_stats()['t']
    assert stats['count'] == 2
    assert stats['min'] == 2.0
    assert stats['max'] == 4.0
    assert stats['avg'] == 3.0


def test_decorador_mide_la_duracion():
    monitor = Monitor()
    assert _Worker(monitor).succeed(1) == 2
    assert monitor.get_stats()['succeed.duration']['count'] == 1


def test_decorador_registra_excepciones(caplog):
    monitor = Monitor()
    with pytest.raises(ValueError):
        _Worker(monitor).fail()
    assert monitor.get_stats()['fail.duration']['count'] == 1
    assert 'ValueError' in caplog.text


def test_sin_monitor():
    """Sin atributo monitor el método se ejecuta sin medir."""
    assert _Worker(None).succeed(4) == 5


def test_sin_instancia_global():
    """El módulo sólo define la clase; cada orquestador crea su propio monitor."""
    assert not any(isinstance(value, Monitor) for value in vars(monitoring).values())
