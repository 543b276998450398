"""
Punto de entrada de la línea de comandos `spinsq`.

Códigos de salida: 0 éxito, 2 error de argumentos, 3 error numérico o de capacidad.
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from spin_squeezing import __version__
from spin_squeezing.core.models import KINDS, HamiltonianSpec
from spin_squeezing.core.collective import CollectiveMoments, moments
from spin_squeezing.core.orchestrator import TABLE2_SIZES, EntanglementOrchestrator, temperature_grid
from spin_squeezing.exceptions import ArgumentError, CapacityError, NumericError
from spin_squeezing.processing.detection import default_t_max
from spin_squeezing.processing.polytope import SPACES
from spin_squeezing.services import storage
from spin_squeezing.services.config import get_config, init_config
from spin_squeezing.utils.formatters import format_report_plain, format_rows_plain

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ARGUMENT = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser que lanza ArgumentError en lugar de terminar el proceso."""

    def error(self, message):
        raise ArgumentError(message)


def _parse_param(text: str):
    if '=' not in text:
        raise ArgumentError(f"Parámetro inválido {text!r}; use CLAVE=VALOR")
    key, value = text.split('=', 1)
    try:
        return key, float(value)
    except ValueError:
        return key, value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='spinsq', description="Detección de entrelazamiento con desigualdades de compresión de espín")
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--config', help="Archivo de configuración JSON")
    parser.add_argument('--log-level', help="Nivel de logging (DEBUG, INFO, WARNING...)")
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    def common(p, formats=('json',)):
        p.add_argument('--out', help="Archivo de salida (por defecto stdout)")
        p.add_argument('--format', choices=formats, default=formats[0])
        return p

    def model_args(p):
        p.add_argument('--model', required=True,
                       help=f"Archivo model-json o familia ({', '.join(KINDS + ('xy_complete',))})")
        p.add_argument('--n', type=int, help="Número de sitios (si --model es una familia)")
        p.add_argument('--param', action='append', default=[], help="Parámetro del modelo CLAVE=VALOR")
        p.add_argument('--jobs', type=int, help="Hilos máximos")

    p = common(sub.add_parser('moments', help="Momentos colectivos de un estado"))
    p.add_argument('--input', required=True, help="Archivo qstate-json")

    p = common(sub.add_parser('check', help="Informe de todos los criterios"), ('json', 'text'))
    p.add_argument('--input', required=True, help="Archivo qstate-json o moments-json")

    p = common(sub.add_parser('tc', help="Temperatura crítica de un modelo"), ('csv', 'json'))
    model_args(p)
    p.add_argument('--detector', required=True, help="PPT-any, CCNR-any o id de criterio (p. ej. OSSI-8b)")
    p.add_argument('--tol', type=float, help="Anchura final del intervalo de bisección")
    p.add_argument('--tmax', type=float, help="Temperatura máxima del barrido")

    p = common(sub.add_parser('table2', help="Tabla de temperaturas críticas"), ('csv', 'json'))
    p.add_argument('--n', type=int, action='append', help="Tamaños a calcular (por defecto 3..9)")
    p.add_argument('--tol', type=float)
    p.add_argument('--jobs', type=int)

    p = common(sub.add_parser('bound-scan', help="Ventana de entrelazamiento ligado"), ('csv', 'json'))
    model_args(p)
    p.add_argument('--tmin', type=float, default=None)
    p.add_argument('--tmax', type=float, default=None)
    p.add_argument('--points', type=int, default=41)

    p = common(sub.add_parser('polytope', help="Vértices y caras del poliedro separable"), ('json', 'obj'))
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--j', type=float, nargs=3, default=[0.0, 0.0, 0.0], metavar=('JX', 'JY', 'JZ'))
    p.add_argument('--space', choices=SPACES, default=SPACES[0])
    p.add_argument('--obj', help="Archivo OBJ adicional")

    p = common(sub.add_parser('sample', help="Nube de puntos separables aleatorios"), ('csv',))
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--count', type=int, default=10000)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--mixing', type=int, help="Máximo de componentes por mezcla")
    p.add_argument('--aligned-fraction', type=float, help="Probabilidad de un producto alineado")
    p.add_argument('--zero-mean', action='store_true', help="Fuerza <J> = 0")
    p.add_argument('--j-max', type=float, help="Descarta muestras con |<J>| mayor")

    p = common(sub.add_parser('nanotube', help="Temperaturas críticas del nanotubo de 9 espines"))
    p.add_argument('--tol', type=float)
    p.add_argument('--jobs', type=int)

    p = common(sub.add_parser('table1', help="Detección de estados fundamentales"), ('csv', 'json'))
    p.add_argument('--n', type=int, default=8)
    return parser


def resolve_model(args) -> HamiltonianSpec:
    params = dict(_parse_param(p) for p in args.param)
    if args.model.endswith('.json'):
        spec = storage.load_model(args.model)
        if args.n is not None or params:
            data = spec.to_dict()
            data['n'] = args.n if args.n is not None else data['n']
            data['params'] = {**data['params'], **params}
            spec = HamiltonianSpec.from_dict(data)
        return spec
    if args.n is None:
        raise ArgumentError("--n es obligatorio cuando --model es una familia")
    if args.model == 'xy_complete':
        if params:
            raise ArgumentError("xy_complete no admite parámetros")
        return HamiltonianSpec.xy_complete(args.n)
    return HamiltonianSpec(args.model, args.n, params)


def _emit_rows(rows: List[Dict[str, Any]], fmt: str, out: Optional[str]):
    with storage.output_sink(out) as sink:
        if fmt == 'csv':
            sink.write(storage.rows_to_csv(rows))
        else:
            sink.write(storage.dumps(rows))
    if out:
        print(format_rows_plain(rows), end='')


def run(args, orchestrator: EntanglementOrchestrator) -> int:
    command = args.command

    if command == 'moments':
        m = moments(storage.load_state(args.input))
        with storage.output_sink(args.out) as sink:
            sink.write(storage.dumps(m.to_dict()))

    elif command == 'check':
        data = storage.read_json(args.input)
        if storage.is_state_document(data):
            result = orchestrator.analyze_state(storage.state_from_dict(data))
        elif storage.is_moments_document(data):
            result = orchestrator.analyze_moments(CollectiveMoments.from_dict(data))
        else:
            raise ArgumentError(f"{args.input} no es ni qstate-json ni moments-json")
        with storage.output_sink(args.out) as sink:
            if args.format == 'text':
                sink.write(format_report_plain(result['reports']))
                sink.write(f"Cota de qubits no entrelazados: {result['unentangled_bound']}\n")
            else:
                sink.write(storage.reports_to_json(result['reports']))

    elif command == 'tc':
        model = resolve_model(args)
        result = orchestrator.critical_temperature(model, args.detector, t_max=args.tmax, tol=args.tol)
        if args.format == 'json':
            with storage.output_sink(args.out) as sink:
                sink.write(storage.dumps(result.to_dict()))
        else:
            _emit_rows([result.to_row()], 'csv', args.out)

    elif command == 'table2':
        sizes = tuple(args.n) if args.n else TABLE2_SIZES
        frame = orchestrator.critical_temperature_table(sizes=sizes, tol=args.tol)
        rows = frame.to_dict(orient='records')
        _emit_rows(rows, args.format, args.out)
        failed = frame[frame['status'] == 'error']
        if len(failed):
            logger.warning(f"{len(failed)} celdas fallaron; ver columna 'error'")

    elif command == 'bound-scan':
        model = resolve_model(args)
        t_max = args.tmax if args.tmax is not None else default_t_max(model)
        t_min = args.tmin if args.tmin is not None else t_max / args.points
        if args.points < 1 or t_min < 0 or t_max < t_min:
            raise ArgumentError("Rejilla de temperaturas inválida")
        frame = orchestrator.bound_scan(model, temperature_grid(t_min, t_max, args.points))
        _emit_rows(frame.to_dict(orient='records'), args.format, args.out)

    elif command == 'polytope':
        geometry = orchestrator.polytope_geometry(args.space, args.n, args.j)
        with storage.output_sink(args.out) as sink:
            sink.write(geometry.to_obj() if args.format == 'obj' else storage.dumps(geometry.to_dict()))
        if args.obj:
            with storage.output_sink(args.obj) as sink:
                sink.write(geometry.to_obj())

    elif command == 'sample':
        frame = orchestrator.sample(args.n, args.count, args.seed, mixing_components=args.mixing,
                                    zero_mean=args.zero_mean, j_max=args.j_max,
                                    aligned_fraction=args.aligned_fraction)
        with storage.output_sink(args.out) as sink:
            sink.write(storage.frame_to_csv(frame))

    elif command == 'nanotube':
        report = orchestrator.nanotube(tol=args.tol)
        with storage.output_sink(args.out) as sink:
            sink.write(storage.dumps(report.to_dict()))
        if args.out:
            print(format_rows_plain([r.to_row() for r in report.critical.values()]), end='')

    elif command == 'table1':
        frame = orchestrator.ground_state_table(args.n)
        _emit_rows(frame.to_dict(orient='records'), args.format, args.out)

    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ArgumentError as e:
        print(f"spinsq: error: {e}", file=sys.stderr)
        return EXIT_ARGUMENT

    config = init_config(args.config) if args.config else get_config()
    if args.log_level:
        config.update('logging.level', args.log_level.upper())
    logging.basicConfig(
        level=getattr(logging, str(config.get('logging.level', 'WARNING')).upper(), logging.WARNING),
        format=config.get('logging.format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s'),
    )
    if getattr(args, 'jobs', None) is not None:
        config.update('parallel.jobs', args.jobs)

    orchestrator = EntanglementOrchestrator(jobs=getattr(args, 'jobs', None))
    try:
        return run(args, orchestrator)
    except ArgumentError as e:
        print(f"spinsq: error: {e}", file=sys.stderr)
        return EXIT_ARGUMENT
    except (CapacityError, NumericError) as e:
        print(f"spinsq: error numérico: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as e:
        logger.error(f"Error inesperado: {e}", exc_info=True)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
