"""
Utilidades para formatear resultados en resúmenes de texto plano legibles.
Los archivos de datos usan 17 dígitos; estos resúmenes usan output.summary_digits.
"""

import logging
from typing import Any, Dict, Optional, Sequence

from spin_squeezing.services.config import get_config

logger = logging.getLogger(__name__)


def format_number(value: Optional[float], digits: Optional[int] = None) -> str:
    """
    Formatea un número con cifras significativas.

    Args:
        value: Número o None
        digits: Cifras significativas (por defecto output.summary_digits)

    Returns:
        str: El número formateado, o "n/a" si no hay valor
    """
    if value is None:
        return "n/a"
    digits = digits or int(get_config().get('output.summary_digits', 4))
    return f"{value:.{digits}g}"


def format_report_plain(reports: Sequence[Any]) -> str:
    """
    Tabla de texto con un criterio por línea.

    Args:
        reports: Objetos CriterionReport

    Returns:
        str: Resumen con margen y veredicto
    """
    if not reports:
        return "No hay criterios que mostrar.\n"
    width = max(len(r.criterion_id) for r in reports)
    lines = [f"{'criterio':<{width}}  {'margen':>12}  veredicto"]
    for r in reports:
        if r.status != 'ok':
            verdict = "no aplicable"
        else:
            verdict = "VIOLADO (entrelazado)" if r.violated else "cumplido"
        lines.append(f"{r.criterion_id:<{width}}  {format_number(r.margin):>12}  {verdict}")
    violated = sum(1 for r in reports if r.violated)
    lines.append(f"{violated} de {len(reports)} criterios violados")
    return "\n".join(lines) + "\n"


def format_rows_plain(rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    """
    Tabla de texto genérica para filas de diccionarios (temperaturas críticas, ventanas, etc.).

    Args:
        rows: Filas con las mismas claves
        columns: Columnas a mostrar (por defecto las de la primera fila)

    Returns:
        str: Tabla alineada
    """
    if not rows:
        return "Sin resultados.\n"
    columns = list(columns or rows[0].keys())

    def cell(value: Any) -> str:
        if isinstance(value, float):
            return format_number(value)
        if value is None:
            return "n/a"
        return str(value)

    table = [[cell(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in table)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in table]
    return "\n".join(lines) + "\n"
