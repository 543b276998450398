"""Utilidades generales y funciones de ayuda."""

__all__ = ['formatters', 'monitoring', 'parallel']
