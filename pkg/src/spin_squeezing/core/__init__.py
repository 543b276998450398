"""Núcleo: operadores, momentos colectivos, modelos y el orquestador."""

__all__ = ['operators', 'collective', 'models', 'orchestrator']
