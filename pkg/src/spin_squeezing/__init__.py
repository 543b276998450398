"""
Detección de entrelazamiento multi-qubit a partir de momentos colectivos de espín.

Incluye las desigualdades óptimas de compresión de espín, su geometría poliédrica,
criterios rivales y modelos térmicos de prueba.
"""

__version__ = "0.1.0"
