"""Servicios compartidos: configuración, caché y almacenamiento."""

__all__ = ['config', 'cache', 'storage']
