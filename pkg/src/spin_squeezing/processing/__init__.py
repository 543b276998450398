"""Criterios de entrelazamiento, geometría del poliedro separable y detección térmica."""

__all__ = ['criteria', 'polytope', 'detection']
