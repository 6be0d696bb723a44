"""Podrazumevane vrednosti engine-a (ne fizike)"""

from .settings import Settings, settings

__all__ = [
    'Settings',
    'settings',
]
