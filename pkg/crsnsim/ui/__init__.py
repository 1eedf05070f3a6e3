#!/usr/bin/env python3
"""
User interface components for crsnsim
Console helpers, progress bars, tables and argument validation
"""

from .colors import console, print_banner
from .interface import UserInterface
from .validators import Validators

__all__ = ['console', 'print_banner', 'UserInterface', 'Validators']
