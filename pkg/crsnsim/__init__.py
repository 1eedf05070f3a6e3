#!/usr/bin/env python3
"""
crsnsim - energy-efficient dynamic channel access for clustered cognitive radio sensor networks
"""

__version__ = "1.0"

__all__ = ['__version__']
