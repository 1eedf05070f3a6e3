#!/usr/bin/env python3
"""
Input validation utilities for crsnsim
Handles counts, strategy lists and figure names given on the command line
"""

from ..core.config import STRATEGY_NAMES
from ..sim.figures import FIGURES


class Validators:
    """Input validation utilities"""

    @staticmethod
    def validate_positive_int(value) -> bool:
        return isinstance(value, int) and not isinstance(value, bool) and value > 0

    @staticmethod
    def validate_non_negative_int(value) -> bool:
        return isinstance(value, int) and not isinstance(value, bool) and value >= 0

    @staticmethod
    def validate_figure(name: str) -> bool:
        return name in FIGURES

    @staticmethod
    def validate_strategies(names) -> bool:
        return bool(names) and all(name in STRATEGY_NAMES for name in names)

    @staticmethod
    def normalize_strategies(value: str) -> list:
        """'proposed, asa' -> ['proposed', 'asa']"""
        if not value:
            return []
        return [name.strip() for name in value.split(',') if name.strip()]
