#!/usr/bin/env python3
"""
Core functionality for crsnsim
Domain types, configuration, validation, execution and reporting
"""

from .config import ConfigManager, ScenarioConfig
from .errors import ConfigError, CrsnError, DomainError, InfeasibleProtection, NumericalFailure, UnboundedCad
from .validation import validate_scenario

__all__ = ['ConfigManager', 'ScenarioConfig', 'ConfigError', 'CrsnError', 'DomainError',
           'InfeasibleProtection', 'NumericalFailure', 'UnboundedCad', 'validate_scenario']
