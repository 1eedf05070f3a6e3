#!/usr/bin/env python3
"""
Exception hierarchy for crsnsim
"""

from typing import List, Optional


class CrsnError(Exception):
    """Base class for every error raised by crsnsim"""


class DomainError(CrsnError, ValueError):
    """An argument or constructed value lies outside its mathematical domain"""


class InfeasibleProtection(CrsnError):
    """No sensing set of the configured size keeps PU interference below F_I"""

    def __init__(self, channel_id: int, candidates: int, coop_set_size: int, residual: float):
        self.channel_id = channel_id
        self.candidates = candidates
        self.coop_set_size = coop_set_size
        self.residual = residual
        super().__init__(
            f"channel {channel_id}: best {coop_set_size} of {candidates} nodes leave "
            f"p_on * F_m = {residual:.4g} above the interference threshold"
        )


class UnboundedCad(CrsnError):
    """p_r >= p_off * (1 - F_f): the channel may be used without a CAD cap"""

    def __init__(self, ratio: float):
        self.ratio = ratio
        super().__init__(f"protection ratio {ratio:.4g} >= 1, CAD is unbounded")


class NumericalFailure(CrsnError):
    """A numerical routine failed to terminate or lost feasibility"""


class ConfigError(CrsnError):
    """Configuration could not be parsed or validated

    `diagnostics` lists every problem found, each naming the offending `section.key`.
    """

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        self.diagnostics = list(diagnostics or [])
        detail = "".join(f"\n  - {d}" for d in self.diagnostics)
        super().__init__(f"{message}{detail}")
