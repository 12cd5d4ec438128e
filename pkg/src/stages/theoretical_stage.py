"""
📐 Theoretical Stage - interference-free SINR of the exhaustive association
"""

from typing import Optional

from ..models import Method, MethodOutcome, ScenarioConfig, TrialChannels
from ..passive import (
    associate_exhaustive,
    max_gain_matrix,
    theoretical_min_sinr,
)
from .base import BaseStage


class TheoreticalStage(BaseStage[MethodOutcome]):
    """Closed-form SINR with all cross terms neglected"""

    def __init__(self, exhaustive_limit: Optional[int] = None):
        self.exhaustive_limit = exhaustive_limit

    @property
    def name(self) -> str:
        return "📐 Theoretical"

    def run(self, config: ScenarioConfig,
            channels: TrialChannels) -> MethodOutcome:
        W = max_gain_matrix(channels.bs_irs, channels.irs_user)
        association, _ = associate_exhaustive(W, self.exhaustive_limit)
        value = theoretical_min_sinr(association, W, config.transmit_power_w,
                                     config.bs_antennas, config.irs_elements,
                                     config.noise_power_w)
        return MethodOutcome(method=Method.THEORETICAL,
                             min_sinr=value,
                             association=association.assignment)
