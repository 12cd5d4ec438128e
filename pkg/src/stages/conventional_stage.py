"""
📶 Conventional Stage - massive MIMO without IRS
"""

from typing import Optional

import numpy as np

from ..active import per_user_sinr, solve_active
from ..errors import InvalidArgumentError
from ..models import (
    Method,
    MethodOutcome,
    ScenarioConfig,
    SolverSettings,
    TrialChannels,
)
from .base import BaseStage


class ConventionalStage(BaseStage[MethodOutcome]):
    """Max-min SINR over the direct multipath BS-user channels"""

    def __init__(self, solver: Optional[SolverSettings] = None):
        self.solver = solver

    @property
    def name(self) -> str:
        return "📶 Conventional"

    def run(self,
            config: ScenarioConfig,
            channels: TrialChannels,
            rng: Optional[np.random.Generator] = None) -> MethodOutcome:
        if channels.baseline is None:
            raise InvalidArgumentError("baseline channels were not sampled")
        H = channels.baseline
        solution = solve_active(H,
                                config.transmit_power_w,
                                config.noise_power_w,
                                self.solver,
                                rng=rng)
        sinr = per_user_sinr(H, solution.precoders, solution.powers,
                             config.noise_power_w)
        return MethodOutcome(method=Method.CONVENTIONAL,
                             min_sinr=float(sinr.min()),
                             iterations=solution.iterations,
                             converged=solution.converged)
