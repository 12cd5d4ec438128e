"""
🛰️ Proposed Stage - association, AIC phases, then max-min active beamforming
"""

from typing import Optional

import numpy as np

from ..active import per_user_sinr, solve_active
from ..channel import composite_channel
from ..errors import InvalidArgumentError
from ..models import (
    Method,
    MethodOutcome,
    ScenarioConfig,
    SolverSettings,
    TrialChannels,
)
from ..passive import (
    apply_association,
    associate_exhaustive,
    associate_greedy,
    max_gain_matrix,
)
from .base import BaseStage


class ProposedStage(BaseStage[MethodOutcome]):
    """Proposed solution with exhaustive (I) or greedy (II) association"""

    def __init__(self,
                 method: Method,
                 solver: Optional[SolverSettings] = None,
                 exhaustive_limit: Optional[int] = None):
        if method not in (Method.EXHAUSTIVE, Method.GREEDY):
            raise InvalidArgumentError(
                f"{method} is not an association strategy")
        self.method = Method(method)
        self.solver = solver
        self.exhaustive_limit = exhaustive_limit

    @property
    def name(self) -> str:
        return f"🛰️ Proposed/{self.method.value}"

    def run(self,
            config: ScenarioConfig,
            channels: TrialChannels,
            rng: Optional[np.random.Generator] = None) -> MethodOutcome:
        W = max_gain_matrix(channels.bs_irs, channels.irs_user)
        if self.method == Method.EXHAUSTIVE:
            association, _ = associate_exhaustive(W, self.exhaustive_limit)
        else:
            association = associate_greedy(W)
        self.log(f"association {association.assignment}")

        geometry = config.array_geometry
        phases = apply_association(association, channels.bs_irs,
                                   channels.irs_user, geometry)
        H = composite_channel(channels.bs_irs, channels.irs_user, phases,
                              geometry)
        solution = solve_active(H,
                                config.transmit_power_w,
                                config.noise_power_w,
                                self.solver,
                                rng=rng)
        sinr = per_user_sinr(H, solution.precoders, solution.powers,
                             config.noise_power_w)
        if not solution.converged:
            self.log(f"fixed point stopped after {solution.iterations} "
                     "iterations without converging")
        return MethodOutcome(method=self.method,
                             min_sinr=float(sinr.min()),
                             association=association.assignment,
                             iterations=solution.iterations,
                             converged=solution.converged)
