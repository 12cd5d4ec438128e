"""
🎲 Channel Sampling Stage - node placement and every channel of one trial
"""

import numpy as np

from ..channel import (
    TrialStreams,
    conventional_channel,
    sample_bs_irs,
    sample_irs_user,
)
from ..models import Method, ScenarioConfig, TrialChannels
from ..scenarios import place_users
from .base import BaseStage


class ChannelSamplingStage(BaseStage[TrialChannels]):
    """Draws geometry, BS-IRS, IRS-user and baseline channels from their own streams"""

    @property
    def name(self) -> str:
        return "🎲 Sampling"

    def run(self, config: ScenarioConfig,
            streams: TrialStreams) -> TrialChannels:
        layout = place_users(config, streams.geometry)
        geometry = config.array_geometry

        bs_irs = [
            sample_bs_irs(layout.bs,
                          position,
                          config.los_path_loss,
                          streams.bs_irs,
                          bs_normal=config.bs_normal,
                          irs_normal=normal)
            for position, normal in zip(layout.irs, config.irs_normals)
        ]

        # Rayleigh 분산 zeta 도 LOS 경로 손실 rho 와 동일
        irs_user = [[
            sample_irs_user(position,
                            user,
                            config.los_path_loss,
                            config.irs_user_channel,
                            streams.irs_user,
                            geometry,
                            irs_normal=normal) for user in layout.users
        ] for position, normal in zip(layout.irs, config.irs_normals)]

        baseline = None
        if Method.CONVENTIONAL in config.methods:
            baseline = np.column_stack([
                conventional_channel(
                    config.bs_antennas,
                    config.baseline_paths,
                    float(np.linalg.norm(np.subtract(user, layout.bs))),
                    config.nlos_path_loss,
                    streams.baseline,
                    per_path_normalization=config.
                    baseline_per_path_normalization,
                    spacing_ratio=config.spacing_ratio,
                ) for user in layout.users
            ])

        self.log(f"L={config.num_irs} K={config.num_users} "
                 f"N={config.bs_antennas} M={config.irs_elements}")
        return TrialChannels(layout=layout,
                             bs_irs=bs_irs,
                             irs_user=irs_user,
                             baseline=baseline)
