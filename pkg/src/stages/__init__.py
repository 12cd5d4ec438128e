"""
🧩 Trial Stages
"""

from .conventional_stage import ConventionalStage
from .proposed_stage import ProposedStage
from .sampling_stage import ChannelSamplingStage
from .theoretical_stage import TheoreticalStage

__all__ = [
    "ChannelSamplingStage",
    "ProposedStage",
    "TheoreticalStage",
    "ConventionalStage",
]
