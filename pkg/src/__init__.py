"""
📡 IRS Beamforming Simulator
Joint active/passive beamforming for multi-IRS multi-user MIMO, with LangGraph trial pipelines
"""

__version__ = "0.1.0"
