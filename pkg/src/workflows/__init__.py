"""
🔄 LangGraph Workflows
"""

from .trial_workflow import TrialWorkflow

__all__ = ["TrialWorkflow"]
