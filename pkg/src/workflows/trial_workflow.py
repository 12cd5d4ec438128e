"""
🔄 Monte-Carlo Trial Workflow
"""

import time
from typing import Optional, TypedDict

import numpy as np
from langgraph.graph import END, StateGraph

from ..channel import TrialStreams, trial_streams
from ..config import settings
from ..errors import BeamformingError
from ..models import (
    Method,
    MethodOutcome,
    ScenarioConfig,
    SolverSettings,
    TrialChannels,
    TrialResult,
)
from ..stages import (
    ChannelSamplingStage,
    ConventionalStage,
    ProposedStage,
    TheoreticalStage,
)

# 방법별 실패는 기록만 하고 trial 은 유지
METHOD_ERRORS = (BeamformingError, np.linalg.LinAlgError)


class TrialState(TypedDict):
    """State for one Monte-Carlo trial"""
    trial_index: int
    streams: TrialStreams

    # Generated data
    channels: Optional[TrialChannels]
    outcomes: dict[Method, MethodOutcome]

    # Error handling
    errors: dict[Method, str]  # per method, trial kept
    error: Optional[str]  # sampling failure, trial lost


class TrialWorkflow:
    """sample_channels -> exhaustive -> greedy -> theoretical -> conventional"""

    def __init__(self,
                 config: ScenarioConfig,
                 solver: Optional[SolverSettings] = None,
                 exhaustive_limit: Optional[int] = None):
        self.config = config
        limit = exhaustive_limit or settings.search.exhaustive_limit
        solver = solver or SolverSettings.from_settings()

        self.sampling = ChannelSamplingStage()
        self.exhaustive = ProposedStage(Method.EXHAUSTIVE, solver, limit)
        self.greedy = ProposedStage(Method.GREEDY, solver, limit)
        self.theoretical = TheoreticalStage(limit)
        self.conventional = ConventionalStage(solver)

        self.graph = self._build_graph()

    def _build_graph(self) -> StateGraph:
        """Build the LangGraph workflow"""
        workflow = StateGraph(TrialState)

        # Add nodes
        workflow.add_node("sample_channels", self._sample_channels)
        workflow.add_node("exhaustive", self._exhaustive)
        workflow.add_node("greedy", self._greedy)
        workflow.add_node("theoretical", self._theoretical)
        workflow.add_node("conventional", self._conventional)

        # Add edges
        workflow.add_edge("sample_channels", "exhaustive")
        workflow.add_edge("exhaustive", "greedy")
        workflow.add_edge("greedy", "theoretical")
        workflow.add_edge("theoretical", "conventional")
        workflow.add_edge("conventional", END)

        workflow.set_entry_point("sample_channels")

        return workflow.compile()

    def run(self, trial_index: int) -> TrialResult:
        """Run every enabled method on one trial's channels"""
        started = time.perf_counter()
        initial_state: TrialState = {
            "trial_index": trial_index,
            "streams": trial_streams(self.config.master_seed, trial_index),
            "channels": None,
            "outcomes": {},
            "errors": {},
            "error": None,
        }

        result = self.graph.invoke(initial_state)

        if result.get("error"):
            raise BeamformingError(
                f"trial {trial_index} failed: {result['error']}")

        outcomes: dict[Method, MethodOutcome] = result["outcomes"]
        min_sinr = {m: float("nan") for m in result["errors"]}
        min_sinr.update({m: o.min_sinr for m, o in outcomes.items()})
        return TrialResult(
            trial_index=trial_index,
            master_seed=self.config.master_seed,
            min_sinr={m: min_sinr[m] for m in Method if m in min_sinr},
            associations={
                m: o.association
                for m, o in outcomes.items() if o.association is not None
            },
            iterations={
                m: o.iterations
                for m, o in outcomes.items() if o.iterations is not None
            },
            converged={
                m: o.converged
                for m, o in outcomes.items() if o.converged is not None
            },
            errors=result["errors"],
            wall_time_s=time.perf_counter() - started,
        )

    def _sample_channels(self, state: TrialState) -> TrialState:
        try:
            channels = self.sampling.run(self.config, state["streams"])
            return {**state, "channels": channels}
        except METHOD_ERRORS as e:
            return {**state, "error": str(e)}

    def _run_method(self, state: TrialState, method: Method, stage,
                    *args) -> TrialState:
        if state.get("error") or method not in self.config.methods:
            return state
        try:
            outcome = stage.run(self.config, state["channels"], *args)
        except METHOD_ERRORS as e:
            stage.log(f"❌ {e}")
            return {**state, "errors": {**state["errors"], method: str(e)}}
        return {**state, "outcomes": {**state["outcomes"], method: outcome}}

    def _exhaustive(self, state: TrialState) -> TrialState:
        return self._run_method(state, Method.EXHAUSTIVE, self.exhaustive,
                                state["streams"].solver[Method.EXHAUSTIVE])

    def _greedy(self, state: TrialState) -> TrialState:
        return self._run_method(state, Method.GREEDY, self.greedy,
                                state["streams"].solver[Method.GREEDY])

    def _theoretical(self, state: TrialState) -> TrialState:
        return self._run_method(state, Method.THEORETICAL, self.theoretical)

    def _conventional(self, state: TrialState) -> TrialState:
        return self._run_method(state, Method.CONVENTIONAL, self.conventional,
                                state["streams"].solver[Method.CONVENTIONAL])
