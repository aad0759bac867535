"""
State Manager for the hyperparameter search

Tracks the evaluation budget, every scored parameter pair, the incumbent and
the search stage while ``select_params`` runs.
"""

import math
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.entity.series_entity import Hyperparams


class BudgetExhausted(Exception):
    """Raised inside the search when no evaluations are left."""


class SearchStateManager:
    """Manages state for one cross-validation parameter search."""

    def __init__(self, budget: int):
        if budget < 1:
            raise ValueError(f"evaluation budget must be at least 1, got {budget}")
        self.state: Dict[str, Any] = self._initialize_state(budget)

    def _initialize_state(self, budget: int) -> Dict[str, Any]:
        """Initialize empty state."""
        return {
            # Budget Tracking
            "total_budget": budget,
            "evaluations_used": 0,

            # Search Progress
            "stage": "start",
            "completed_stages": [],
            "history": [],
            "simplex_origins": [],

            # Incumbent
            "best_params": None,
            "best_score": math.inf,
            "start_score": None,

            # Diagnostics
            "warnings": [],
            "started_at": datetime.now().isoformat(),
        }

    @property
    def remaining_budget(self) -> int:
        return self.state["total_budget"] - self.state["evaluations_used"]

    @property
    def evaluations_used(self) -> int:
        return self.state["evaluations_used"]

    @property
    def best(self) -> Tuple[Optional[Hyperparams], float]:
        return self.state["best_params"], self.state["best_score"]

    def enter_stage(self, stage: str):
        """Move the search into a new stage (grid, simplex, restart_<k>)."""
        current = self.state["stage"]
        if current not in self.state["completed_stages"]:
            self.state["completed_stages"].append(current)
        self.state["stage"] = stage

    def spend_evaluation(self):
        """
        Record that one CV score is about to be computed.

        Raises:
            BudgetExhausted: if the budget is used up
        """
        if self.remaining_budget <= 0:
            raise BudgetExhausted(f"evaluation budget of {self.state['total_budget']} used up")
        self.state["evaluations_used"] += 1

    def record(self, params: Hyperparams, score: float) -> bool:
        """
        Store a scored parameter pair.

        Returns:
            bool: True if the pair strictly improves on the incumbent
        """
        self.state["history"].append({
            "stage": self.state["stage"],
            "params": params.as_dict(),
            "score": score,
        })
        if self.state["start_score"] is None:
            self.state["start_score"] = score
        if score < self.state["best_score"] or self.state["best_params"] is None:
            self.state["best_params"] = params
            self.state["best_score"] = score
            return True
        return False

    def add_origin(self, params: Hyperparams):
        """Remember where a simplex run started."""
        self.state["simplex_origins"].append(params.as_dict())

    def add_warning(self, warning: str):
        """Add warning to state."""
        self.state["warnings"].append(f"{datetime.now().isoformat()}: {warning}")

    def scores(self) -> List[float]:
        return [entry["score"] for entry in self.state["history"]]

    def ranked_params(self, stages: Sequence[str]) -> List[Hyperparams]:
        """Pairs scored during the given stages, best score first (ties in scoring order)."""
        entries = [entry for entry in self.state["history"] if entry["stage"] in stages]
        return [Hyperparams(**entry["params"]) for entry in sorted(entries, key=lambda entry: entry["score"])]

    def get_execution_summary(self) -> Dict[str, Any]:
        """Get summary of the search."""
        best_params = self.state["best_params"]
        return {
            "total_budget": self.state["total_budget"],
            "evaluations_used": self.state["evaluations_used"],
            "stages": [*self.state["completed_stages"], self.state["stage"]],
            "start_score": self.state["start_score"],
            "best_score": self.state["best_score"],
            "best_params": best_params.as_dict() if best_params is not None else None,
            "simplex_origins": self.state["simplex_origins"],
            "warnings": self.state["warnings"],
        }

    def export_state(self) -> Dict[str, Any]:
        """Export current state as a JSON-ready dictionary."""
        best_params = self.state["best_params"]
        return {**self.state, "best_params": best_params.as_dict() if best_params is not None else None}
