"""
Automatic choice of (p, gamma) by K-fold cross validation.

The search works in the coordinates s = logit(p) and t = (2/pi) arctan(gamma),
where t = 1 stands for gamma = INFINITE. A deterministic coarse grid (which
always contains INFINITE) is followed by Nelder-Mead refinement from the best
grid point. Every cross-validation score costs one unit of the evaluation
budget; the start is scored first, so the result is never worse than the start.
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit
from sklearn.model_selection import KFold

from src.entity.series_entity import INFINITE, DataSeries, GammaSentinel, Hyperparams
from src.logs.logger_config import get_tool_logger
from src.state.state_manager import BudgetExhausted, SearchStateManager
from src.tools.cssd.solver import evaluate_solution, solve_cssd
from src.utils.exceptions import BadFoldCount, DegenerateFold, InvalidIndex
from src.utils.parallel import ordered_map

logger = get_tool_logger("ModelSelection")

LOGIT_LIMIT = 12.0
GRID_POINTS = 4
SIMPLEX_STEP = (1.0, 0.1)
MIN_UNIT_GAMMA = 1e-9
COARSE_STAGES = ("start", "grid")


def p_to_coord(p: float) -> float:
    """logit(p), clipped to the search box."""
    return float(np.clip(logit(p), -LOGIT_LIMIT, LOGIT_LIMIT))


def coord_to_p(s: float) -> float:
    return float(expit(np.clip(s, -LOGIT_LIMIT, LOGIT_LIMIT)))


def gamma_to_unit(gamma: Union[float, GammaSentinel]) -> float:
    """Map gamma in (0, inf] bijectively onto (0, 1]; INFINITE goes to 1."""
    if gamma is INFINITE or math.isinf(gamma):
        return 1.0
    return 2.0 / math.pi * math.atan(gamma)


def unit_to_gamma(t: float) -> Union[float, GammaSentinel]:
    """Inverse of ``gamma_to_unit``; t >= 1 gives INFINITE, t is floored at 1e-9."""
    if t >= 1.0:
        return INFINITE
    return math.tan(math.pi / 2.0 * max(t, MIN_UNIT_GAMMA))


def kfold_split(n: int, k: int, seed: int) -> List[np.ndarray]:
    """
    Random partition of range(n) into k folds of nearly equal size.

    Args:
        n: number of sites
        k: number of folds, 2 <= k <= n
        seed: random seed; equal seeds give equal folds

    Returns:
        k sorted index arrays whose sizes differ by at most one

    Raises:
        BadFoldCount: if k is outside [2, n]
    """
    if not 2 <= k <= n:
        raise BadFoldCount(f"need 2 <= folds <= N={n}, got {k}")
    kf = KFold(n_splits=k, shuffle=True, random_state=seed)
    return [np.sort(test_index) for _, test_index in kf.split(np.zeros((n, 1)))]


def _fold_residual(series: DataSeries, fold: np.ndarray, params: Hyperparams) -> float:
    mask = np.ones(series.n, dtype=bool)
    mask[fold] = False
    if not np.any(mask):
        raise DegenerateFold("a fold leaves no training data")
    model = solve_cssd(series.subset(np.flatnonzero(mask)), params)
    predicted = evaluate_solution(model, series.xs[fold])
    residual = (predicted - series.ys[fold]) / series.deltas[fold][:, None]
    return math.fsum(np.ravel(residual**2))


def cv_score(
    series: DataSeries,
    folds: Sequence[np.ndarray],
    params: Hyperparams,
    threads: Optional[int] = None,
) -> float:
    """
    K-fold cross-validation score.

    CV = (1/N) sum_k sum_{i in fold k} ((f^{-k}(x_i) - y_i) / delta_i)^2, summed
    over all data dimensions, where f^{-k} is the CSSD fitted without fold k.
    Held-out sites at a discontinuity of f^{-k} use the mean of both one-sided
    limits and sites beyond the training range use the linear extension.

    Args:
        series: data series
        folds: disjoint 0-based index arrays
        params: hyperparameters to score
        threads: cap on parallel fold fits (default: ``CSSD_THREADS``)

    Returns:
        The score; fold contributions are summed in fold order

    Raises:
        DegenerateFold: if a fold covers every site
    """
    folds = [np.asarray(fold, dtype=int) for fold in folds]
    for fold in folds:
        if fold.size and (fold.min() < 0 or fold.max() >= series.n):
            raise InvalidIndex(f"fold indices must lie in [0, {series.n - 1}]")

    parts = ordered_map(lambda fold: _fold_residual(series, fold, params), folds, threads)
    score = math.fsum(parts) / series.n
    logger.debug("cv score", p=params.p, gamma=params.as_dict()["gamma"], score=score)
    return score


class ParameterSearch:
    """Budgeted search over (logit p, arctan gamma) with cached scores."""

    def __init__(
        self,
        series: DataSeries,
        folds: Sequence[np.ndarray],
        state: SearchStateManager,
        threads: Optional[int] = None,
    ):
        self.series = series
        self.folds = list(folds)
        self.state = state
        self.threads = threads
        self._cache: Dict[Tuple[float, Union[float, GammaSentinel]], float] = {}
        self.origins: List[Hyperparams] = []

    def score(self, params: Hyperparams) -> float:
        """CV score of params; a repeated pair is answered from the cache for free."""
        key = (params.p, params.gamma)
        if key in self._cache:
            return self._cache[key]
        self.state.spend_evaluation()
        value = cv_score(self.series, self.folds, params, self.threads)
        self._cache[key] = value
        self.state.record(params, value)
        return value

    def score_coords(self, coords: np.ndarray) -> float:
        s, t = float(coords[0]), float(coords[1])
        return self.score(Hyperparams(p=coord_to_p(s), gamma=unit_to_gamma(t)))

    def grid_stage(self, points: int = GRID_POINTS) -> None:
        """Score a points x (points + 1) grid; the extra column is gamma = INFINITE."""
        self.state.enter_stage("grid")
        logger.info("search stage", stage="grid", remaining=self.state.remaining_budget)
        for s in np.linspace(0.0, LOGIT_LIMIT, points):
            for t in [*((np.arange(points) + 0.5) / points), 1.0]:
                self.score_coords(np.array([s, t]))

    def restart_origin(self) -> Optional[Hyperparams]:
        """Best start or grid pair that has not started a simplex run yet (None when all have)."""
        used = set(self.origins)
        for candidate in self.state.ranked_params(COARSE_STAGES):
            if candidate not in used:
                return candidate
        return None

    def simplex_stage(self, stage: str, origin: Optional[Hyperparams] = None) -> None:
        """Nelder-Mead refinement from origin (default: the incumbent) until converged or out of budget."""
        self.state.enter_stage(stage)
        if origin is None:
            origin, _ = self.state.best
        self.origins.append(origin)
        self.state.add_origin(origin)
        logger.info("search stage", stage=stage, remaining=self.state.remaining_budget, **origin.as_dict())
        x0 = np.array([p_to_coord(origin.p), min(gamma_to_unit(origin.gamma), 1.0 - SIMPLEX_STEP[1])])
        simplex = np.array([x0, x0 + [SIMPLEX_STEP[0], 0.0], x0 + [0.0, SIMPLEX_STEP[1]]])

        def objective(coords: np.ndarray) -> float:
            s = float(np.clip(coords[0], -LOGIT_LIMIT, LOGIT_LIMIT))
            t = float(np.clip(coords[1], 0.0, 1.0))
            return self.score_coords(np.array([s, t]))

        minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": 1e-3, "fatol": 1e-10,
                     "maxfev": max(self.state.remaining_budget, 1) * 4},
        )


def _run_search(
    series: DataSeries,
    k: int,
    seed: int,
    start: Hyperparams,
    budget: int,
    restarts: int,
    state: Optional[SearchStateManager],
    threads: Optional[int],
) -> Tuple[Hyperparams, float]:
    state = state if state is not None else SearchStateManager(budget)
    search = ParameterSearch(series, kfold_split(series.n, k, seed), state, threads)

    try:
        search.score(start)
        search.grid_stage()
        search.simplex_stage("simplex")
        for restart in range(1, restarts + 1):
            origin = search.restart_origin()
            if origin is None:
                break
            search.simplex_stage(f"restart_{restart}", origin)
    except BudgetExhausted:
        logger.info("evaluation budget used up", evaluations=state.evaluations_used)

    params, score = state.best
    summary = state.get_execution_summary()
    logger.info(
        "parameter search finished",
        p=params.p, gamma=params.as_dict()["gamma"], score=score,
        evaluations=summary["evaluations_used"], stages=summary["stages"],
    )
    return params, score


def select_params(
    series: DataSeries,
    k: int,
    seed: int,
    start: Hyperparams,
    budget: int,
    state: Optional[SearchStateManager] = None,
    threads: Optional[int] = None,
) -> Tuple[Hyperparams, float]:
    """
    Choose (p, gamma) by minimizing the K-fold CV score.

    Args:
        series: data series
        k: number of folds (5 is the usual choice)
        seed: seed of the fold partition
        start: starting parameters; always scored first
        budget: maximum number of CV evaluations (at least 1)
        state: optional state manager receiving the search history
        threads: cap on parallel fold fits

    Returns:
        (best parameters found, their CV score); the score never exceeds the
        score of ``start``
    """
    return _run_search(series, k, seed, start, budget, 0, state, threads)


def select_params_with_restarts(
    series: DataSeries,
    k: int,
    seed: int,
    start: Hyperparams,
    budget: int,
    restarts: int,
    state: Optional[SearchStateManager] = None,
    threads: Optional[int] = None,
) -> Tuple[Hyperparams, float]:
    """
    ``select_params`` followed by up to ``restarts`` further simplex runs.

    Restart k starts from the best start or grid pair that has not started a
    simplex run yet, on the same folds. The loop ends early when every coarse
    pair has served as a start. All stages share
    one evaluation budget.
    """
    if restarts < 0:
        raise ValueError(f"restarts must be non-negative, got {restarts}")
    return _run_search(series, k, seed, start, budget, restarts, state, threads)
