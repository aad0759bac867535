"""
Cubic Smoothing Splines with Discontinuities

This package contains the numerical core:
- preprocess: validation, sorting, merging of coincident sites, mesh ratio, binning
- energy: O(1) incremental smoothing-spline energies (forward and reverse streams)
- segment_fit: minimizing spline of one interval, evaluation and piece export
- solver: pruned dynamic program, traceback and the full CSSD
- model_selection: K-fold cross validation and (p, gamma) search
- oracle: dense and brute-force reference computations
"""

from .preprocess import MeshRatioWarning, bin_series, merge_coincident, mesh_ratio, series_from_arrays, validate_and_sort
from .energy import engine_init, engine_push, prefix_energies
from .segment_fit import eval_spline, fit_segment, piece_coefficients
from .solver import evaluate_solution, objective, solve_cssd, solve_partition, traceback
from .model_selection import cv_score, kfold_split, select_params, select_params_with_restarts
from .oracle import brute_force_solve, dense_energy

__all__ = [
    "MeshRatioWarning",
    "validate_and_sort",
    "series_from_arrays",
    "merge_coincident",
    "mesh_ratio",
    "bin_series",
    "engine_init",
    "engine_push",
    "prefix_energies",
    "fit_segment",
    "eval_spline",
    "piece_coefficients",
    "solve_partition",
    "traceback",
    "solve_cssd",
    "objective",
    "evaluate_solution",
    "kfold_split",
    "cv_score",
    "select_params",
    "select_params_with_restarts",
    "dense_energy",
    "brute_force_solve",
]

# Operation descriptions, shown in the command-line help
TOOL_DESCRIPTIONS = {
    "solve_cssd": {
        "description": "Global minimizer of the jump-penalized cubic smoothing-spline functional",
        "input": "DataSeries and Hyperparams(p, gamma); gamma may be INFINITE",
        "output": "CssdSolution with discontinuities, segment splines, energies and objective",
    },
    "select_params": {
        "description": "Choose (p, gamma) by K-fold cross validation under an evaluation budget",
        "input": "DataSeries, fold count, seed, starting Hyperparams, budget",
        "output": "(Hyperparams, CV score) never worse than the start",
    },
}


def get_tool_info(tool_name: str = None) -> dict:
    """
    Get information about the main operations.

    Args:
        tool_name: Specific operation name, or None for all of them

    Returns:
        Description dictionary
    """
    if tool_name:
        return TOOL_DESCRIPTIONS.get(tool_name, {})
    return TOOL_DESCRIPTIONS
