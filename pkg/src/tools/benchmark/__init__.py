"""Runtime benchmarks."""

from .runtime_scaling import growth_ratios, run_benchmark, runtime_table

__all__ = ["run_benchmark", "runtime_table", "growth_ratios"]
