"""
Synthetic test signals with known discontinuities.

- ``bessel_signal`` (g1): J1(20x) + x on [0.3, 0.4] - x on [0.6, 1];
  jumps at 0.3, 0.4 and 0.6
- ``heavisine`` (g2): 4 sin(4 pi x) - sign(x - 0.3) - sign(0.72 - x);
  jumps at 0.3 and 0.72
- ``vector_signal``: the pair [4 g1, g2]
"""

from typing import Callable, Dict, Tuple

import numpy as np
from scipy.special import j1

from src.entity.series_entity import DataSeries
from src.logs.logger_config import get_tool_logger
from src.utils.exceptions import CssdParameterError

logger = get_tool_logger("SyntheticSignals")

EQUIDISTANT = "equidistant"
UNIFORM = "uniform"

BESSEL_JUMPS = (0.3, 0.4, 0.6)
HEAVISINE_JUMPS = (0.3, 0.72)


def bessel_signal(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    middle = (x >= 0.3) & (x <= 0.4)
    tail = (x >= 0.6) & (x <= 1.0)
    return j1(20.0 * x) + x * middle - x * tail


def heavisine(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 4.0 * np.sin(4.0 * np.pi * x) - np.sign(x - 0.3) - np.sign(0.72 - x)


def vector_signal(x: np.ndarray) -> np.ndarray:
    """Two-component signal, shape (len(x), 2)."""
    return np.column_stack([4.0 * bessel_signal(x), heavisine(x)])


SIGNALS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "bessel": bessel_signal,
    "heavisine": heavisine,
    "vector": vector_signal,
}

SIGNAL_JUMPS: Dict[str, Tuple[float, ...]] = {
    "bessel": BESSEL_JUMPS,
    "heavisine": HEAVISINE_JUMPS,
    "vector": tuple(sorted(set(BESSEL_JUMPS) | set(HEAVISINE_JUMPS))),
}


def sample_sites(n: int, layout: str, rng: np.random.Generator) -> np.ndarray:
    """
    Sample sites in [0, 1].

    Args:
        n: number of sites
        layout: "equidistant" (including both end points) or "uniform"
            (sorted uniform random draws)
        rng: random generator used by the uniform layout

    Returns:
        Sorted array of n sites
    """
    if n < 1:
        raise CssdParameterError(f"the number of sites must be positive, got {n}")
    if layout == EQUIDISTANT:
        return np.linspace(0.0, 1.0, n)
    if layout == UNIFORM:
        return np.sort(rng.uniform(0.0, 1.0, n))
    raise CssdParameterError(f"unknown site layout {layout!r}")


def generate_series(
    signal: str,
    n: int,
    sigma: float,
    seed: int,
    layout: str = EQUIDISTANT,
) -> DataSeries:
    """
    Noisy samples of a test signal.

    Args:
        signal: "bessel", "heavisine" or "vector"
        n: number of samples
        sigma: standard deviation of the additive Gaussian noise (>= 0)
        seed: seed of ``numpy.random.default_rng``; sites are drawn before noise
        layout: site layout, see ``sample_sites``

    Returns:
        Series with delta = sigma (delta = 1 for noiseless samples)
    """
    if signal not in SIGNALS:
        raise CssdParameterError(f"unknown signal {signal!r}; choose from {sorted(SIGNALS)}")
    if not sigma >= 0:
        raise CssdParameterError(f"sigma must be non-negative, got {sigma}")
    rng = np.random.default_rng(seed)
    xs = sample_sites(n, layout, rng)
    clean = SIGNALS[signal](xs)
    ys = clean + (rng.normal(0.0, sigma, clean.shape) if sigma > 0 else 0.0)
    deltas = np.full(n, sigma if sigma > 0 else 1.0)
    logger.debug("generated signal", signal=signal, n=n, sigma=sigma, seed=seed, layout=layout)
    return DataSeries(xs=xs, ys=ys, deltas=deltas)
