"""Five-point central differences on a uniform grid symmetric about 0.

The grid ``y_j = (j + 1/2) h`` avoids the origin and satisfies
``y[::-1] == -y``, so the reflection ``g(-y)`` is an index reversal.
Points within two nodes of either end are returned as NaN after each
application.
"""

from __future__ import annotations

import numpy as np

from .params import Params


def symmetric_grid(y_max: float, h: float) -> np.ndarray:
    m = int(np.ceil(y_max / h))
    j = np.arange(-m, m)
    return (j + 0.5) * h


def d1(g: np.ndarray, h: float) -> np.ndarray:
    out = np.full_like(g, np.nan)
    out[2:-2] = (g[:-4] - 8 * g[1:-3] + 8 * g[3:-1] - g[4:]) / (12 * h)
    return out


def d2(g: np.ndarray, h: float) -> np.ndarray:
    out = np.full_like(g, np.nan)
    out[2:-2] = (-g[:-4] + 16 * g[1:-3] - 30 * g[2:-2] + 16 * g[3:-1] - g[4:]) / (12 * h * h)
    return out


def theta(y: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """y g'(y)."""
    return y * d1(g, h)


def dunkl_laplacian(params: Params, y: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    k = params.k
    return d2(g, h) + (2 * k / y) * d1(g, h) - k * (g - g[::-1]) / (y * y)


def lowering(params: Params, y: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """n |y|^(2-2/n) Delta_k g."""
    n = params.n
    return n * np.abs(y) ** (2 - 2 / n) * dunkl_laplacian(params, y, g, h)


def raising(params: Params, y: np.ndarray, g: np.ndarray) -> np.ndarray:
    """n |y|^(2/n) g."""
    return params.n * np.abs(y) ** (2 / params.n) * g
