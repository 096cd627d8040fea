"""Generic numerical kernels shared by all other modules.

Fixed-step RK4 integration, composite Simpson quadrature (plain and
cumulative), second-order central differences, and uniform-grid
construction.  Everything here is a pure function of its inputs; the
record types are frozen.  Quadrature sums use numpy's pairwise
summation, so results do not depend on any parallel reduction order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GridMismatch,
    InvalidCount,
    NonFiniteValue,
    QuadratureOrderWarning,
    TooFewPoints,
)


@dataclass(frozen=True)
class UniformGrid:
    """Uniformly spaced axis (time or space).

    Point i is ``start + i*step`` computed directly from the index, never
    by accumulation, so there is no drift across long grids.
    """

    start: float
    step: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise InvalidCount(f"grid needs an integer count >= 2, got {self.count}")
        if not (self.step > 0):
            raise ValueError(f"grid step must be positive, got {self.step}")

    @property
    def stop(self) -> float:
        return self.start + (self.count - 1) * self.step

    def points(self) -> np.ndarray:
        return self.start + np.arange(self.count) * self.step

    def index_of(self, value: float, tol: float = 1e-9) -> int:
        """Index of the grid point equal to ``value`` (within ``tol``)."""
        i = int(round((value - self.start) / self.step))
        if i < 0 or i >= self.count or abs(self.start + i * self.step - value) > tol:
            raise GridMismatch(f"{value} is not a point of this grid")
        return i


@dataclass(frozen=True)
class SampledFunction:
    """Values of a function on a UniformGrid.

    ``accuracy_order`` is set by producers whose output carries a known
    discretization order (e.g. central differences); None means exact
    sampling.
    """

    grid: UniformGrid
    values: np.ndarray
    accuracy_order: int | None = field(default=None)

    def __post_init__(self):
        vals = np.asarray(self.values)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.count,):
            raise GridMismatch(
                f"values shape {vals.shape} does not match grid count {self.grid.count}"
            )
        if not np.all(np.isfinite(vals)):
            raise NonFiniteValue("sampled values contain NaN or infinity")


def rk4_integrate(rhs, y0, grid: UniformGrid) -> np.ndarray:
    """Classic fixed-step fourth-order Runge-Kutta.

    ``rhs(t, y) -> dy/dt`` with y a 1-D state vector.  Returns the states
    at every grid point, shape (grid.count, len(y0)).  Global error is
    O(step^4) for smooth right-hand sides.
    """
    y = np.asarray(y0, dtype=float if not np.iscomplexobj(y0) else complex).ravel()
    out = np.empty((grid.count, y.size), dtype=y.dtype)
    out[0] = y
    h = grid.step
    h2 = 0.5 * h
    h6 = h / 6.0
    t = grid.start
    isfinite = np.isfinite
    for i in range(1, grid.count):
        k1 = np.asarray(rhs(t, y))
        k2 = np.asarray(rhs(t + h2, y + h2 * k1))
        k3 = np.asarray(rhs(t + h2, y + h2 * k2))
        k4 = np.asarray(rhs(t + h, y + h * k3))
        y = y + h6 * (k1 + 2.0 * (k2 + k3) + k4)
        if not isfinite(y).all():
            raise NonFiniteValue(f"RK4 state became non-finite at t = {t + h}")
        t = grid.start + i * h
        out[i] = y
    return out


def _simpson_array(y: np.ndarray, step: float, warn: bool = False):
    """Composite Simpson on equally spaced samples (last axis).

    An even sample count (odd interval count) degrades the final interval
    to the trapezoid rule; with ``warn`` it emits QuadratureOrderWarning.
    Internal field-grid quadratures keep ``warn`` off because their
    power-of-two grids are even by construction and the final interval
    sits on fully decayed tails.
    """
    y = np.asarray(y)
    n = y.shape[-1]
    if n < 3:
        raise TooFewPoints(f"Simpson needs >= 3 samples, got {n}")
    tail = 0.0
    if n % 2 == 0:
        if warn:
            warnings.warn(
                "even sample count: trapezoid rule on the last interval "
                "degrades the composite order",
                QuadratureOrderWarning,
                stacklevel=3,
            )
        tail = 0.5 * step * (y[..., -2] + y[..., -1])
        y = y[..., :-1]
    core = (step / 3.0) * (
        y[..., 0]
        + y[..., -1]
        + 4.0 * np.sum(y[..., 1:-1:2], axis=-1)
        + 2.0 * np.sum(y[..., 2:-2:2], axis=-1)
    )
    return core + tail


def simpson(samples: SampledFunction):
    """Composite Simpson integral of a SampledFunction; O(step^4) for
    smooth integrands (see ``_simpson_array`` for the even-count rule)."""
    return _simpson_array(samples.values, samples.grid.step, warn=True)


def cumulative_simpson(y: np.ndarray, step: float) -> np.ndarray:
    """Running integral from the first sample, Simpson-grade throughout.

    Even-index endpoints use composite Simpson over whole pairs; an
    odd-index endpoint adds the integral of the interpolating parabola
    over the half pair, (step/12)*(5*f0 + 8*f1 - f2), keeping O(step^4)
    local accuracy at every output point.
    """
    y = np.asarray(y)
    n = y.shape[-1]
    out = np.zeros_like(y, dtype=np.result_type(y, float))
    if n < 2:
        return out
    if n == 2:
        out[..., 1] = 0.5 * step * (y[..., 0] + y[..., 1])
        return out
    pair = (step / 3.0) * (y[..., :-2:2] + 4.0 * y[..., 1:-1:2] + y[..., 2::2])
    even = np.cumsum(pair, axis=-1)
    out[..., 2::2] = even
    # odd endpoint = Simpson up to the preceding even index + half-pair term
    nodd = (n - 1) // 2  # odd indices with a full parabola to their right
    half = (step / 12.0) * (5.0 * y[..., 0:2 * nodd:2]
                            + 8.0 * y[..., 1:2 * nodd + 1:2]
                            - y[..., 2:2 * nodd + 2:2])
    prev = np.concatenate([np.zeros_like(even[..., :1]), even], axis=-1)
    out[..., 1:2 * nodd:2] = prev[..., :nodd] + half
    if n % 2 == 0:
        # final point after an even count: trapezoid on the last interval
        out[..., -1] = out[..., -2] + 0.5 * step * (y[..., -2] + y[..., -1])
    return out


def central_diff(samples: SampledFunction, order: int = 1) -> SampledFunction:
    """Second-order finite-difference derivative of sampled values.

    order=1: first derivative, central interior, one-sided 3-point ends.
    order=2: second derivative, central interior, one-sided 5-point ends
    (both end stencils are themselves second-order accurate).
    """
    y = samples.values
    h = samples.grid.step
    n = y.shape[-1]
    if order == 1:
        if n < 3:
            raise TooFewPoints("first derivative needs >= 3 samples")
        d = np.empty_like(y, dtype=np.result_type(y, float))
        d[1:-1] = (y[2:] - y[:-2]) / (2.0 * h)
        d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
        d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * h)
    elif order == 2:
        if n < 5:
            raise TooFewPoints("second derivative needs >= 5 samples")
        d = np.empty_like(y, dtype=np.result_type(y, float))
        d[1:-1] = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / (h * h)
        d[0] = (35.0 * y[0] - 104.0 * y[1] + 114.0 * y[2]
                - 56.0 * y[3] + 11.0 * y[4]) / (12.0 * h * h)
        d[-1] = (35.0 * y[-1] - 104.0 * y[-2] + 114.0 * y[-3]
                 - 56.0 * y[-4] + 11.0 * y[-5]) / (12.0 * h * h)
    else:
        raise ValueError(f"order must be 1 or 2, got {order}")
    return SampledFunction(samples.grid, d, accuracy_order=2)


def is_power_of_two(count: int) -> bool:
    return count >= 1 and (count & (count - 1)) == 0


def build_space_grid(center: float, half_width: float, count: int) -> UniformGrid:
    """Symmetric uniform grid about ``center`` with a power-of-two count.

    The right endpoint is excluded (count points over [center-h, center+h)),
    so the same grid serves FFT-based propagation without duplication.
    """
    if not (half_width > 0):
        raise ValueError(f"half_width must be positive, got {half_width}")
    if not is_power_of_two(count) or count < 2:
        raise InvalidCount(f"space grid count must be a power of two >= 2, got {count}")
    step = 2.0 * half_width / count
    return UniformGrid(start=center - half_width, step=step, count=count)
