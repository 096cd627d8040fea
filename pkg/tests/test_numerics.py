"""Generic kernels: grids, RK4, Simpson quadrature, central differences."""

import math

import numpy as np
import pytest

from wavetrains import (
    InvalidCount,
    NonFiniteValue,
    QuadratureOrderWarning,
    SampledFunction,
    TooFewPoints,
    UniformGrid,
    build_space_grid,
    central_diff,
    cumulative_simpson,
    is_power_of_two,
    rk4_integrate,
    simpson,
)
from wavetrains.errors import GridMismatch


# ---------------------------------------------------------------- grids

def test_uniform_grid_points_are_index_exact():
    grid = UniformGrid(start=0.0, step=0.1, count=11)
    expected = 0.0 + np.arange(11) * 0.1
    assert np.array_equal(grid.points(), expected)
    assert grid.stop == expected[-1]


def test_uniform_grid_rejects_degenerate_input():
    with pytest.raises(InvalidCount):
        UniformGrid(start=0.0, step=0.1, count=1)
    with pytest.raises(ValueError):
        UniformGrid(start=0.0, step=0.0, count=8)
    with pytest.raises(ValueError):
        UniformGrid(start=0.0, step=-1.0, count=8)


def test_index_of_hits_and_misses():
    grid = UniformGrid(start=0.0, step=0.25, count=9)
    assert grid.index_of(0.75) == 3
    assert grid.index_of(grid.stop) == 8
    with pytest.raises(GridMismatch):
        grid.index_of(0.30)
    with pytest.raises(GridMismatch):
        grid.index_of(2.25)  # past the last point


def test_sampled_function_validates():
    grid = UniformGrid(start=0.0, step=1.0, count=4)
    with pytest.raises(GridMismatch):
        SampledFunction(grid, np.zeros(5))
    with pytest.raises(NonFiniteValue):
        SampledFunction(grid, np.array([0.0, 1.0, np.nan, 2.0]))


# ---------------------------------------------------------------- RK4

def test_rk4_constant_rhs_stays_put():
    grid = UniformGrid(start=0.0, step=0.1, count=21)
    ys = rk4_integrate(lambda t, y: np.zeros_like(y), [3.0], grid)
    assert np.array_equal(ys[:, 0], np.full(21, 3.0))


def test_rk4_exponential_growth():
    grid = UniformGrid(start=0.0, step=1e-3, count=1001)
    ys = rk4_integrate(lambda t, y: y, [1.0], grid)
    assert abs(ys[-1, 0] - math.e) < 1e-10


def test_rk4_harmonic_oscillator_period():
    two_pi = 2.0 * math.pi
    n = 6284
    grid = UniformGrid(start=0.0, step=two_pi / n, count=n + 1)
    ys = rk4_integrate(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], grid)
    assert abs(ys[-1, 0] - 1.0) < 1e-9
    assert abs(ys[-1, 1]) < 1e-9


def test_rk4_energy_conservation_order():
    # fourth-order method: halving the step shrinks the per-period energy
    # drift by roughly 2^4
    def drift(step_count):
        grid = UniformGrid(start=0.0, step=2.0 * math.pi / step_count,
                           count=step_count + 1)
        ys = rk4_integrate(lambda t, y: np.array([y[1], -4.0 * y[0]]),
                           [1.0, 0.0], grid)
        energy = 0.5 * (ys[:, 1] ** 2 + 4.0 * ys[:, 0] ** 2)
        return float(np.max(np.abs(energy - energy[0])))

    ratio = drift(512) / drift(1024)
    assert ratio > 8.0


def test_rk4_flags_nonfinite_states():
    grid = UniformGrid(start=0.0, step=0.1, count=11)

    def rhs(t, y):
        return np.array([np.inf]) if t > 0.45 else np.array([0.0])

    with pytest.raises(NonFiniteValue):
        rk4_integrate(rhs, [1.0], grid)


# ---------------------------------------------------------------- Simpson

def test_simpson_constant_is_exact():
    grid = UniformGrid(start=0.0, step=0.01, count=101)
    assert abs(simpson(SampledFunction(grid, np.ones(101))) - 1.0) < 1e-14


def test_simpson_exact_through_cubics():
    grid = UniformGrid(start=0.0, step=0.01, count=101)
    x = grid.points()
    assert abs(simpson(SampledFunction(grid, x * x)) - 1.0 / 3.0) < 1e-12
    assert abs(simpson(SampledFunction(grid, x ** 3)) - 0.25) < 1e-12


def test_simpson_gaussian_reference():
    grid = UniformGrid(start=-8.0, step=16.0 / 2000, count=2001)
    x = grid.points()
    val = simpson(SampledFunction(grid, np.exp(-x * x)))
    assert abs(val - math.sqrt(math.pi)) < 1e-10


def test_simpson_too_few_points():
    grid = UniformGrid(start=0.0, step=1.0, count=2)
    with pytest.raises(TooFewPoints):
        simpson(SampledFunction(grid, np.ones(2)))


def test_simpson_even_count_warns_and_still_integrates():
    grid = UniformGrid(start=0.0, step=1.0 / 99, count=100)
    x = grid.points()
    with pytest.warns(QuadratureOrderWarning):
        val = simpson(SampledFunction(grid, x * x))
    assert abs(val - (1.0 / 3.0)) < 1e-4  # trapezoid tail degrades, not breaks


def test_cumulative_simpson_tracks_antiderivative():
    n = 301
    step = 3.0 / (n - 1)
    t = np.arange(n) * step
    running = cumulative_simpson(np.cos(t), step)
    assert running[0] == 0.0
    assert np.max(np.abs(running - np.sin(t))) < 1e-9
    # even count: last point falls back to one trapezoid interval
    running_even = cumulative_simpson(np.cos(t[:-1]), step)
    assert np.max(np.abs(running_even - np.sin(t[:-1]))) < 1e-7


def test_cumulative_simpson_consistent_with_simpson(rng):
    n = 257
    step = 0.02
    grid = UniformGrid(start=0.0, step=step, count=n)
    t = grid.points()
    coeffs = rng.normal(size=4)
    y = (coeffs[0] + coeffs[1] * np.sin(t) + coeffs[2] * np.cos(2 * t)
         + coeffs[3] * t)
    running = cumulative_simpson(y, step)
    total = simpson(SampledFunction(grid, y))
    assert abs(running[-1] - total) < 1e-12


# ------------------------------------------------------ finite differences

def test_central_diff_linear_exact():
    grid = UniformGrid(start=0.0, step=0.1, count=21)
    d = central_diff(SampledFunction(grid, grid.points()), order=1)
    assert np.allclose(d.values, 1.0, atol=1e-12)
    assert d.accuracy_order == 2


def test_central_diff_second_derivative_quadratic_exact():
    grid = UniformGrid(start=-1.0, step=0.1, count=21)
    x = grid.points()
    d2 = central_diff(SampledFunction(grid, x * x), order=2)
    assert np.allclose(d2.values, 2.0, atol=1e-9)


def test_central_diff_second_order_convergence():
    def interior_error(n):
        grid = UniformGrid(start=0.0, step=3.0 / n, count=n + 1)
        x = grid.points()
        d = central_diff(SampledFunction(grid, np.sin(x)), order=1)
        return float(np.max(np.abs(d.values[1:-1] - np.cos(x)[1:-1])))

    ratio = interior_error(150) / interior_error(300)
    assert ratio > 3.8  # order >= 1.95


def test_central_diff_guard_rails():
    grid2 = UniformGrid(start=0.0, step=1.0, count=2)
    with pytest.raises(TooFewPoints):
        central_diff(SampledFunction(grid2, np.zeros(2)), order=1)
    grid4 = UniformGrid(start=0.0, step=1.0, count=4)
    with pytest.raises(TooFewPoints):
        central_diff(SampledFunction(grid4, np.zeros(4)), order=2)
    grid8 = UniformGrid(start=0.0, step=1.0, count=8)
    with pytest.raises(ValueError):
        central_diff(SampledFunction(grid8, np.zeros(8)), order=3)


# ------------------------------------------------------------ space grids

def test_build_space_grid_four_points():
    grid = build_space_grid(0.0, 1.0, 4)
    assert np.allclose(grid.points(), [-1.0, -0.5, 0.0, 0.5], atol=1e-15)


def test_build_space_grid_offset_box():
    grid = build_space_grid(5.0, 10.0, 1024)
    assert grid.start == -5.0
    assert grid.step == 20.0 / 1024
    assert grid.count == 1024


def test_build_space_grid_rejects_bad_input():
    with pytest.raises(InvalidCount):
        build_space_grid(0.0, 1.0, 1000)
    with pytest.raises(ValueError):
        build_space_grid(0.0, 0.0, 64)


def test_is_power_of_two():
    for k in range(0, 16):
        assert is_power_of_two(1 << k)
    for bad in (0, -4, 3, 6, 12, 1000):
        assert not is_power_of_two(bad)
