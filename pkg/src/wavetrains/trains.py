"""Exact wave-packet-train states built on a classical polar trajectory.

The n-th state is  psi_n = R_n exp(i Theta_n)  with

    R_n     = [sqrt(c0) / (sqrt(pi) 2^n n! rho)]^(1/2) H_n(xi) exp(-xi^2/2),
    xi      = sqrt(c0) x / rho - (b0/sqrt(c0)) cos(theta),
    Theta_n = drho x^2/(2 rho) - (b0 x/rho) sin(theta)
              + (b0^2/(4 c0)) sin(2 theta) - (1/2 + n) theta,

where (rho, theta) is the polar form of the classical solution and
c0 = rho^2 dtheta its first integral.  The density has n+1 humps sharing
one moving, breathing envelope; the hump pattern's center follows the
classical orbit x_c = (b0/c0) phi1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    GridMismatch,
    NegativeIndex,
    NonPositiveC0,
    NormDeficitWarning,
)
from .mathieu import PolarState, PolarTrajectory, Trajectory, polar_decompose
from .numerics import UniformGrid, central_diff, _simpson_array, build_space_grid
from .numerics import SampledFunction


@dataclass(frozen=True)
class TrainSpec:
    """Quantum number n, free center constant b0, and the trajectory's
    first integral c0 (always the computed one, never user-declared)."""

    n: int
    b0: float
    c0: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise NegativeIndex(f"quantum number must be a non-negative integer, got {self.n}")
        if not (self.c0 > 0):
            raise NonPositiveC0(
                f"first integral c0 must be strictly positive for a real "
                f"width parameter e = sqrt(dtheta); got {self.c0}"
            )

    @property
    def a0(self) -> float:
        """Normalization constant [sqrt(c0)/(sqrt(pi) 2^n n!)]^(1/2),
        recomputed on demand (log-gamma form, stable up to n ~ 200)."""
        return math.exp(0.5 * (0.5 * math.log(self.c0) - 0.5 * math.log(math.pi)
                               - self.n * math.log(2.0) - math.lgamma(self.n + 1)))


@dataclass(frozen=True)
class CoefficientSet:
    """The time-dependent coefficients of the test-function ansatz at one
    instant: complex b and a_n, real width parameter e > 0 and shift f."""

    t: float
    b: complex
    e: float
    f: float
    a_n: complex


@dataclass(frozen=True)
class TrainFrame:
    """Everything needed to evaluate psi_n at one time."""

    t: float
    rho: float
    theta: float
    drho: float
    spec: TrainSpec


@dataclass(frozen=True)
class FieldGrid:
    """Complex wavefunction samples on a uniform spatial grid at one time.

    ``norm`` is the Simpson quadrature of |psi|^2 on the grid;
    ``norm_deficit`` flags a norm visibly different from 1 (grid too small
    or too coarse for the state)."""

    grid: UniformGrid
    t: float
    values: np.ndarray
    norm: float
    norm_deficit: bool

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def hermite_scaled(n: int, xi):
    """Normalized Hermite function h_n(xi) = H_n(xi) e^(-xi^2/2) / sqrt(sqrt(pi) 2^n n!).

    Evaluated by the numerically stable scaled three-term recurrence
    h_{k+1} = xi sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1}; no overflow
    for n <= 200, |xi| <= 50 (far tails underflow harmlessly to zero).
    """
    if n < 0:
        raise NegativeIndex(f"function index must be >= 0, got {n}")
    xi = np.asarray(xi, dtype=float)
    h_prev = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = math.sqrt(2.0) * xi * h_prev
    for k in range(1, n):
        h, h_prev = xi * math.sqrt(2.0 / (k + 1)) * h - math.sqrt(k / (k + 1.0)) * h_prev, h
    return h if h.ndim else float(h)


def hermite_table(nmax: int, xi) -> np.ndarray:
    """h_0..h_nmax stacked along the first axis (one recurrence pass)."""
    if nmax < 0:
        raise NegativeIndex(f"function index must be >= 0, got {nmax}")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    table = np.empty((nmax + 1,) + xi.shape)
    table[0] = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if nmax >= 1:
        table[1] = math.sqrt(2.0) * xi * table[0]
    for k in range(1, nmax):
        table[k + 1] = (xi * math.sqrt(2.0 / (k + 1)) * table[k]
                        - math.sqrt(k / (k + 1.0)) * table[k - 1])
    return table


def train_frame(ptraj: PolarTrajectory, spec: TrainSpec, t: float) -> TrainFrame:
    """Frame at a sampled time of the polar trajectory."""
    i = ptraj.grid.index_of(t)
    s = ptraj.state(i)
    return TrainFrame(t=s.t, rho=s.rho, theta=s.theta, drho=s.drho, spec=spec)


def xi_of(frame: TrainFrame, x):
    """Dimensionless train coordinate xi = sqrt(c0) x / rho - (b0/sqrt(c0)) cos(theta)."""
    s = frame.spec
    sc = math.sqrt(s.c0)
    return sc * np.asarray(x, dtype=float) / frame.rho - (s.b0 / sc) * math.cos(frame.theta)


def coefficients(p: PolarState, spec: TrainSpec) -> CoefficientSet:
    """Ansatz coefficients at one instant:

    b = b0 e^(-i theta)/rho,  e = sqrt(c0)/rho (= sqrt(dtheta)),
    f = (b0/sqrt(c0)) cos theta,
    a_n = (A0/sqrt(rho)) exp{-i[(1/2+n) theta - (b0^2/(4 c0)) sin 2 theta]}.
    """
    sc = math.sqrt(spec.c0)
    b = spec.b0 * np.exp(-1j * p.theta) / p.rho
    e = sc / p.rho
    f = (spec.b0 / sc) * math.cos(p.theta)
    phase = (0.5 + spec.n) * p.theta - (spec.b0**2 / (4.0 * spec.c0)) * math.sin(2.0 * p.theta)
    a_n = spec.a0 / math.sqrt(p.rho) * np.exp(-1j * phase)
    return CoefficientSet(t=p.t, b=complex(b), e=float(e), f=float(f), a_n=complex(a_n))


def amplitude(frame: TrainFrame, x):
    """Signed real amplitude R_n(x, t) = c0^(1/4) rho^(-1/2) h_n(xi)."""
    s = frame.spec
    return s.c0**0.25 / math.sqrt(frame.rho) * hermite_scaled(s.n, xi_of(frame, x))


def phase(frame: TrainFrame, x):
    """Phase Theta_n(x, t) of the state."""
    s = frame.spec
    x = np.asarray(x, dtype=float)
    return (frame.drho * x * x / (2.0 * frame.rho)
            - (s.b0 * x / frame.rho) * math.sin(frame.theta)
            + (s.b0**2 / (4.0 * s.c0)) * math.sin(2.0 * frame.theta)
            - (0.5 + s.n) * frame.theta)


def psi(frame: TrainFrame, x):
    """Normalized state psi_n(x, t) = R_n exp(i Theta_n)."""
    return amplitude(frame, x) * np.exp(1j * phase(frame, x))


def psi_on_grid(frame: TrainFrame, grid: UniformGrid, norm_tol: float = 1e-6) -> FieldGrid:
    """Vectorized psi over a grid, with the Simpson norm recorded.

    Sets the norm-deficit flag (and warns) when |norm - 1| > norm_tol,
    which indicates the grid does not cover or resolve the state."""
    values = psi(frame, grid.points())
    norm = float(np.real(_simpson_array(np.abs(values) ** 2, grid.step)))
    deficit = abs(norm - 1.0) > norm_tol
    if deficit:
        warnings.warn(
            f"grid norm {norm:.6g} differs from 1 by more than {norm_tol:g}; "
            "the grid is too small or too coarse for this state",
            NormDeficitWarning,
            stacklevel=2,
        )
    return FieldGrid(grid=grid, t=frame.t, values=values, norm=norm, norm_deficit=deficit)


def center_orbit(traj: Trajectory | PolarTrajectory, spec: TrainSpec, t):
    """Center x_c(t) = (b0/c0) rho cos(theta) = (b0/c0) phi1, the orbit of
    a classical oscillator; evaluated at sampled times (linear
    interpolation between samples)."""
    if isinstance(traj, PolarTrajectory):
        phi1 = traj.rho * np.cos(traj.theta)
    else:
        phi1 = traj.phi1
    xc = (spec.b0 / spec.c0) * np.interp(np.asarray(t, dtype=float), traj.t, phi1)
    return float(xc) if xc.ndim == 0 else xc


def overlap(field_a: FieldGrid, field_b: FieldGrid) -> complex:
    """Simpson quadrature of conj(psi_a) psi_b on the shared grid."""
    if field_a.grid != field_b.grid:
        raise GridMismatch("overlap needs identical grids")
    if abs(field_a.t - field_b.t) > 1e-9 * max(1.0, abs(field_a.t), abs(field_b.t)):
        raise GridMismatch(
            f"overlap needs matching times, got {field_a.t!r} and {field_b.t!r}"
        )
    return complex(_simpson_array(np.conj(field_a.values) * field_b.values,
                                  field_a.grid.step))


def _as_polar(traj: Trajectory | PolarTrajectory) -> PolarTrajectory:
    return traj if isinstance(traj, PolarTrajectory) else polar_decompose(traj)


def mean_energy(traj: Trajectory | PolarTrajectory, spec: TrainSpec,
                t: float, grid: UniformGrid) -> float:
    """Average energy E_n(t) = <psi_n| i d/dt |psi_n> = -int R_n^2 dTheta_n/dt dx.

    dTheta_n/dt is evaluated analytically from rho, drho, theta, dtheta
    with ddrho taken from the polar equation of motion
    ddrho = rho dtheta^2 - k rho (no numerical time differencing); the x
    integral is Simpson quadrature on the supplied grid.
    """
    ptraj = _as_polar(traj)
    i = ptraj.grid.index_of(t)
    s = ptraj.state(i)
    k = float(ptraj.params.k(s.t))
    x = grid.points()
    frame = TrainFrame(t=s.t, rho=s.rho, theta=s.theta, drho=s.drho, spec=spec)
    r2 = amplitude(frame, x) ** 2
    # d/dt(drho/(2 rho)) with ddrho = rho dtheta^2 - k rho
    quad = 0.5 * (s.dtheta**2 - k) - 0.5 * s.drho**2 / s.rho**2
    lin = spec.b0 * (s.dtheta * math.cos(s.theta) * s.rho
                     - s.drho * math.sin(s.theta)) / s.rho**2
    const = (spec.b0**2 / (2.0 * spec.c0)) * s.dtheta * math.cos(2.0 * s.theta) \
        - (0.5 + spec.n) * s.dtheta
    theta_t = quad * x * x - lin * x + const
    return float(-np.real(_simpson_array(r2 * theta_t, grid.step)))


def verify_eq4(traj: Trajectory | PolarTrajectory, spec: TrainSpec,
               t_grid: UniformGrid | None = None,
               relative: bool = False) -> dict[str, float]:
    """Max residual of each coefficient ODE of the ansatz,

        i dc/dt = 2 c^2 - k/2,      i db/dt = 2 b c,
        i de/dt = 2 c e - e^3,      i df/dt = b e - e^2 f,
        i (da_n/dt)/a_n = i f df/dt - b^2/2 + c + n e^2,

    with every time derivative taken by central differences on the
    sampled coefficients.  Residuals converge to zero at second order as
    the time grid refines.  ``t_grid`` defaults to the trajectory's own
    grid; a coarser grid must hit trajectory samples exactly.  With
    ``relative=True`` each residual is divided by the largest term
    magnitude in its equation (scale-free cancellation quality).
    """
    ptraj = _as_polar(traj)
    if t_grid is None:
        sub = ptraj.grid
        idx = np.arange(sub.count)
    else:
        sub = t_grid
        idx = np.array([ptraj.grid.index_of(tv) for tv in sub.points()])
    rho = ptraj.rho[idx]
    theta = ptraj.theta[idx]
    drho = ptraj.drho[idx]
    dtheta = ptraj.dtheta[idx]
    t = sub.points()
    k = ptraj.params.k(t)

    b = spec.b0 * np.exp(-1j * theta) / rho
    c = 0.5 * dtheta - 0.5j * drho / rho
    e = math.sqrt(spec.c0) / rho
    f = (spec.b0 / math.sqrt(spec.c0)) * np.cos(theta)
    a = spec.a0 / np.sqrt(rho) * np.exp(
        -1j * ((0.5 + spec.n) * theta
               - (spec.b0**2 / (4.0 * spec.c0)) * np.sin(2.0 * theta)))

    def ddt(vals):
        return central_diff(SampledFunction(sub, vals), order=1).values

    dc, db, de, df, da = ddt(c), ddt(b), ddt(e), ddt(f), ddt(a)
    res = {
        "c": (np.abs(1j * dc - 2.0 * c * c + 0.5 * k),
              (2.0 * c * c, 0.5 * k)),
        "b": (np.abs(1j * db - 2.0 * b * c), (2.0 * b * c,)),
        "e": (np.abs(1j * de - 2.0 * c * e + e**3), (2.0 * c * e, e**3)),
        "f": (np.abs(1j * df - b * e + e * e * f), (b * e, e * e * f)),
        "a": (np.abs(1j * da / a - (1j * f * df - 0.5 * b * b + c + spec.n * e * e)),
              (f * df, 0.5 * b * b, c, spec.n * e * e)),
    }
    out = {}
    for key, (resid, terms) in res.items():
        value = float(np.max(resid))
        if relative:
            scale = max(max(float(np.max(np.abs(np.asarray(term, dtype=complex))))
                            for term in terms), np.finfo(float).tiny)
            value /= scale
        out[key] = value
    return out


def auto_space_grid(ptraj: PolarTrajectory, spec: TrainSpec,
                    count: int | None = None,
                    points_per_wave: float = 16.0) -> UniformGrid:
    """Run-wide grid: span = [min x_c - w, max x_c + w] with
    w = 8 (max rho / sqrt(c0)) sqrt(2n + 1); the factor 8 keeps the
    truncated mass far below quadrature tolerances.

    When ``count`` is omitted, the power-of-two count is chosen so the
    fastest Hermite oscillation of the narrowest visited packet (local
    wavelength 2 pi sigma / sqrt(2n+1), sigma = rho/sqrt(c0)) keeps at
    least ``points_per_wave`` samples — enough for node and maxima
    counting on the emitted data (clamped to [256, 2^20]).
    """
    sc = math.sqrt(spec.c0)
    xc = (spec.b0 / spec.c0) * ptraj.rho * np.cos(ptraj.theta)
    w = 8.0 * (float(np.max(ptraj.rho)) / sc) * math.sqrt(2.0 * spec.n + 1.0)
    lo = float(np.min(xc)) - w
    hi = float(np.max(xc)) + w
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    if count is None:
        sigma_min = float(np.min(ptraj.rho)) / sc
        dx = 2.0 * math.pi * sigma_min / (points_per_wave * math.sqrt(2.0 * spec.n + 1.0))
        count = 1 << max(8, min(20, math.ceil(math.log2(2.0 * half / dx))))
    return build_space_grid(center, half, count)


def count_nodes(frame: TrainFrame, grid: UniformGrid | None = None) -> int:
    """Interior zeros of the signed amplitude R_n (sign changes between
    adjacent samples, values below 1e-12 of the peak ignored).

    Without an explicit grid, a dedicated xi grid dense enough for the
    n-th Hermite function (>= 16 points per oscillation) is used, so the
    count is exactly n for any healthy frame."""
    n = frame.spec.n
    if grid is None:
        m = math.sqrt(2.0 * n + 1.0) + 4.0
        per_osc = 16.0 * math.sqrt(2.0 * n + 1.0)
        npts = 1 << max(6, math.ceil(math.log2(per_osc * 2.0 * m / (2.0 * math.pi))))
        vals = hermite_scaled(n, np.linspace(-m, m, npts + 1))
    else:
        vals = amplitude(frame, grid.points())
    thr = 1e-12 * float(np.max(np.abs(vals)))
    live = vals[np.abs(vals) > thr]
    return int(np.count_nonzero(np.signbit(live[1:]) != np.signbit(live[:-1])))


def count_density_maxima(field: FieldGrid) -> int:
    """Strict interior local maxima of |psi|^2, ignoring tail ripple below
    1e-12 of the peak."""
    d = field.density()
    thr = 1e-12 * float(np.max(d))
    inner = d[1:-1]
    hits = (inner > d[:-2]) & (inner > d[2:]) & (inner > thr)
    return int(np.count_nonzero(hits))
