"""Classical core: the driven-oscillator (Mathieu) equation and its two
solution routes.

The equation of motion is  phi'' = -k(t) phi  with  k(t) = U^2 + V cos 2t
(time in units 2/omega, m = hbar = 1).  Route one iterates the equivalent
Volterra integral equations (Picard iteration, quadrature by cumulative
Simpson); route two integrates the ODE directly with fixed-step RK4.  The
polar decomposition phi = rho * exp(i*theta) and the first integral
c0 = rho^2 * dtheta = phi1*dphi2 - phi2*dphi1 feed the quantum
construction in ``trains``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BranchJump,
    EmptyGrid,
    GridMismatch,
    NonZeroStart,
    OriginCrossing,
    StabilityRegionWarning,
)
from .numerics import UniformGrid, central_diff, cumulative_simpson, rk4_integrate
from .numerics import SampledFunction


@dataclass(frozen=True)
class TrapParameters:
    """Dimensionless drive k(t) = U^2 + V cos 2t.

    Normalization conventions (all fixed, never stored): m = hbar = 1,
    time in units 2/omega, length in units of the oscillator length
    l_h = sqrt(hbar/(m*omega)).

    ``u2`` is the DC part (the square of U); ``v`` the drive amplitude.
    Emits StabilityRegionWarning when the first-stability heuristic
    (U^2 < 1, V < 1, V <~ U^2) is violated -- except at V = 0, where the
    motion is a plain oscillator and bounded for every U.
    """

    u2: float
    v: float

    def __post_init__(self):
        if not (self.u2 > 0):
            raise ValueError(f"u2 must be strictly positive, got {self.u2}")
        if self.v != 0 and not (self.u2 < 1 and self.v < 1 and self.v <= self.u2):
            warnings.warn(
                f"trap parameters u2={self.u2}, v={self.v} are outside the "
                "first-stability heuristic (u2 < 1, v < 1, v <= u2); the "
                "classical motion may be unbounded",
                StabilityRegionWarning,
                stacklevel=2,
            )

    @property
    def u(self) -> float:
        return math.sqrt(self.u2)

    def k(self, t):
        """Spring constant at time t (scalar or array)."""
        return self.u2 + self.v * np.cos(2.0 * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class ClassicalInit:
    """Constants (A, B, alpha, beta) of the iteration scheme; they define
    the initial data through the V = 0 form phi1 = A cos(U t + alpha),
    phi2 = B cos(U t + beta) evaluated at t = 0."""

    a: float
    b: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class ClassicalState:
    """One sample of the complex classical solution, split into real and
    imaginary components and their time derivatives."""

    t: float
    phi1: float
    phi2: float
    dphi1: float
    dphi2: float


@dataclass(frozen=True)
class PolarState:
    """One sample of the polar form phi = rho*exp(i*theta); theta is the
    unwrapped (continuous) branch."""

    t: float
    rho: float
    theta: float
    drho: float
    dtheta: float


def first_integral(state: ClassicalState) -> float:
    """Conserved Wronskian-like combination phi1*dphi2 - phi2*dphi1."""
    return state.phi1 * state.dphi2 - state.phi2 * state.dphi1


def _wronskian(phi1, phi2, dphi1, dphi2):
    return phi1 * dphi2 - phi2 * dphi1


@dataclass(frozen=True)
class Trajectory:
    """Sampled classical solution on a uniform time grid.

    ``c0`` is the first integral evaluated at t = 0; ``max_c0_drift`` the
    largest relative deviation of the Wronskian from c0 along the samples
    (small for exact solutions, O(V^(k+1)) for a k-th Picard iterate).
    """

    params: TrapParameters
    init: ClassicalInit
    grid: UniformGrid
    phi1: np.ndarray
    phi2: np.ndarray
    dphi1: np.ndarray
    dphi2: np.ndarray
    c0: float = field(init=False)
    max_c0_drift: float = field(init=False)

    def __post_init__(self):
        w = _wronskian(self.phi1, self.phi2, self.dphi1, self.dphi2)
        c0 = float(w[0])
        scale = max(abs(c0), np.finfo(float).tiny)
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "max_c0_drift", float(np.max(np.abs(w - c0)) / scale))

    @property
    def t(self) -> np.ndarray:
        return self.grid.points()

    def state(self, i: int) -> ClassicalState:
        return ClassicalState(
            t=float(self.grid.start + i * self.grid.step),
            phi1=float(self.phi1[i]),
            phi2=float(self.phi2[i]),
            dphi1=float(self.dphi1[i]),
            dphi2=float(self.dphi2[i]),
        )

    @property
    def samples(self) -> list[ClassicalState]:
        return [self.state(i) for i in range(self.grid.count)]


@dataclass(frozen=True)
class PolarTrajectory:
    """Polar decomposition of a Trajectory on the same grid."""

    params: TrapParameters
    grid: UniformGrid
    rho: np.ndarray
    theta: np.ndarray
    drho: np.ndarray
    dtheta: np.ndarray
    c0: float
    max_c0_drift: float

    @property
    def t(self) -> np.ndarray:
        return self.grid.points()

    def state(self, i: int) -> PolarState:
        return PolarState(
            t=float(self.grid.start + i * self.grid.step),
            rho=float(self.rho[i]),
            theta=float(self.theta[i]),
            drho=float(self.drho[i]),
            dtheta=float(self.dtheta[i]),
        )

    @property
    def states(self) -> list[PolarState]:
        return [self.state(i) for i in range(self.grid.count)]


def _unperturbed_arrays(init: ClassicalInit, params: TrapParameters, t):
    u = params.u
    t = np.asarray(t, dtype=float)
    phi1 = init.a * np.cos(u * t + init.alpha)
    phi2 = init.b * np.cos(u * t + init.beta)
    dphi1 = -init.a * u * np.sin(u * t + init.alpha)
    dphi2 = -init.b * u * np.sin(u * t + init.beta)
    return phi1, phi2, dphi1, dphi2


def unperturbed_solution(init: ClassicalInit, params: TrapParameters, t: float) -> ClassicalState:
    """V = 0 solution phi1 = A cos(Ut+alpha), phi2 = B cos(Ut+beta) with
    exact derivatives; also supplies the t = 0 initial data for both
    solvers."""
    phi1, phi2, dphi1, dphi2 = _unperturbed_arrays(init, params, t)
    return ClassicalState(t=float(t), phi1=float(phi1), phi2=float(phi2),
                          dphi1=float(dphi1), dphi2=float(dphi2))


def _as_time_grid(t_grid) -> UniformGrid:
    if isinstance(t_grid, UniformGrid):
        grid = t_grid
    else:
        t = np.asarray(t_grid, dtype=float)
        if t.size == 0:
            raise EmptyGrid("time grid has no points")
        if t.size == 1:
            raise EmptyGrid("time grid needs at least two points")
        steps = np.diff(t)
        h = steps[0]
        if not np.all(np.abs(steps - h) <= 1e-12 * max(1.0, abs(h))):
            raise GridMismatch("time grid must be uniformly spaced")
        grid = UniformGrid(start=float(t[0]), step=float(h), count=int(t.size))
    if grid.start != 0.0:
        raise NonZeroStart(
            f"the integral equations take their lower limit at t = 0; grid "
            f"starts at {grid.start}"
        )
    return grid


def picard_iterate(params: TrapParameters, init: ClassicalInit,
                   iterations: int, t_grid) -> Trajectory:
    """Iterate the Volterra integral form of the oscillator equation.

    Iteration zero is the unperturbed solution.  Iterate k+1 substitutes
    iterate k into

        phi(t) = h(t) - (V/U) [ sin(Ut) C(t) - cos(Ut) S(t) ],
        C(t) = int_0^t cos(Us) cos(2s) phi_k(s) ds,
        S(t) = int_0^t sin(Us) cos(2s) phi_k(s) ds,

    with h the unperturbed term; both running integrals are evaluated by
    cumulative Simpson quadrature on the supplied uniform grid.  The sign
    of the V/U term is fixed by variation of parameters: substituting the
    form back into phi'' + U^2 phi = -V cos(2t) phi requires the minus.
    Derivatives are obtained analytically, never by differencing: the
    integrals' t-derivatives cancel pairwise, leaving

        dphi(t) = h'(t) - V [ cos(Ut) C(t) + sin(Ut) S(t) ].
    """
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    grid = _as_time_grid(t_grid)
    t = grid.points()
    h = grid.step
    u, v = params.u, params.v
    cosu = np.cos(u * t)
    sinu = np.sin(u * t)
    cos2 = np.cos(2.0 * t)

    base1, base2, dbase1, dbase2 = _unperturbed_arrays(init, params, t)
    out = []
    for base, dbase in ((base1, dbase1), (base2, dbase2)):
        phi = base.copy()
        cint = np.zeros_like(t)
        sint = np.zeros_like(t)
        for _ in range(iterations):
            g = cos2 * phi
            cint = cumulative_simpson(cosu * g, h)
            sint = cumulative_simpson(sinu * g, h)
            phi = base - (v / u) * (sinu * cint - cosu * sint)
        dphi = dbase - v * (cosu * cint + sinu * sint)
        out.append((phi, dphi))
    (phi1, dphi1), (phi2, dphi2) = out
    return Trajectory(params=params, init=init, grid=grid,
                      phi1=phi1, phi2=phi2, dphi1=dphi1, dphi2=dphi2)


def eq14_reference(t):
    """Closed-form single-pass iterate for the benchmark drive
    U = 0.5, V = 0.05, A = B = 1, alpha = 0, beta = -pi/2.

    Evaluating the two integrals of one Picard pass in closed form (plain
    trigonometric integration, re-derivable with any CAS) gives

        phi1 = cos(t/2) + (V/U) [ cos(3t/2)/8 + cos(5t/2)/24 - cos(t/2)/6 ],
        phi2 = sin(t/2) + (V/U) [ sin(t/2)/6  - sin(3t/2)/8  + sin(5t/2)/24 ].

    Exists purely as an independent test fixture for ``picard_iterate``.
    Returns the pair (phi1, phi2), vectorized over t.
    """
    t = np.asarray(t, dtype=float)
    c = 0.05 / 0.5
    phi1 = (np.cos(0.5 * t)
            + c * (np.cos(1.5 * t) / 8.0 + np.cos(2.5 * t) / 24.0
                   - np.cos(0.5 * t) / 6.0))
    phi2 = (np.sin(0.5 * t)
            + c * (np.sin(0.5 * t) / 6.0 - np.sin(1.5 * t) / 8.0
                   + np.sin(2.5 * t) / 24.0))
    if phi1.ndim == 0:
        return float(phi1), float(phi2)
    return phi1, phi2


def solve_classical(params: TrapParameters, init: ClassicalInit,
                    t_span: tuple[float, float], step: float) -> Trajectory:
    """Integrate phi'' = -(U^2 + V cos 2t) phi componentwise with fixed-step
    RK4.

    Initial conditions are taken from ``unperturbed_solution`` at t = 0 so
    the Picard and RK4 routes share initial data exactly.  The step is
    shrunk (never grown) to divide the span evenly, so the final sample
    lands exactly on t_span[1].
    """
    t0, t1 = t_span
    if t0 != 0.0:
        raise NonZeroStart(f"runs must start at t = 0, got {t0}")
    if not (t1 > 0 and step > 0):
        raise ValueError("need t_span[1] > 0 and step > 0")
    n_steps = max(1, math.ceil(t1 / step - 1e-12))
    grid = UniformGrid(start=0.0, step=t1 / n_steps, count=n_steps + 1)

    s0 = unperturbed_solution(init, params, 0.0)
    y0 = [s0.phi1, s0.dphi1, s0.phi2, s0.dphi2]
    u2, v = params.u2, params.v

    def rhs(t, y):
        kk = u2 + v * math.cos(2.0 * t)
        return np.array([y[1], -kk * y[0], y[3], -kk * y[2]])

    ys = rk4_integrate(rhs, y0, grid)
    return Trajectory(params=params, init=init, grid=grid,
                      phi1=ys[:, 0], phi2=ys[:, 2],
                      dphi1=ys[:, 1], dphi2=ys[:, 3])


def polar_decompose(traj: Trajectory) -> PolarTrajectory:
    """Polar form rho, theta (unwrapped), drho, dtheta of a trajectory.

    theta comes from the two-argument arctangent per sample, continued to
    the nearest branch; drho and dtheta are algebraic in the stored
    derivatives (no differencing).  Raises OriginCrossing when rho = 0 at
    a sample and BranchJump when the exact phase velocity advances the
    phase by >= pi between adjacent samples (the grid cannot represent
    the branch; silent unwrapping would alias it).
    """
    rho = np.hypot(traj.phi1, traj.phi2)
    if np.any(rho == 0.0):
        i = int(np.argmin(rho))
        raise OriginCrossing(f"rho = 0 at sample {i} (t = {traj.grid.start + i * traj.grid.step})")
    dtheta = _wronskian(traj.phi1, traj.phi2, traj.dphi1, traj.dphi2) / rho**2
    if np.max(np.abs(dtheta)) * traj.grid.step >= np.pi:
        raise BranchJump(
            "adjacent samples advance the phase by >= pi; refine the time grid"
        )
    drho = (traj.phi1 * traj.dphi1 + traj.phi2 * traj.dphi2) / rho
    theta = np.unwrap(np.arctan2(traj.phi2, traj.phi1))
    return PolarTrajectory(params=traj.params, grid=traj.grid, rho=rho,
                           theta=theta, drho=drho, dtheta=dtheta,
                           c0=traj.c0, max_c0_drift=traj.max_c0_drift)


def riccati_c(p: PolarState) -> complex:
    """Complex width/phase variable c = dtheta/2 - i*drho/(2*rho)."""
    if not (p.rho > 0):
        raise OriginCrossing(f"rho must be positive, got {p.rho}")
    return 0.5 * p.dtheta - 0.5j * p.drho / p.rho


def polar_ode_residuals(ptraj: PolarTrajectory, params: TrapParameters,
                        relative: bool = False) -> dict[str, float]:
    """Max residuals of the polar equations of motion,

        theta'' + 2 theta' rho' / rho = 0,
        rho''  - rho theta'^2 + k(t) rho = 0,

    with the second derivatives taken by central differences on the
    sampled theta and rho (first derivatives are the stored algebraic
    ones).  Converges to zero at second order as the grid refines.

    With ``relative=True`` each residual is divided by the largest term
    magnitude appearing in its equation, giving a scale-free number that
    measures cancellation quality across regimes of any stiffness.
    """
    t = ptraj.t
    theta_dd = central_diff(SampledFunction(ptraj.grid, ptraj.theta), order=2).values
    rho_dd = central_diff(SampledFunction(ptraj.grid, ptraj.rho), order=2).values
    drive = ptraj.dtheta**2 * ptraj.rho
    restore = params.k(t) * ptraj.rho
    r_theta = theta_dd + 2.0 * ptraj.dtheta * ptraj.drho / ptraj.rho
    r_rho = rho_dd - drive + restore
    out = {"theta": float(np.max(np.abs(r_theta))),
           "rho": float(np.max(np.abs(r_rho)))}
    if relative:
        # dtheta^2 floors the theta scale: its terms cancel identically in
        # the static limit, where dividing by them would compare noise to
        # noise (both carry the dimension of theta'')
        scale_theta = max(float(np.max(np.abs(theta_dd))),
                          float(np.max(np.abs(2.0 * ptraj.dtheta * ptraj.drho / ptraj.rho))),
                          float(np.max(ptraj.dtheta**2)),
                          np.finfo(float).tiny)
        scale_rho = max(float(np.max(np.abs(drive))),
                        float(np.max(np.abs(restore))),
                        np.finfo(float).tiny)
        out = {"theta": out["theta"] / scale_theta, "rho": out["rho"] / scale_rho}
    return out


def mathieu_residual(traj: Trajectory, params: TrapParameters,
                     relative: bool = False) -> float:
    """Sup norm of phi'' + k(t) phi over both components, second derivative
    by central differences.  For a k-th Picard iterate this is
    O(V^(k+1)) plus quadrature and differencing error.  With
    ``relative=True`` the residual is divided by max |k(t) phi|."""
    t = traj.t
    k = params.k(t)
    worst = 0.0
    for comp in (traj.phi1, traj.phi2):
        dd = central_diff(SampledFunction(traj.grid, comp), order=2).values
        resid = float(np.max(np.abs(dd + k * comp)))
        if relative:
            resid /= max(float(np.max(np.abs(k * comp))), np.finfo(float).tiny)
        worst = max(worst, resid)
    return worst
