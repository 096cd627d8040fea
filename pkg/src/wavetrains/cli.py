"""Command line front end.

Commands
--------
classical       time series of the classical solution and its polar form
snapshot        wavefunction samples at requested times
series          center orbit, envelope width, and mean energy over time
verify          invariant battery with a JSON pass/fail report
oracle-compare  split-step propagation vs the closed-form states

Exit status: 0 success, 1 verification/comparison failure, 2 usage or
configuration error.  Output is deterministic: re-running a command with
the same configuration produces bit-identical bytes.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import warnings
from fractions import Fraction

import numpy as np

from . import __version__
from .config import (
    RunConfig,
    PRESET_NAMES,
    load_config_file,
    parse_pi_times,
    preset,
    render_csv,
    render_json,
    to_dict,
    validate,
)
from .errors import ConfigError, UnknownPreset, WavetrainError
from .mathieu import (
    ClassicalInit,
    TrapParameters,
    mathieu_residual,
    picard_iterate,
    polar_decompose,
    polar_ode_residuals,
    solve_classical,
)
from .numerics import UniformGrid, build_space_grid
from .splitstep import (
    PropagatorConfig,
    l2_density_distance,
    propagation_grid,
    renormalized,
    split_step_evolve,
)
from .trains import (
    TrainSpec,
    auto_space_grid,
    center_orbit,
    count_density_maxima,
    count_nodes,
    hermite_table,
    mean_energy,
    overlap,
    psi_on_grid,
    train_frame,
    verify_eq4,
)
from .numerics import _simpson_array


# --------------------------------------------------------------------------
# argument parsing and config resolution

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavetrains",
        description="Exact wave-packet trains of the periodically driven "
                    "harmonic trap: data files and verification reports.",
    )
    parser.add_argument("--version", action="version", version=f"wavetrains {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, t_final: bool = False):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--preset", choices=PRESET_NAMES,
                         help="named parameter set to start from")
        src.add_argument("--config", metavar="FILE",
                         help="JSON config file mirroring RunConfig (strict keys)")
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), dest="fmt",
                       help="output format (default csv; verify is always json)")
        p.add_argument("--n", type=int, help="quantum number of the train")
        p.add_argument("--b0", type=float, help="center constant b0")
        p.add_argument("--declared-c0", type=float, dest="declared_c0",
                       help="rescale b0 by (computed c0)/(declared c0) to match "
                            "a convention that normalizes the first integral")
        p.add_argument("--iterations", type=int, help="Picard iterations")
        p.add_argument("--rk4-step", type=float, dest="rk4_step",
                       help="classical integrator step")
        p.add_argument("--grid-points", type=int, dest="grid_points",
                       help="spatial grid point count (power of two)")
        p.add_argument("--half-width", type=float, dest="half_width",
                       help="explicit spatial half-width (switches grid policy "
                            "to explicit; needs --grid-points)")
        p.add_argument("--center", type=float, help="explicit spatial grid center")
        p.add_argument("--times", metavar="LIST",
                       help="comma-separated times, pi-units allowed: 0,0.5pi,2pi")
        if t_final:
            p.add_argument("--t-final", dest="t_final", metavar="T",
                           help="time horizon (pi-units allowed, e.g. 4pi)")
            p.add_argument("--samples", type=int, help="number of output samples")

    common(sub.add_parser("classical", help="classical trajectory time series"),
           t_final=True)
    common(sub.add_parser("snapshot", help="wavefunction samples at --times"))
    common(sub.add_parser("series", help="center orbit, width, energy vs time"),
           t_final=True)
    common(sub.add_parser("verify", help="run the invariant battery"), t_final=True)
    oc = sub.add_parser("oracle-compare",
                        help="split-step propagation vs closed-form states")
    common(oc)
    oc.add_argument("--dt", metavar="STEP",
                    help="propagation step (pi-units allowed; default auto)")
    oc.add_argument("--tolerance", type=float, default=1e-3,
                    help="max allowed L2 density distance (default 1e-3)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults -> preset or config file -> individual flag overrides."""
    if getattr(args, "config", None):
        cfg = load_config_file(args.config)
    elif getattr(args, "preset", None):
        cfg = preset(args.preset)
    else:
        cfg = RunConfig()

    train = {}
    if args.n is not None:
        train["n"] = args.n
    if args.b0 is not None:
        train["b0"] = args.b0
    if args.declared_c0 is not None:
        train["declared_c0"] = args.declared_c0
    if train:
        cfg = dataclasses.replace(cfg, train=dataclasses.replace(cfg.train, **train))

    solver = {}
    if args.iterations is not None:
        solver["iterations"] = args.iterations
    if args.rk4_step is not None:
        solver["rk4_step"] = args.rk4_step
    if solver:
        cfg = dataclasses.replace(cfg, solver=dataclasses.replace(cfg.solver, **solver))

    time_over = {}
    if args.times is not None:
        time_over["times"] = parse_pi_times(args.times)
    if getattr(args, "t_final", None) is not None:
        values = parse_pi_times(args.t_final)
        if len(values) != 1:
            raise ConfigError(f"--t-final wants one value, got {args.t_final!r}")
        time_over["t_final"] = values[0]
    if getattr(args, "samples", None) is not None:
        time_over["samples"] = args.samples
    if time_over:
        cfg = dataclasses.replace(cfg, time=dataclasses.replace(cfg.time, **time_over))

    space = {}
    if args.grid_points is not None:
        space["grid_points"] = args.grid_points
    if args.half_width is not None:
        space["half_width"] = args.half_width
        space["policy"] = "explicit"
    if args.center is not None:
        space["center"] = args.center
    if space:
        cfg = dataclasses.replace(cfg, space=dataclasses.replace(cfg.space, **space))

    output = {}
    if args.fmt is not None:
        output["format"] = args.fmt
    if args.out is not None:
        output["path"] = args.out
    if output:
        cfg = dataclasses.replace(cfg, output=dataclasses.replace(cfg.output, **output))

    return validate(cfg)


# --------------------------------------------------------------------------
# shared pipeline pieces

def _problem(cfg: RunConfig) -> tuple[TrapParameters, ClassicalInit]:
    params = TrapParameters(cfg.params.u2, cfg.params.v)
    init = ClassicalInit(cfg.init.a, cfg.init.b, cfg.init.alpha, cfg.init.beta)
    return params, init


def _effective_spec(cfg: RunConfig, c0: float) -> TrainSpec:
    b0 = cfg.train.b0
    if cfg.train.declared_c0 is not None:
        b0 *= c0 / cfg.train.declared_c0
    return TrainSpec(n=cfg.train.n, b0=b0, c0=c0)


def _commensurate_count(t_final: float, times, step: float) -> int:
    """Step count n so the grid t_final/n hits every requested time exactly
    whenever times/t_final are small rationals (they are for pi-unit
    inputs); otherwise the plain ceiling count."""
    n = max(1, math.ceil(t_final / step - 1e-12))
    denom = 1
    for t in times:
        if t == 0.0 or t == t_final:
            continue
        frac = Fraction(t / t_final).limit_denominator(4096)
        if abs(float(frac) - t / t_final) > 1e-12:
            return n
        denom = math.lcm(denom, frac.denominator)
    return denom * math.ceil(n / denom)


def _solve_polar(cfg: RunConfig, t_final: float, times=()):
    params, init = _problem(cfg)
    count = _commensurate_count(t_final, times, cfg.solver.rk4_step)
    traj = solve_classical(params, init, (0.0, t_final), t_final / count)
    return params, init, traj, polar_decompose(traj)


def _sample_indices(count: int, samples: int) -> np.ndarray:
    samples = min(samples, count)
    return np.unique(np.round(np.linspace(0, count - 1, samples)).astype(int))


def _space_grid(cfg: RunConfig, ptraj, spec: TrainSpec) -> UniformGrid:
    if cfg.space.policy == "explicit":
        return build_space_grid(cfg.space.center, cfg.space.half_width,
                                cfg.space.grid_points)
    return auto_space_grid(ptraj, spec, count=cfg.space.grid_points)


def _meta_common(c0: float) -> list[tuple[str, str]]:
    return [("derived.c0", f"{c0:.17g}"),
            ("tool.name", "wavetrains"),
            ("tool.version", __version__)]


def _render(cfg: RunConfig, columns, rows, meta_pairs) -> str:
    if cfg.output.format == "json":
        return render_json(cfg, columns, rows, meta=dict(meta_pairs))
    return render_csv(cfg, columns, rows, meta=meta_pairs)


# --------------------------------------------------------------------------
# commands

def _first_integral_series(traj) -> np.ndarray:
    return traj.phi1 * traj.dphi2 - traj.phi2 * traj.dphi1


def run_classical(cfg: RunConfig) -> str:
    """t, phi1, phi2, rho, theta, drho, dtheta, c0_residual per sample."""
    params, init, traj, ptraj = _solve_polar(cfg, cfg.time.t_final)
    idx = _sample_indices(traj.grid.count, cfg.time.samples)
    wron = _first_integral_series(traj)
    scale = max(abs(ptraj.c0), np.finfo(float).tiny)
    rows = np.column_stack([
        traj.t[idx], traj.phi1[idx], traj.phi2[idx],
        ptraj.rho[idx], ptraj.theta[idx], ptraj.drho[idx], ptraj.dtheta[idx],
        (wron[idx] - ptraj.c0) / scale,
    ])
    columns = ["t", "phi1", "phi2", "rho", "theta", "drho", "dtheta", "c0_residual"]
    return _render(cfg, columns, rows, _meta_common(ptraj.c0))


def run_snapshot(cfg: RunConfig) -> str:
    """Long-format (t, x, density, re_psi, im_psi) rows for each requested
    time, with per-time norm, node count, maxima count, and center in the
    header metadata."""
    times = cfg.time.times
    if not times:
        raise ConfigError("snapshot needs at least one entry in times")
    t_final = max(max(times), cfg.solver.rk4_step)
    params, init, traj, ptraj = _solve_polar(cfg, t_final, times)
    spec = _effective_spec(cfg, ptraj.c0)
    grid = _space_grid(cfg, ptraj, spec)
    x = grid.points()

    meta = _meta_common(ptraj.c0)
    meta.append(("grid.start", f"{grid.start:.17g}"))
    meta.append(("grid.step", f"{grid.step:.17g}"))
    meta.append(("grid.count", str(grid.count)))
    blocks = []
    for j, t_req in enumerate(times):
        i = int(round(t_req / traj.grid.step))
        i = min(max(i, 0), traj.grid.count - 1)
        frame = train_frame(ptraj, spec, ptraj.grid.start + i * ptraj.grid.step)
        field = psi_on_grid(frame, grid)
        dens = field.density()
        blocks.append(np.column_stack([
            np.full(grid.count, field.t), x, dens,
            np.real(field.values), np.imag(field.values),
        ]))
        meta.append((f"snapshot.{j}.t", f"{field.t:.17g}"))
        meta.append((f"snapshot.{j}.norm", f"{field.norm:.17g}"))
        meta.append((f"snapshot.{j}.nodes", str(count_nodes(frame))))
        meta.append((f"snapshot.{j}.maxima", str(count_density_maxima(field))))
        meta.append((f"snapshot.{j}.xc",
                     f"{center_orbit(ptraj, spec, field.t):.17g}"))
    rows = np.vstack(blocks)
    columns = ["t", "x", "density", "re_psi", "im_psi"]
    return _render(cfg, columns, rows, meta)


def run_series(cfg: RunConfig) -> str:
    """t, x_c, rho, E_n per time sample."""
    params, init, traj, ptraj = _solve_polar(cfg, cfg.time.t_final)
    spec = _effective_spec(cfg, ptraj.c0)
    grid = _space_grid(cfg, ptraj, spec)
    idx = _sample_indices(traj.grid.count, cfg.time.samples)
    t = traj.t[idx]
    xc = (spec.b0 / spec.c0) * traj.phi1[idx]
    energy = np.array([mean_energy(ptraj, spec, float(tv), grid) for tv in t])
    rows = np.column_stack([t, xc, ptraj.rho[idx], energy])
    return _render(cfg, ["t", "xc", "rho", "energy"], rows, _meta_common(ptraj.c0))


def _auto_dt(params: TrapParameters, grid: UniformGrid, t_final: float,
             times) -> float:
    """Default propagation step: fine enough for ~1e-4 splitting error at
    figure scale (t_final/2048 per pi of horizon) and 90% of the aliasing
    cap, rounded down so every requested time is a step multiple."""
    edge = max(abs(grid.start), abs(grid.stop - grid.step))
    k_max = params.u2 + abs(params.v)
    cap = 0.9 * math.pi / (k_max * edge * edge)
    target = min(math.pi / 2048.0, cap)
    count = _commensurate_count(t_final, times, target)
    return t_final / count


def run_oracle_compare(cfg: RunConfig, dt: float | None = None,
                       tolerance: float = 1e-3) -> tuple[str, bool]:
    """Propagate the closed-form initial state with the split-step scheme
    and compare densities at the requested times.

    Emits t, density_distance, fidelity per requested time; fails (exit 1)
    when any distance exceeds the tolerance."""
    times = sorted(set(cfg.time.times))
    if not times or max(times) <= 0:
        raise ConfigError("oracle-compare needs at least one positive time")
    t_final = max(times)
    params, init, traj, ptraj = _solve_polar(cfg, t_final, times)
    spec = _effective_spec(cfg, ptraj.c0)
    if cfg.space.policy == "explicit":
        grid = build_space_grid(cfg.space.center, cfg.space.half_width,
                                cfg.space.grid_points)
    else:
        grid = propagation_grid(ptraj, spec,
                                min_count=cfg.space.grid_points or 1024)
    if dt is None:
        dt = _auto_dt(params, grid, t_final, times)
    psi0 = renormalized(psi_on_grid(train_frame(ptraj, spec, 0.0), grid))
    propagated = split_step_evolve(psi0, params, PropagatorConfig(grid, dt),
                                   t_final, record_times=list(times))
    rows = []
    worst = 0.0
    for t_req, field in zip(times, propagated):
        i = ptraj.grid.index_of(t_req)
        frame = train_frame(ptraj, spec, ptraj.grid.start + i * ptraj.grid.step)
        exact = psi_on_grid(frame, grid)
        dist = l2_density_distance(field, exact)
        fid = abs(overlap(exact, field))
        worst = max(worst, dist)
        rows.append([t_req, dist, fid])
    meta = _meta_common(ptraj.c0)
    meta.append(("propagation.dt", f"{dt:.17g}"))
    meta.append(("propagation.tolerance", f"{tolerance:.17g}"))
    meta.append(("propagation.grid_count", str(grid.count)))
    meta.append(("propagation.max_distance", f"{worst:.17g}"))
    text = _render(cfg, ["t", "density_distance", "fidelity"], rows, meta)
    return text, worst <= tolerance


# --------------------------------------------------------------------------
# verify battery

def _battery(cfg: RunConfig) -> dict:
    """All invariant checks for the configured run; see the README for the
    tolerance rationale.  Residual checks are scale-relative so one
    tolerance covers both the weakly driven and the strongly squeezed
    regimes; the time step is refined until the phase advances at most
    0.02 rad per sample."""
    checks: list[dict] = []

    def check(name: str, value: float, tolerance: float):
        checks.append({
            "name": name,
            "value": float(value),
            "tolerance": float(tolerance),
            "passed": bool(value <= tolerance),
        })

    t_final = cfg.time.t_final
    horizon = min(0.5 * math.pi, t_final)
    params, init, traj, ptraj = _solve_polar(cfg, t_final, times=(horizon,))
    spec = _effective_spec(cfg, ptraj.c0)

    # classical conservation
    check("first-integral-drift", ptraj.max_c0_drift, 1e-8)

    # residuals on a phase-resolved trajectory: the fastest coefficient
    # phase is the a_n one, rotating at up to
    # max|dtheta| (1/2 + n + b0^2/(2 c0)); finite differencing needs the
    # advance per step well below a radian
    omega = float(np.max(np.abs(ptraj.dtheta))) \
        * (0.5 + spec.n + spec.b0**2 / (2.0 * spec.c0))
    step_r = min(cfg.solver.rk4_step, 0.015 / omega)
    if step_r < traj.grid.step:
        traj_r = solve_classical(params, init, (0.0, t_final), step_r)
        ptraj_r = polar_decompose(traj_r)
    else:
        traj_r, ptraj_r = traj, ptraj
    check("mathieu-residual", mathieu_residual(traj_r, params, relative=True), 1e-4)
    polar_res = polar_ode_residuals(ptraj_r, params, relative=True)
    check("polar-theta-residual", polar_res["theta"], 1e-4)
    check("polar-rho-residual", polar_res["rho"], 1e-4)
    eq4 = verify_eq4(ptraj_r, spec, relative=True)
    for key in ("c", "b", "e", "f", "a"):
        check(f"coeff-{key}-residual", eq4[key], 1e-4)

    # Picard vs RK4 on a shared grid
    pic_grid = UniformGrid(0.0, t_final / 8192, 8193)
    pic = picard_iterate(params, init, cfg.solver.iterations, pic_grid)
    rk = solve_classical(params, init, (0.0, t_final), pic_grid.step)
    sup = max(float(np.max(np.abs(pic.phi1 - rk.phi1))),
              float(np.max(np.abs(pic.phi2 - rk.phi2))))
    amp = max(float(np.max(np.abs(rk.phi1))), float(np.max(np.abs(rk.phi2))))
    check("picard-vs-rk4", sup, 1e-6 * (1.0 + amp))

    # quantum-state checks on >= 10 times
    n_hi = max(spec.n, 8)
    grid_spec = TrainSpec(n=n_hi, b0=spec.b0, c0=spec.c0)
    grid = _space_grid(cfg, ptraj, grid_spec)
    n_times = 11
    t_idx = _sample_indices(ptraj.grid.count, n_times)
    t_checks = ptraj.t[t_idx]

    worst_norm = 0.0
    worst_nodes = 0
    for tv in t_checks:
        frame = train_frame(ptraj, spec, float(tv))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            field = psi_on_grid(frame, grid)
        worst_norm = max(worst_norm, abs(field.norm - 1.0))
        worst_nodes = max(worst_nodes, abs(count_nodes(frame) - spec.n))
    check("normalization", worst_norm, 1e-6)
    check("node-count", worst_nodes, 0)

    x = grid.points()
    worst_cross = 0.0
    for tv in t_checks:
        i = ptraj.grid.index_of(float(tv))
        s = ptraj.state(i)
        table = hermite_table(min(n_hi, 8), math.sqrt(spec.c0) / s.rho * x
                              - spec.b0 / math.sqrt(spec.c0) * math.cos(s.theta))
        # Theta_n - Theta_m = -(n - m) theta is x-independent, so
        # |<m|n>| = |int R_m R_n dx| = (sqrt(c0)/rho) |int h_m h_n dx|
        weight = math.sqrt(spec.c0) / s.rho
        for m in range(table.shape[0]):
            for n2 in range(m + 1, table.shape[0]):
                val = abs(float(_simpson_array(table[m] * table[n2], grid.step)) * weight)
                worst_cross = max(worst_cross, val)
    check("orthogonality", worst_cross, 1e-6)

    # energy affinity: differences E_{n+1} - E_n are n-independent
    e_idx = _sample_indices(ptraj.grid.count, 10)
    worst_aff = 0.0
    for tv in ptraj.t[e_idx]:
        energies = [mean_energy(ptraj, TrainSpec(n=m, b0=spec.b0, c0=spec.c0),
                                float(tv), grid) for m in range(8)]
        diffs = np.diff(energies)
        ref = diffs[0]
        worst_aff = max(worst_aff, float(np.max(np.abs(diffs - ref)) / abs(ref)))
    check("energy-affinity", worst_aff, 1e-6)

    # analytic states against the independent PDE propagator
    pgrid = propagation_grid(ptraj, spec, min_count=1024)
    dt = _auto_dt(params, pgrid, horizon, (horizon,))
    psi0 = renormalized(psi_on_grid(train_frame(ptraj, spec, 0.0), pgrid))
    evolved = split_step_evolve(psi0, params, PropagatorConfig(pgrid, dt), horizon)[0]
    i = ptraj.grid.index_of(horizon)
    frame_h = train_frame(ptraj, spec, ptraj.grid.start + i * ptraj.grid.step)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        exact_h = psi_on_grid(frame_h, pgrid)
    check("pde-density-distance", l2_density_distance(evolved, exact_h), 1e-3)

    passed = all(c["passed"] for c in checks)
    return {
        "config": to_dict(cfg),
        "derived": {"c0": ptraj.c0, "tool": "wavetrains", "version": __version__},
        "checks": checks,
        "passed": passed,
    }


def run_verify(cfg: RunConfig) -> tuple[str, bool]:
    """JSON report of the invariant battery; second element is overall pass."""
    report = _battery(cfg)
    return json.dumps(report, sort_keys=True, indent=2) + "\n", report["passed"]


# --------------------------------------------------------------------------
# entry point

def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        ok = True
        if args.command == "classical":
            text = run_classical(cfg)
        elif args.command == "snapshot":
            text = run_snapshot(cfg)
        elif args.command == "series":
            text = run_series(cfg)
        elif args.command == "verify":
            text, ok = run_verify(cfg)
        elif args.command == "oracle-compare":
            dt = None
            if args.dt is not None:
                values = parse_pi_times(args.dt)
                if len(values) != 1 or values[0] <= 0:
                    raise ConfigError(f"--dt wants one positive value, got {args.dt!r}")
                dt = values[0]
            text, ok = run_oracle_compare(cfg, dt=dt, tolerance=args.tolerance)
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
        _emit(text, cfg.output.path)
        return 0 if ok else 1
    except (ConfigError, UnknownPreset) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WavetrainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
