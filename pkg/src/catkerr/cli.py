"""Config-driven experiment runner.

Subcommands map one-to-one onto the protocol runners and emit
machine-readable artifacts: ``summary.json`` with resolved parameters and
results, ``wigner_*.csv`` ("x,p,w", row-major over p then x) and
``timeseries.csv`` ("t,fidelity,parity,mean_n,purity").  All runs are
deterministic; re-running a config reproduces the outputs byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical-convergence error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .errors import CatKerrError, ConvergenceError, StiffnessError
from .fock import annihilation, cat_state, coherent_state, fock_state
from .lindblad import EvolutionProblem, steady_state
from .model import ModelSpec, build_H0, build_Hn, lossy_eigen_amplitude
from .observables import (
    fidelity,
    mean_photon,
    parity_expectation,
    purity,
    wigner,
)
from .protocols import (
    DriveEnvelope,
    analytic_init_dephasing,
    condition_sweep,
    run_adiabatic_init,
    run_gate_x,
    run_gate_z,
    run_gate_zz,
    run_stabilization,
    run_transitionless_init,
    select_cd_variant,
)

PHYSICAL_UNITS_NOTE = (
    "rates are in units of K (K=1 internally); for a JPA with K/2pi = 750 kHz "
    "one time unit is 1/K = 0.21 us"
)


# ---------------------------------------------------------------------------
# output helpers (atomic writes)
# ---------------------------------------------------------------------------

def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_summary(out_dir: str, payload: dict):
    payload = dict(payload)
    payload.setdefault("units", PHYSICAL_UNITS_NOTE)
    payload.setdefault("version", __version__)
    _atomic_write(os.path.join(out_dir, "summary.json"),
                  json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_wigner_csv(out_dir: str, name: str, grid):
    lines = ["x,p,w"]
    for i, p in enumerate(grid.p_axis):
        for j, x in enumerate(grid.x_axis):
            lines.append(f"{x:.10g},{p:.10g},{grid.values[i, j]:.10g}")
    _atomic_write(os.path.join(out_dir, f"wigner_{name}.csv"), "\n".join(lines) + "\n")


def write_timeseries_csv(out_dir: str, rows):
    lines = ["t,fidelity,parity,mean_n,purity"]
    for r in rows:
        lines.append(",".join(f"{v:.10g}" for v in r))
    _atomic_write(os.path.join(out_dir, "timeseries.csv"), "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def parse_config_file(path: str) -> dict:
    """Flat key = value file (TOML-compatible subset: scalars and strings)."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip().strip('"').strip("'")
            out[key.replace("-", "_")] = value
    return out


def _spec_from_args(args) -> ModelSpec:
    return ModelSpec(
        K=args.K, Ep=args.Ep, kappa=args.kappa, Ez=args.Ez,
        delta_x=args.delta_x, Ezz=args.Ezz, n_drive=args.n_drive,
        n_trunc=args.N,
    )


def _spec_dict(spec: ModelSpec) -> dict:
    return {
        "K": spec.K, "Ep": abs(spec.Ep) if spec.Ep.imag == 0 and spec.Ep.real >= 0
        else [spec.Ep.real, spec.Ep.imag],
        "kappa": spec.kappa, "Ez": spec.Ez, "delta_x": spec.delta_x,
        "Ezz": spec.Ezz, "n_drive": spec.n_drive, "N": spec.n_trunc,
    }


def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--K", type=float, default=1.0, help="Kerr amplitude (units of K)")
    p.add_argument("--kappa", type=float, default=0.0, help="single-photon loss rate")
    p.add_argument("--Ep", type=float, default=0.0, help="two-photon drive amplitude")
    p.add_argument("--Ez", type=float, default=0.0, help="single-photon drive amplitude")
    p.add_argument("--delta-x", type=float, default=0.0, help="drive-resonator detuning")
    p.add_argument("--Ezz", type=float, default=0.0, help="exchange coupling")
    p.add_argument("--n-drive", type=int, default=2, help="photon order of the drive")
    p.add_argument("--N", type=int, default=30, help="Fock truncation per mode")
    p.add_argument("--out-dir", default=".", help="artifact output directory")
    p.add_argument("--config", default=None, help="flat key=value config file; flags win")


def _add_envelope_args(p: argparse.ArgumentParser):
    p.add_argument("--Ep0", type=float, default=4.0, help="asymptotic drive amplitude")
    p.add_argument("--tau", type=float, default=5.0, help="ramp time constant")
    p.add_argument("--t-final", type=float, default=6.5, help="protocol end time")


def _add_grid_args(p: argparse.ArgumentParser):
    p.add_argument("--grid-points", type=int, default=201)
    p.add_argument("--grid-span", type=float, default=None,
                   help="half-width of the (x,p) grid; default |alpha0|+4")


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _eigen_payload(spec: ModelSpec) -> dict:
    amp = lossy_eigen_amplitude(spec)
    return {
        "r0": amp.r0, "theta0": amp.theta0,
        "alpha0": [amp.alpha0.real, amp.alpha0.imag],
        "below_threshold": amp.below_threshold,
        "theta0_branch": amp.branch,
    }


def cmd_steady_state(args) -> int:
    spec = _spec_from_args(args)
    t0 = time.perf_counter()
    amp = lossy_eigen_amplitude(spec)
    problem = EvolutionProblem(
        hamiltonian=build_H0(spec),
        initial=fock_state(0, spec.n_trunc),
        t_span=(0.0, 1.0),
        collapse_ops=((spec.kappa, annihilation(spec.n_trunc)),),
    )
    rho = steady_state(problem, method=args.method, rate_scale=spec.kappa)
    ideal = 0.5 * (
        coherent_state(amp.alpha0, spec.n_trunc).to_density_matrix().data
        + coherent_state(-amp.alpha0, spec.n_trunc).to_density_matrix().data
    )
    from .fock import DensityMatrix

    fid = fidelity(rho, DensityMatrix(ideal, (spec.n_trunc,), validate=False))
    elapsed = time.perf_counter() - t0
    grid = wigner(rho, span=args.grid_span, points=args.grid_points)
    write_wigner_csv(args.out_dir, "steady_state", grid)
    write_summary(args.out_dir, {
        "subcommand": "steady-state",
        "model": _spec_dict(spec),
        "method": args.method,
        "eigen_amplitude": _eigen_payload(spec),
        "fidelity_to_ideal_mixture": fid,
        "mean_photon": mean_photon(rho),
        "purity": purity(rho),
        "elapsed_seconds": elapsed,
    })
    print(f"steady-state fidelity to ideal mixture: {fid:.6f}")
    return 0


def cmd_adiabatic_init(args) -> int:
    t0 = time.perf_counter()
    report = run_adiabatic_init(
        K=args.K, kappa=args.kappa, Ep0=args.Ep0, tau=args.tau,
        t_final=args.t_final, initial=args.initial, n_trunc=args.N,
    )
    env = DriveEnvelope.smooth_turn_on(args.Ep0, args.tau)
    analytic = analytic_init_dephasing(args.kappa, env, args.K, args.t_final)
    write_summary(args.out_dir, {
        "subcommand": "adiabatic-init",
        "parameters": report.parameters,
        "fidelity": report.final_fidelity,
        "target": report.target,
        "analytic_dephasing": analytic,
        "elapsed_seconds": time.perf_counter() - t0,
    })
    print(f"adiabatic init fidelity: {report.final_fidelity:.6f}")
    return 0


def cmd_ta_init(args) -> int:
    t0 = time.perf_counter()
    report = run_transitionless_init(
        K=args.K, kappa=args.kappa, Ep0=args.Ep0, tau=args.tau,
        t_final=args.t_final, variant=args.variant, n_trunc=args.N,
    )
    write_summary(args.out_dir, {
        "subcommand": "ta-init",
        "parameters": report.parameters,
        "fidelity": report.final_fidelity,
        "target": report.target,
        "cd_variant": report.parameters["variant"],
        "elapsed_seconds": time.perf_counter() - t0,
    })
    print(f"transitionless init fidelity: {report.final_fidelity:.6f}")
    return 0


def cmd_stabilize(args) -> int:
    t0 = time.perf_counter()
    t_points = np.linspace(0.0, args.t_final, args.time_points + 1)[1:]
    rows = []
    fidelities = {}
    for mode in ("driven-KNR", "undriven-KNR", "linear"):
        reports = run_stabilization(
            K=args.K, kappa=args.kappa, Ep=args.Ep, t_points=t_points,
            mode=mode, n_trunc=args.N,
        )
        fidelities[mode] = [r.final_fidelity for r in reports]
        if mode == "driven-KNR":
            for r in reports:
                st = r.extras["state"]
                rows.append((r.parameters["t"], r.final_fidelity,
                             parity_expectation(st), mean_photon(st), purity(st)))
            snap = reports[-1].extras["state"]
            write_wigner_csv(args.out_dir, "stabilized_final",
                             wigner(snap, span=args.grid_span,
                                    points=args.grid_points))
    write_timeseries_csv(args.out_dir, rows)
    write_summary(args.out_dir, {
        "subcommand": "stabilize",
        "model": {"K": args.K, "kappa": args.kappa, "Ep": args.Ep, "N": args.N},
        "times": list(map(float, t_points)),
        "fidelity_by_mode": fidelities,
        "elapsed_seconds": time.perf_counter() - t0,
    })
    print("stabilization fidelities at final time: "
          + ", ".join(f"{m}={v[-1]:.4f}" for m, v in fidelities.items()))
    return 0


def _gate_summary(args, name: str, report) -> int:
    write_summary(args.out_dir, {
        "subcommand": name,
        "parameters": report.parameters,
        "fidelity": report.final_fidelity,
        "target": report.target,
    })
    print(f"{name} fidelity: {report.final_fidelity:.6f}")
    return 0


def cmd_gate_z(args) -> int:
    report = run_gate_z(K=args.K, kappa=args.kappa, Ep=args.Ep, Ez=args.Ez,
                        theta=args.theta, n_trunc=args.N,
                        time_parameterization=args.time_parameterization)
    return _gate_summary(args, "gate-z", report)


def cmd_gate_x(args) -> int:
    report = run_gate_x(K=args.K, kappa=args.kappa, Ep=args.Ep,
                        delta_x=args.delta_x, theta=args.theta, n_trunc=args.N)
    return _gate_summary(args, "gate-x", report)


def cmd_gate_zz(args) -> int:
    report = run_gate_zz(K=args.K, kappa=args.kappa, Ep=args.Ep, Ezz=args.Ezz,
                         n_trunc=args.N)
    return _gate_summary(args, "gate-zz", report)


def cmd_nphoton_check(args) -> int:
    spec = _spec_from_args(args)
    h = build_Hn(spec)
    n = spec.n_drive
    energy = abs(spec.Ep) ** 2 / spec.K
    roots = [
        abs(spec.Ep / spec.K) ** (1.0 / n)
        * np.exp(1j * (np.angle(complex(spec.Ep) / spec.K) + 2 * math.pi * k) / n)
        for k in range(n)
    ]
    residuals = []
    for root in roots:
        psi = coherent_state(root, spec.n_trunc)
        residuals.append(float(np.linalg.norm(h @ psi - energy * psi.amplitudes)))
    write_summary(args.out_dir, {
        "subcommand": "nphoton-check",
        "model": _spec_dict(spec),
        "eigen_energy": energy,
        "coherent_roots": [[r.real, r.imag] for r in roots],
        "residual_norms": residuals,
    })
    print(f"n={n} residuals: " + ", ".join(f"{r:.2e}" for r in residuals))
    return 0


def cmd_wigner(args) -> int:
    spec = _spec_from_args(args)
    if args.state == "vacuum":
        state = fock_state(0, spec.n_trunc)
    elif args.state == "coherent":
        state = coherent_state(args.alpha, spec.n_trunc)
    elif args.state in ("cat-even", "cat-odd"):
        state = cat_state(args.alpha, args.state.split("-")[1], spec.n_trunc)
    else:
        raise ValueError(f"unknown state {args.state!r}")
    grid = wigner(state, span=args.grid_span, points=args.grid_points)
    write_wigner_csv(args.out_dir, args.state.replace("-", "_"), grid)
    write_summary(args.out_dir, {
        "subcommand": "wigner",
        "model": _spec_dict(spec),
        "state": args.state,
        "alpha": args.alpha,
        "peak": list(grid.peak_location()),
        "integral": grid.integral(),
    })
    print(f"wigner peak at {grid.peak_location()}, integral {grid.integral():.4f}")
    return 0


def cmd_sweep(args) -> int:
    grid = np.linspace(args.start, args.stop, args.steps)
    overrides = {"K": args.K, "kappa": args.kappa, "Ep": args.Ep, "n_trunc": args.N}
    rows = condition_sweep(args.gate, grid, **overrides)
    lines = ["strength,fidelity"] + [f"{s:.10g},{f:.10g}" for s, f in rows]
    _atomic_write(os.path.join(args.out_dir, f"sweep_{args.gate}.csv"),
                  "\n".join(lines) + "\n")
    write_summary(args.out_dir, {
        "subcommand": "sweep",
        "gate": args.gate,
        "model": {"K": args.K, "kappa": args.kappa, "Ep": args.Ep, "N": args.N},
        "rows": [[s, f] for s, f in rows],
    })
    print("\n".join(f"{s:8.4f}  {f:.6f}" for s, f in rows))
    return 0


def cmd_reproduce_paper(args) -> int:
    from .reproduce import run_reproduction

    results = run_reproduction(only=args.only, out_dir=args.out_dir)
    failed = [r for r in results if not r["passed"]]
    for r in results:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"[{status}] {r['name']}: {r['detail']}")
    write_summary(args.out_dir, {
        "subcommand": "reproduce-paper",
        "results": results,
        "cd_variant": select_cd_variant(),
        "all_passed": not failed,
    })
    return 0 if not failed else 3


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catkerr",
        description="Two-photon driven Kerr resonator experiments",
    )
    sub = parser.add_subparsers(dest="subcommand")

    p = sub.add_parser("steady-state", help="lossy steady state and its Wigner map")
    _add_model_args(p)
    _add_grid_args(p)
    p.add_argument("--method", choices=["long-time", "null-space"], default="long-time")
    p.set_defaults(func=cmd_steady_state)

    p = sub.add_parser("adiabatic-init", help="slow-ramp cat preparation")
    _add_model_args(p)
    _add_envelope_args(p)
    p.add_argument("--initial", type=int, choices=[0, 1], default=0)
    p.set_defaults(func=cmd_adiabatic_init, N=25)

    p = sub.add_parser("ta-init", help="transitionless (counterdiabatic) preparation")
    _add_model_args(p)
    _add_envelope_args(p)
    p.add_argument("--variant", choices=["auto", "eq5", "caption", "exact"],
                   default="auto")
    p.set_defaults(func=cmd_ta_init, N=25, tau=1.0, t_final=1.37)

    p = sub.add_parser("stabilize", help="cat stabilization against Kerr rotation")
    _add_model_args(p)
    _add_grid_args(p)
    p.add_argument("--t-final", type=float, default=40.0)
    p.add_argument("--time-points", type=int, default=40)
    p.set_defaults(func=cmd_stabilize, Ep=4.0, kappa=0.05)

    p = sub.add_parser("gate-z", help="logical Z rotation")
    _add_model_args(p)
    p.add_argument("--theta", type=float, default=math.pi)
    p.add_argument("--time-parameterization", choices=["rotation", "literal"],
                   default="rotation")
    p.set_defaults(func=cmd_gate_z, Ep=4.0, Ez=0.8, N=25)

    p = sub.add_parser("gate-x", help="logical X rotation via drive detuning")
    _add_model_args(p)
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.set_defaults(func=cmd_gate_x, Ep=1.0, delta_x=1.0 / 3.0, N=15)

    p = sub.add_parser("gate-zz", help="two-mode entangling gate")
    _add_model_args(p)
    p.set_defaults(func=cmd_gate_zz, Ep=4.0, Ezz=0.2, N=18)

    p = sub.add_parser("nphoton-check", help="n-photon driven eigenstate residuals")
    _add_model_args(p)
    p.set_defaults(func=cmd_nphoton_check, n_drive=3, Ep=1.0, N=40)

    p = sub.add_parser("wigner", help="Wigner map of a named state")
    _add_model_args(p)
    _add_grid_args(p)
    p.add_argument("--state", default="vacuum",
                   choices=["vacuum", "coherent", "cat-even", "cat-odd"])
    p.add_argument("--alpha", type=float, default=2.0)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("sweep", help="gate fidelity vs drive strength")
    _add_model_args(p)
    p.add_argument("--gate", choices=["z", "x", "zz"], required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=8)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce-paper", help="run the quantitative benchmark suite")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--only", nargs="*", default=None,
                   help="subset of benchmark names to run")
    p.set_defaults(func=cmd_reproduce_paper)

    return parser


def _apply_config(args, argv):
    """Config file supplies values for any flag not given on the command
    line; explicit flags win."""
    if getattr(args, "config", None) is None:
        return args
    given = {tok.split("=", 1)[0].lstrip("-").replace("-", "_")
             for tok in argv if tok.startswith("--")}
    for key, raw in parse_config_file(args.config).items():
        if not hasattr(args, key):
            raise ValueError(f"unknown config key {key!r}")
        if key in given:
            continue
        current = getattr(args, key)
        cast = type(current) if current is not None else float
        if cast is bool:
            setattr(args, key, raw.lower() in ("1", "true", "yes"))
        else:
            setattr(args, key, cast(raw))
    return args


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(argv)
    if not getattr(args, "subcommand", None):
        parser.print_usage()
        return 2
    try:
        args = _apply_config(args, argv)
        return args.func(args)
    except (ConvergenceError, StiffnessError) as exc:
        print(f"numerical convergence error: {exc}", file=sys.stderr)
        return 3
    except (CatKerrError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
