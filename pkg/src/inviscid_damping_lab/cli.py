"""Command-line harness: presets, file outputs, and the run manifest.

Usage:
    inviscid-damping-lab <preset> --config <file> [--out <dir>] [--seed <u64>]

Outputs land in the chosen directory: manifest.json always; diagnostics.csv,
snapshots, toy.csv / toy_summary.csv, lambda.csv, elliptic.csv, echo.csv per
preset.  CSV numbers are written as shortest round-trip decimals so files are
reproducible and diffable.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from pathlib import Path

import numpy as np

from . import __version__, diagnostics, elliptic, linear, toy
from .config import ConfigError, ExperimentConfig, load_config
from .datagen import generate_data, reference_linear_data
from .gevrey import epsilon_threshold, lambda_of_t
from .sim import BlowUpError, Snapshot, max_active_frequency, run, write_snapshot
from .spectral import (
    RealField,
    SpectralField,
    l2_norm,
    project_nonzero_x,
    sobolev_norm,
    to_spectral,
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_manifest(out_dir: Path, payload: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _base_manifest(config: ExperimentConfig) -> dict:
    return {
        "status": "ok",
        "preset": config.preset,
        "version": __version__,
        "seed": config.seed,
        "config": config.resolved,
    }


def _report_dict(report) -> dict:
    return {
        "gevrey_norm": report.gevrey_norm,
        "mean": report.mean,
        "y_moment": report.y_moment,
        "moment_below_epsilon": report.moment_ok,
    }


def _write_records(path: Path, records):
    write_csv(path, diagnostics.CSV_HEADER, [r.as_row() for r in records])


def _snapshot_name(t: float) -> str:
    return f"snapshot_t{t:012.6f}.bin"


# --------------------------------------------------------------------------
# presets

def preset_simulate(config: ExperimentConfig, out: Path) -> dict:
    field, report = generate_data(config.data, config.domain, config.seed)
    records, snaps = run(field, config.sim, config.lambda_params)
    _write_records(out / "diagnostics.csv", records)
    for snap in snaps:
        write_snapshot(out / _snapshot_name(snap.t), snap)
    return {
        "data_report": _report_dict(report),
        "highfreq_cutoff": 2.0 * max_active_frequency(field),
        "records": len(records),
        "snapshots": [s.t for s in snaps],
    }


def preset_gen_data(config: ExperimentConfig, out: Path) -> dict:
    field, report = generate_data(config.data, config.domain, config.seed)
    write_snapshot(out / "data.bin", Snapshot(t=0.0, field=field))
    return {"data_report": _report_dict(report), "file": "data.bin"}


def preset_linear(config: ExperimentConfig, out: Path) -> dict:
    """Closed-form sweep of the frozen linear dynamics on the reference family."""
    domain = config.domain
    omega = reference_linear_data(domain)
    h4 = sobolev_norm(omega, 4.0)
    t_grid = np.concatenate([np.linspace(0.0, 10.0, 41)[:-1], np.geomspace(10.0, 100.0, 61)])
    rows = []
    for t in t_grid:
        ux, uy = linear.linear_velocity(omega, float(t))
        ux_fluct = project_nonzero_x(ux)
        phi = project_nonzero_x(linear.orr_streamfunction(omega, float(t)))
        ratio = (1.0 + t * t) * sobolev_norm(phi, 2.0) / h4
        rows.append(
            (
                float(t),
                np.sqrt(np.sum(np.abs(ux_fluct.coeffs) ** 2) * domain.mode_weight),
                np.sqrt(np.sum(np.abs(uy.coeffs) ** 2) * domain.mode_weight),
                ratio,
            )
        )
    write_csv(out / "linear.csv", ["t", "ux_fluct_l2", "uy_l2", "phidecay_ratio"], rows)
    ux_fit = linear.decay_exponent_fit([(r[0], r[1]) for r in rows if r[0] >= 10.0])
    uy_fit = linear.decay_exponent_fit([(r[0], r[2]) for r in rows if r[0] >= 10.0])
    return {
        "ux_fluct_slope": ux_fit[0],
        "ux_fluct_r2": ux_fit[1],
        "uy_slope": uy_fit[0],
        "uy_r2": uy_fit[1],
        "phidecay_ratio_max": max(r[3] for r in rows),
    }


def preset_toy(config: ExperimentConfig, out: Path) -> dict:
    interval_rows = []
    summary_rows = []
    results = []
    for eta in config.toy.etas:
        chain = toy.chain_amplification(eta, config.toy.kappa, config.toy.rtol)
        for item in chain.per_k:
            interval_rows.append(
                (eta, item.k, item.interval_start, item.interval_end, item.A_k, item.log_total)
            )
        summary_rows.append((eta, float(np.sqrt(eta)), chain.log_total, "", "", ""))
        results.append((eta, chain.total if not chain.overflowed else np.exp(700.0)))
    report = toy.gevrey_threshold_report(results)
    summary_rows.append(("", "", "", report.slope, report.r2_by_s[0.5], report.implied_s))
    write_csv(
        out / "toy.csv",
        ["eta", "k", "interval_start", "interval_end", "A_k", "log_total"],
        interval_rows,
    )
    write_csv(
        out / "toy_summary.csv",
        ["eta", "sqrt_eta", "log_total", "slope", "r2", "implied_s"],
        summary_rows,
    )
    return {
        "kappa": config.toy.kappa,
        "slope": report.slope,
        "implied_s": report.implied_s,
        "r2_by_s": {str(k): v for k, v in report.r2_by_s.items()},
        "chains": len(config.toy.etas),
    }


def preset_lambda(config: ExperimentConfig, out: Path) -> dict:
    params = config.lambda_params
    t_grid = np.concatenate([[0.0, 0.5, 1.0], np.geomspace(1.0, 1e8, 57)[1:]])
    rows = [(float(t), lambda_of_t(params, float(t))) for t in t_grid]
    write_csv(out / "lambda.csv", ["t", "lambda_val"], rows)
    return {
        "epsilon_star": epsilon_threshold(params),
        "lambda_short": params.lambda_short,
        "lambda_final": rows[-1][1],
    }


def preset_elliptic(config: ExperimentConfig, out: Path) -> dict:
    """Inversion battery for the constant- and variable-coefficient operators."""
    domain = config.domain
    rng = np.random.default_rng(config.seed)
    smooth = rng.standard_normal((domain.N_x, domain.N_y))
    f = project_nonzero_x(to_spectral(RealField(domain, smooth)))
    f = SpectralField(domain, f.coeffs * np.exp(-0.5 * domain.mode_magnitude))
    t_values = [0.0, 0.5, 1.0, 2.0, 2.5, 3.0, 4.0, 5.0, 7.5, 10.0]
    rows = []
    worst_identity = 0.0
    for t in t_values:
        back = elliptic.apply_delta_L(elliptic.invert_delta_L(f, t), t)
        err = l2_norm(SpectralField(domain, back.coeffs - f.coeffs)) / l2_norm(f)
        worst_identity = max(worst_identity, err)
        rows.append((t, 0.0, "identity", 0, err))
    v_grid = domain.y_nodes
    for amp in (0.01, 0.05, 0.6):
        vprime = 1.0 + amp * np.cos(domain.eta0 * v_grid)
        vpp = -amp * domain.eta0 * np.sin(domain.eta0 * v_grid) * vprime
        coords = elliptic.CoordFields(
            domain=domain, t=2.0, v_of_y=v_grid, vprime=vprime,
            vdoubleprime=vpp, monotone_flag=True,
        )
        try:
            result = elliptic.invert_delta_t(f, coords, 2.0, tol=1e-10, max_iter=40)
            rows.append((2.0, amp, "converged", result.iterations, result.residuals[-1]))
        except elliptic.ContractionGuardError:
            rows.append((2.0, amp, "guard_refused", 0, float("nan")))
    write_csv(
        out / "elliptic.csv",
        ["t", "vprime_amp", "status", "iterations", "residual"],
        rows,
    )
    return {"identity_error_max": worst_identity, "cases": len(rows)}


def echo_marker_times(config: ExperimentConfig):
    """Predicted burst times eta/k for the downward echo ladder k_hi, k_hi - k_lo, ..."""
    spec = config.data
    positive = [k for k in spec.k_support if k > 0]
    k_lo, k_hi = min(positive), max(positive)
    eta_e = config.domain.eta0 * round(spec.eta_width / config.domain.eta0)
    ks = list(range(k_hi, 0, -k_lo))
    window_lo = 2.0 * config.sim.diagnostic_stride
    return [
        (k, eta_e / k)
        for k in ks
        if window_lo <= eta_e / k <= config.sim.t_end
    ], eta_e


def preset_echo(config: ExperimentConfig, out: Path) -> dict:
    if config.data.kind != "two_mode_echo":
        raise ConfigError("echo preset requires data.kind == 'two_mode_echo'")
    field, report = generate_data(config.data, config.domain, config.seed)
    records, snaps = run(field, config.sim, config.lambda_params)
    _write_records(out / "diagnostics.csv", records)
    for snap in snaps:
        write_snapshot(out / _snapshot_name(snap.t), snap)
    markers, eta_e = echo_marker_times(config)
    times = np.array([r.t for r in records])
    uy = np.array([r.uy_l2 for r in records])
    marker_col = [""] * len(records)
    for _, tm in markers:
        idx = int(np.argmin(np.abs(times - tm)))
        marker_col[idx] = repr(float(tm))
    write_csv(
        out / "echo.csv",
        ["t", "uy_l2", "marker"],
        [(times[i], uy[i], marker_col[i]) for i in range(len(records))],
    )
    maxima = [
        float(times[i])
        for i in range(1, len(uy) - 1)
        if uy[i] > uy[i - 1] and uy[i] > uy[i + 1]
    ]
    return {
        "data_report": _report_dict(report),
        "eta_echo": eta_e,
        "predicted_times": [tm for _, tm in markers],
        "detected_maxima": maxima,
    }


PRESET_RUNNERS = {
    "linear": preset_linear,
    "simulate": preset_simulate,
    "toy": preset_toy,
    "lambda": preset_lambda,
    "elliptic": preset_elliptic,
    "echo": preset_echo,
    "gen-data": preset_gen_data,
}


def run_preset(config: ExperimentConfig) -> int:
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    manifest = _base_manifest(config)
    started = time.monotonic()
    try:
        extra = PRESET_RUNNERS[config.preset](config, out)
        manifest.update(extra)
    except BlowUpError as exc:
        if exc.records:
            _write_records(out / "diagnostics.csv", exc.records)
        if exc.state is not None:
            write_snapshot(
                out / "last_good.bin", Snapshot(t=exc.state.t, field=exc.state.f_hat)
            )
        manifest["status"] = "error"
        manifest["error"] = {"type": "BlowUpError", "message": str(exc)}
    except Exception as exc:  # noqa: BLE001 - the manifest is the error channel
        manifest["status"] = "error"
        manifest["error"] = {
            "type": type(exc).__name__,
            "message": str(exc),
            "traceback": traceback.format_exc(),
        }
    manifest["wallclock_sec"] = time.monotonic() - started
    write_manifest(out, manifest)
    return 0 if manifest["status"] == "ok" else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="inviscid-damping-lab",
        description="Pseudo-spectral inviscid-damping experiments",
    )
    parser.add_argument("preset", choices=PRESET_RUNNERS.keys())
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--seed", type=int, default=None, help="seed override (u64)")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, preset=args.preset)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out is not None:
        config = _override(config, output_dir=Path(args.out))
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            print("error: seed must fit in 64 unsigned bits", file=sys.stderr)
            return 2
        config = _override(config, seed=args.seed)
    return run_preset(config)


def _override(config: ExperimentConfig, **kwargs) -> ExperimentConfig:
    from dataclasses import replace

    resolved = dict(config.resolved)
    if "output_dir" in kwargs:
        resolved["output_dir"] = str(kwargs["output_dir"])
    if "seed" in kwargs:
        resolved["seed"] = kwargs["seed"]
    return replace(config, resolved=resolved, **kwargs)


if __name__ == "__main__":
    sys.exit(main())
