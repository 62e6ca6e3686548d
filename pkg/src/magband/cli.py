"""Command-line front end.

Subcommands: sweep | scaling | asym | classical | current | convergence |
acceptance.  Options resolve with precedence flags > config file > defaults;
the config file is plain key=value lines ('#' starts a comment) using the
flag names with underscores.  Exit codes: 0 success, 2 invalid input, 3
numerical convergence failure (the acceptance runner returns 1 when a check
fails).

All numeric output goes through 17-significant-digit formatting, so repeated
runs — at any worker count — produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import acceptance as acceptance_mod
from .asymptotics import (
    BandCurve,
    exponential_gap_check,
    expansion_coefficients,
    remainder_rate,
)
from .bands import scaling_study, sweep
from .classical import ClassicalState, effective_velocity, integrate, radial_period
from .errors import ConvergenceError, ModelError
from .model import ModelParams, coupling_constant, landau_level
from .solver import (
    Grid,
    derivative_boundary_form,
    derivative_feynman_hellmann,
    refined_values,
    solve_fiber,
)
from .tables import (
    CONVERGENCE_HEADER,
    SCALING_HEADER,
    SWEEP_HEADER,
    TRAJECTORY_HEADER,
    convergence_rows,
    render_csv,
    scaling_rows,
    sweep_rows,
    trajectory_rows,
)
from .transport import SpectralWindow, bulk_decay_study, witness_small_current
from .transport import bands_meeting_window, current as current_functional
from .transport import edge_bound, synthesize_state


# ---------------------------------------------------------------- value parsing

def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ModelError(f"expected an integer, got {text!r}") from exc


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ModelError(f"expected a number, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    """'3' | '0,2,5' | '0..6' (inclusive)."""
    text = text.strip()
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = _int(lo_text), _int(hi_text)
        if hi < lo:
            raise ModelError(f"empty integer range {text!r}")
        return list(range(lo, hi + 1))
    return [_int(part) for part in text.split(",") if part.strip() != ""]


def _float_grid(text: str) -> np.ndarray:
    """'start:stop:step' (inclusive stop) | comma list | single value."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ModelError(f"grid syntax is start:stop:step, got {text!r}")
        start, stop, step = (_float(p) for p in parts)
        if not step > 0:
            raise ModelError(f"grid step must be positive, got {step}")
        count = int(round((stop - start) / step))
        if abs(start + count * step - stop) > 1e-9 * max(1.0, abs(stop)):
            raise ModelError(f"step does not divide the range in {text!r}")
        if count < 0:
            raise ModelError(f"empty grid {text!r}")
        return start + step * np.arange(count + 1)
    return np.array([_float(p) for p in text.split(",") if p.strip() != ""])


def _pair(text: str) -> tuple[float, float]:
    parts = text.replace(":", ",").split(",")
    if len(parts) != 2:
        raise ModelError(f"expected two numbers 'a:b', got {text!r}")
    return _float(parts[0]), _float(parts[1])


def _str(text: str) -> str:
    return text


# ---------------------------------------------------------------- config plumbing

# per-subcommand option tables: name -> (converter, default-as-string-or-None, help)
_OPTIONS = {
    "sweep": {
        "n": (_int, "5", "ambient dimension (>= 3)"),
        "m": (_int_list, "0..3", "angular momenta, e.g. 0..6 or 0,2,4"),
        "p": (_int_list, "1..3", "band indices"),
        "xi": (_float_grid, "-1:5:0.05", "momentum samples start:stop:step"),
        "radius": (_float, "20", "grid radius R"),
        "intervals": (_int, "4800", "grid intervals N (step h = R/N)"),
        "workers": (_int, "1", "concurrent fiber solves"),
        "output": (_str, None, "CSV path (default: stdout)"),
    },
    "scaling": {
        "n": (_int, "5", "ambient dimension"),
        "p": (_int, "1", "band index"),
        "energy": (_float, "2.0", "crossing energy E (not a Landau level)"),
        "m": (_int_list, "5..40", "angular momenta (m >= 1)"),
        "tolerance": (_float, "1e-8", "crossing tolerance on |lambda - E|"),
        "step": (_float, str(1.0 / 240.0), "grid step h for the fiber solves"),
        "output": (_str, None, "CSV path (omit to skip the CSV)"),
        "summary": (_str, None, "JSON path (default: stdout)"),
    },
    "asym": {
        "n": (_int, "5", "ambient dimension"),
        "m": (_int, "1", "angular momentum (fixes k_m; k_m=0 switches regime)"),
        "p": (_int, "1", "band index"),
        "order": (_int, "4", "expansion order N"),
        "basis": (_int, None, "Hermite basis size (default p + 2N)"),
        "window": (_pair, "8:15", "xi window for the remainder regression"),
        "samples": (_int, "15", "band samples across the window"),
        "radius": (_float, "30", "grid radius for the band solves"),
        "intervals": (_int, "7200", "coarse grid intervals (Richardson doubles)"),
        "summary": (_str, None, "JSON path (default: stdout)"),
    },
    "classical": {
        "x0": (_float, "1.2", "initial x"),
        "y0": (_float, "0.0", "initial y"),
        "z0": (_float, "0.0", "initial z"),
        "vx": (_float, "0.1", "initial vx"),
        "vy": (_float, "0.5", "initial vy"),
        "vz": (_float, "0.3", "initial vz"),
        "t_max": (_float, "200", "integration time"),
        "dt": (_float, "1e-3", "RK4 step"),
        "stride": (_int, "100", "output every k-th sample (CSV only)"),
        "output": (_str, None, "trajectory CSV path (omit to skip)"),
        "summary": (_str, None, "JSON path (default: stdout)"),
    },
    "current": {
        "n": (_int, "5", "ambient dimension (>= 4)"),
        "window": (_pair, "1.5:2.5", "spectral window a:b"),
        "edge_m_max": (_int, "3", "edge packet uses m = 0..edge_m_max"),
        "cutoffs": (_int_list, "10,20,30", "bulk cutoffs M"),
        "epsilon": (_float, "1e-2", "witness target |current| <= epsilon"),
        "step": (_float, str(1.0 / 120.0), "grid step for band solves"),
        "workers": (_int, "1", "concurrent fiber solves for the edge sweep"),
        "summary": (_str, None, "JSON path (default: stdout)"),
    },
    "convergence": {
        "n": (_int, "5", "ambient dimension"),
        "m": (_int_list, "0..3", "angular momenta"),
        "p": (_int_list, "1..3", "band indices"),
        "xi": (_float, "0.0", "momentum"),
        "radius": (_float, "12", "grid radius"),
        "intervals": (_int, "4800", "coarse intervals (the fine grid doubles)"),
        "bound": (_float, "1e-6", "acceptance bound on the error estimate"),
        "output": (_str, None, "CSV path (omit to skip)"),
        "summary": (_str, None, "JSON path (default: stdout)"),
    },
    "acceptance": {
        "only": (_str, None, "comma-separated check name prefixes, e.g. 01,08"),
        "summary": (_str, None, "JSON path (in addition to the printed lines)"),
    },
}


def _read_config(path: str) -> dict[str, str]:
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ModelError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def _resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge flags > config file > defaults, converting each value once."""
    table = _OPTIONS[command]
    file_values = _read_config(args.config) if args.config else {}
    unknown = set(file_values) - set(table)
    if unknown:
        raise ModelError(
            f"unknown config keys for '{command}': {', '.join(sorted(unknown))}"
        )
    resolved = {}
    for name, (convert, default, _help) in table.items():
        raw = getattr(args, name)
        if raw is None:
            raw = file_values.get(name, default)
        if raw is None:
            resolved[name] = None
        else:
            resolved[name] = convert(raw)
    return resolved


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _report(config: dict, results: dict, checks: list[dict], path: str | None) -> None:
    payload = {
        "config": _jsonable(config),
        "results": _jsonable(results),
        "checks": _jsonable(checks),
    }
    _emit(json.dumps(payload, indent=2) + "\n", path)


def _check(name: str, value, bound: str, passed: bool) -> dict:
    return {"name": name, "value": value, "bound": bound, "pass": bool(passed)}


# ---------------------------------------------------------------- subcommands

def cmd_sweep(cfg: dict) -> int:
    grid = Grid(cfg["radius"], cfg["intervals"])
    curves = sweep(
        cfg["n"], cfg["m"], cfg["p"], cfg["xi"], grid, workers=cfg["workers"]
    )
    _emit(render_csv(SWEEP_HEADER, sweep_rows(curves)), cfg["output"])
    return 0


def cmd_scaling(cfg: dict) -> int:
    study = scaling_study(
        cfg["n"], cfg["p"], cfg["energy"], cfg["m"],
        tolerance=cfg["tolerance"], step=cfg["step"],
    )
    if cfg["output"] is not None:
        _emit(render_csv(SCALING_HEADER, scaling_rows(study)), cfg["output"])
    r_xi = float(np.max(study.xi_over_sqrtk) / np.min(study.xi_over_sqrtk))
    r_sl = float(np.max(study.slope_times_sqrtk) / np.min(study.slope_times_sqrtk))
    results = {
        "xi_slope": study.xi_regression,
        "xi_slope_stderr": study.xi_regression_err,
        "derivative_slope": study.slope_regression,
        "derivative_slope_stderr": study.slope_regression_err,
        "xi_ratio_spread": r_xi,
        "slope_ratio_spread": r_sl,
    }
    checks = [
        _check("xi-slope", study.xi_regression, "0.5 +/- 0.05",
               abs(study.xi_regression - 0.5) <= 0.05),
        _check("derivative-slope", study.slope_regression, "-0.5 +/- 0.1",
               abs(study.slope_regression + 0.5) <= 0.1),
        _check("xi-ratio-spread", r_xi, "<= 2", r_xi <= 2.0),
        _check("slope-ratio-spread", r_sl, "<= 3", r_sl <= 3.0),
    ]
    _report(cfg, results, checks, cfg["summary"])
    return 0


def cmd_asym(cfg: dict) -> int:
    n, m, p, order = cfg["n"], cfg["m"], cfg["p"], cfg["order"]
    coupling = float(coupling_constant(n, m))
    lo, hi = cfg["window"]
    xi = np.linspace(lo, hi, cfg["samples"])
    grid = Grid(cfg["radius"], cfg["intervals"])
    fine = grid.refined()

    values, errors, fh, bd = [], [], [], []
    for x in xi:
        params = ModelParams(n, m, float(x))
        rv = refined_values(params, grid, p)[p - 1]
        values.append(rv.value)
        errors.append(rv.error)
        pair = solve_fiber(params, fine, p)[p - 1]
        fh.append(derivative_feynman_hellmann(params, pair, fine))
        bd.append(derivative_boundary_form(params, pair, fine))
    band = BandCurve(n, m, p, xi, np.array(values), np.array(fh), np.array(bd))
    noise = float(max(errors))

    if coupling == 0.0:
        profile = exponential_gap_check(band, p, (lo, hi), error_estimate=noise)
        results = {
            "coupling": 0.0,
            "regime": "exponential",
            "xi": profile.xi,
            "gap": profile.gap,
            "profile": profile.profile,
            "indeterminate": profile.indeterminate,
        }
        checks = [
            _check("gap-positive", float(np.min(profile.gap)), "> 0", profile.positive),
            _check("profile-spread", profile.ratio, "<= 2",
                   bool(np.isfinite(profile.ratio)) and profile.ratio <= 2.0
                   and not profile.indeterminate),
        ]
        _report(cfg, results, checks, cfg["summary"])
        return 0

    basis = cfg["basis"] if cfg["basis"] is not None else p + 2 * order
    coeffs = expansion_coefficients(p, coupling, order, basis)
    probe = expansion_coefficients(p, 2.0 * coupling, order, basis)
    sensitive = [
        q + 1
        for q in range(order)
        if abs(coeffs.alphas[q] - probe.alphas[q]) > 1e-10
    ]
    report = remainder_rate(band, coeffs, (lo, hi), noise_floor=noise)
    results = {
        "coupling": coupling,
        "regime": "inverse-power",
        "landau_level": landau_level(p),
        "alphas": coeffs.alphas,
        "coupling_sensitive_orders": sensitive,
        "remainder_slope": report.slope,
        "remainder_points": report.points,
        "remainder_indeterminate": report.indeterminate,
        "noise_floor": noise,
    }
    checks = []
    if order >= 2:
        checks.append(_check("alpha1", coeffs.alphas[0], "0 (to 1e-12)",
                             abs(coeffs.alphas[0]) <= 1e-12))
        checks.append(_check("alpha2", coeffs.alphas[1], "1 (to 1e-12)",
                             abs(coeffs.alphas[1] - 1.0) <= 1e-12))
    if report.slope is not None:
        target = -(order + 1) + 0.5
        checks.append(_check("remainder-slope", report.slope, f"<= {target}",
                             report.slope <= target))
    _report(cfg, results, checks, cfg["summary"])
    return 0


def cmd_classical(cfg: dict) -> int:
    initial = ClassicalState(
        cfg["x0"], cfg["y0"], cfg["z0"], cfg["vx"], cfg["vy"], cfg["vz"]
    )
    traj = integrate(initial, cfg["t_max"], cfg["dt"])
    velocity = effective_velocity(traj)
    period = radial_period(traj)
    if cfg["output"] is not None:
        stride = max(1, cfg["stride"])
        rows = trajectory_rows(traj)[::stride]
        _emit(render_csv(TRAJECTORY_HEADER, rows), cfg["output"])
    results = {
        "energy": float(traj.energy[0]),
        "sigma": float(traj.sigma[0]),
        "c": float(traj.c_invariant[0]),
        "energy_drift": traj.energy_drift,
        "sigma_drift": traj.sigma_drift,
        "c_drift": traj.c_drift,
        "radial_period": period.value,
        "period_spread": period.spread,
        "vz_formula": velocity.formula,
        "vz_fit": velocity.fit,
        "vz_bound": velocity.bound,
    }
    drift = max(traj.energy_drift, traj.sigma_drift, traj.c_drift)
    deviation = abs(velocity.formula - velocity.fit) / max(abs(velocity.fit), 1e-6)
    checks = [
        _check("invariant-drift", drift, "<= 1e-8", drift <= 1e-8),
        _check("vz-agreement", deviation, "<= 1%", deviation <= 0.01),
        _check("vz-bound", max(abs(velocity.formula), abs(velocity.fit)),
               f"<= {velocity.bound}",
               max(abs(velocity.formula), abs(velocity.fit)) <= velocity.bound),
    ]
    _report(cfg, results, checks, cfg["summary"])
    return 0


def cmd_current(cfg: dict) -> int:
    window = SpectralWindow(*cfg["window"])
    n, step = cfg["n"], cfg["step"]
    meeting = bands_meeting_window(n, window, cfg["edge_m_max"], step=step)
    p = meeting.band_indices[0]
    spans = [meeting.preimages[(m, p)] for m in range(cfg["edge_m_max"] + 1)]
    lo = min(s[0] for s in spans) - 0.5
    hi = max(s[1] for s in spans) + 0.5
    xi_grid = np.linspace(lo, hi, 480)
    intervals = int(np.ceil((hi + 10.0) / step))
    grid = Grid(intervals * step, intervals)
    curves = sweep(
        n, range(cfg["edge_m_max"] + 1), [p], xi_grid, grid, workers=cfg["workers"]
    )
    packet = synthesize_state(
        n, window, [(m, 1, p) for m in range(cfg["edge_m_max"] + 1)], step=step
    )
    edge_report = current_functional(packet, curves)
    c_minus = edge_bound(packet, curves)

    bulk = bulk_decay_study(n, window, cfg["cutoffs"], step=step)
    mags = np.abs(bulk.normalized_current)
    witness_m, witness_value = witness_small_current(
        n, window, cfg["epsilon"], step=1.0 / 60.0
    )

    results = {
        "edge": {
            "normalized_current": edge_report.normalized,
            "c_minus": c_minus,
            "contributions": {
                f"m={m},j={j},p={q}": v
                for (m, j, q), v in edge_report.contributions.items()
            },
        },
        "bulk": {
            "cutoffs": bulk.m_cut,
            "coupling": bulk.coupling,
            "normalized_current": bulk.normalized_current,
            "slope": bulk.slope,
            "slope_stderr": bulk.slope_err,
        },
        "witness": {"m": witness_m, "normalized_current": witness_value},
    }
    checks = [
        _check("edge-lower-bound", abs(edge_report.normalized),
               f">= C- = {c_minus}", abs(edge_report.normalized) >= c_minus > 0),
        _check("bulk-decreasing", float(np.max(np.diff(mags))), "< 0",
               bool(np.all(np.diff(mags) < 0))),
        _check("bulk-slope", bulk.slope, "-0.5 +/- 0.15",
               abs(bulk.slope + 0.5) <= 0.15),
        _check("witness", abs(witness_value), f"<= {cfg['epsilon']}",
               abs(witness_value) <= cfg["epsilon"]),
    ]
    _report(cfg, results, checks, cfg["summary"])
    return 0


def cmd_convergence(cfg: dict) -> int:
    grid = Grid(cfg["radius"], cfg["intervals"])
    count = max(cfg["p"])
    entries = []
    checks = []
    for m in sorted(set(cfg["m"])):
        params = ModelParams(cfg["n"], m, cfg["xi"])
        rows = refined_values(params, grid, count)
        for p in sorted(set(cfg["p"])):
            rv = rows[p - 1]
            entries.append((m, p, cfg["xi"], rv))
            checks.append(
                _check(f"error(m={m},p={p})", rv.error, f"<= {cfg['bound']}",
                       rv.error <= cfg["bound"])
            )
    if cfg["output"] is not None:
        _emit(
            render_csv(CONVERGENCE_HEADER, convergence_rows(cfg["n"], entries)),
            cfg["output"],
        )
    results = {
        "entries": [
            {"m": m, "p": p, "xi": xi, "coarse": rv.coarse, "fine": rv.fine,
             "richardson": rv.value, "error_estimate": rv.error}
            for (m, p, xi, rv) in entries
        ]
    }
    _report(cfg, results, checks, cfg["summary"])
    return 0


def cmd_acceptance(cfg: dict) -> int:
    selected = acceptance_mod.ALL_CHECKS
    if cfg["only"]:
        prefixes = [p.strip() for p in cfg["only"].split(",") if p.strip()]
        selected = [
            (name, fn)
            for name, fn in selected
            if any(name.startswith(prefix) for prefix in prefixes)
        ]
        if not selected:
            raise ModelError(f"no acceptance check matches {cfg['only']!r}")
    results = []
    for name, fn in selected:
        result = fn()
        results.append((name, result))
        print(f"[{name}] {result.line()}")
    if cfg["summary"] is not None:
        checks = [
            {"name": name, "value": res.value, "bound": res.bound,
             "pass": res.passed, "detail": res.detail}
            for name, res in results
        ]
        _report({"only": cfg["only"]}, {}, checks, cfg["summary"])
    return 0 if all(res.passed for _, res in results) else 1


_COMMANDS = {
    "sweep": (cmd_sweep, "band-function sweep to CSV"),
    "scaling": (cmd_scaling, "high-m crossing scaling study"),
    "asym": (cmd_asym, "expansion coefficients and remainder rate"),
    "classical": (cmd_classical, "classical trajectory and drift velocity"),
    "current": (cmd_current, "edge/bulk current dichotomy"),
    "convergence": (cmd_convergence, "Richardson refinement report"),
    "acceptance": (cmd_acceptance, "run the acceptance checks"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magband",
        description="Band functions of the axisymmetric magnetic Hamiltonian.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, (_fn, blurb) in _COMMANDS.items():
        sub = subparsers.add_parser(command, help=blurb)
        sub.add_argument("--config", default=None, help="key=value config file")
        for name, (_conv, default, help_text) in _OPTIONS[command].items():
            shown = f"{help_text} (default {default})" if default is not None else help_text
            sub.add_argument(
                f"--{name.replace('_', '-')}", dest=name, default=None, help=shown
            )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command
    try:
        cfg = _resolve(command, args)
        return _COMMANDS[command][0](cfg)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def console() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console()
