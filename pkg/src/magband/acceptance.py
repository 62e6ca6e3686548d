"""End-to-end acceptance suite: thirteen numbered checks, one verdict each.

Every check re-derives its expected numbers from an independent route
(closed-form spectra, dense-matrix recursions, conservation laws, regression
targets) and compares the package's output at a stated tolerance.  The runner
reports one line per check; nothing here mutates package state.

Check 7 (high-frequency window [1.0, 1.1]) fails by design of the model: the
band value at xi = -10 is bounded below by the minimum of the potential,
which already exceeds 1.1 * xi^2 for the smallest coupling in the family (see
the check's detail string for the measured numbers).  The window is kept at
its stated value rather than loosened; the check runs and reports honestly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .asymptotics import (
    evaluate_expansion,
    exponential_gap_check,
    expansion_coefficients,
    remainder_rate,
)
from .bands import (
    BandCurve,
    _crossing_grid,
    agmon_norm,
    agmon_weight,
    crossing,
    scaling_study,
    sweep,
)
from .classical import ClassicalState, effective_velocity, integrate
from .errors import AgmonOverflowError
from .model import ModelParams, coupling_constant, landau_level
from .solver import (
    Grid,
    derivative_boundary_form,
    derivative_feynman_hellmann,
    boundary_exponent,
    fiber_eigenvalues,
    refined_values,
    solve_fiber,
)
from .tables import render_csv, sweep_rows
from .transport import (
    SpectralWindow,
    bands_meeting_window,
    bulk_decay_study,
    current,
    edge_bound,
    synthesize_state,
    witness_small_current,
)

_WORKERS = min(4, os.cpu_count() or 1)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: str
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name}: value {self.value:.6g} vs {self.bound}"
        if self.detail:
            text += f" ({self.detail})"
        return text


def check_exact_spectrum() -> CheckResult:
    """1. Richardson-refined xi=0 eigenvalues against the closed form."""
    worst = 0.0
    where = ""
    grid = Grid(12.0, 4800)
    for n, m in [(4, 0), (5, 0), (5, 2), (3, 1)]:
        rows = refined_values(ModelParams(n, m, 0.0), grid, 3)
        for p in (1, 2, 3):
            exact = 4.0 * (p - 1) + abs(2 * m + n - 3) + 2.0
            rel = abs(rows[p - 1].value - exact) / exact
            if rel > worst:
                worst, where = rel, f"(n={n}, m={m}, p={p})"
    return CheckResult(
        "exact-spectrum oracle",
        worst <= 1e-4,
        worst,
        "relative error <= 1e-4",
        f"worst at {where}",
    )


def check_band_structure() -> CheckResult:
    """2. n=5 family: decrease, threshold gap, and the tail bound at xi=6."""
    grid = Grid(20.0, 4800)
    xi = -1.0 + 0.05 * np.arange(141)
    curves = sweep(5, range(7), (1, 2, 3), xi, grid, workers=_WORKERS)
    max_diff = max(float(np.max(np.diff(c.values))) for c in curves)
    min_gap = min(
        float(np.min(c.values - landau_level(c.p))) for c in curves
    )
    tail_ok = True
    tail_detail = ""
    for c in curves:
        if c.p != 1:
            continue
        k = float(coupling_constant(5, c.m))
        tail = float(c.values[-1] - 1.0)
        if tail > 1.5 * k / 36.0:
            tail_ok = False
            tail_detail = f"m={c.m}: tail {tail:.4g} > {1.5 * k / 36.0:.4g}"
    passed = (max_diff < 1e-8) and (min_gap > 0.0) and tail_ok
    return CheckResult(
        "band-family structure",
        passed,
        max_diff,
        "diffs < 1e-8, lambda > E_p, tail <= 1.5 k/36",
        tail_detail or f"min gap above threshold {min_gap:.3g}",
    )


def _dense_alphas(p: int, k: float, order: int, size: int) -> np.ndarray:
    """Independent recursion: dense matrices and linear solves, no ladders."""
    idx = np.arange(1, size)
    s = np.zeros((size, size))
    s[idx - 1, idx] = s[idx, idx - 1] = np.sqrt(idx / 2.0)
    h0 = np.diag(2.0 * np.arange(1, size + 1) - 1.0)
    e_p = np.zeros(size)
    e_p[p - 1] = 1.0

    def a_op(q):
        if q == 1:
            return np.zeros((size, size))
        return (q - 1) * np.linalg.matrix_power(-s, q - 2)

    shifted = h0 - (2.0 * p - 1.0) * np.eye(size)
    shifted_mod = shifted.copy()
    shifted_mod[p - 1, p - 1] = 1.0  # pin the kernel slot

    g = [e_p]
    alphas = np.zeros(order)
    for q0 in range(1, order + 1):
        vec = a_op(q0) @ g[0]
        for q in range(1, q0):
            vec = vec + a_op(q) @ g[q0 - q] - alphas[q - 1] * g[q0 - q]
        alphas[q0 - 1] = float(e_p @ vec)
        rhs = k * (vec - alphas[q0 - 1] * e_p)
        rhs[p - 1] = 0.0
        sol = np.linalg.solve(shifted_mod, -rhs)
        sol[p - 1] = 0.0
        g.append(sol)
    return alphas


def check_expansion_coefficients() -> CheckResult:
    """3. alpha_1..alpha_4 exact values and the dense-matrix cross-check."""
    worst = 0.0
    where = ""
    for p in (1, 2, 3):
        e_p = float(landau_level(p))
        for k in (0.75, 8.75):
            got = expansion_coefficients(p, k, 4, p + 8).alphas
            reference = _dense_alphas(p, k, 4, p + 16)
            exact = np.array([0.0, 1.0, 0.0, 1.5 * e_p])
            errs = {
                "alpha1": abs(got[0]) / 1e-12,
                "alpha2": abs(got[1] - 1.0) / 1e-12,
                "alpha3": abs(got[2]) / 1e-10,
                "alpha4": abs(got[3] - 1.5 * e_p) / 1e-10,
                "dense": float(np.max(np.abs(got - reference))) / 1e-10,
                "dense-exact": float(np.max(np.abs(reference - exact))) / 1e-10,
            }
            for label, ratio in errs.items():
                if ratio > worst:
                    worst, where = ratio, f"{label} at (p={p}, k={k})"
    return CheckResult(
        "expansion coefficients",
        worst <= 1.0,
        worst,
        "all errors within stated tolerances (ratio <= 1)",
        f"worst ratio from {where}",
    )


def check_leading_asymptotics() -> CheckResult:
    """4. k/xi^2 leading term at xi=15 and the N=2 remainder rate."""
    k = float(coupling_constant(5, 1))
    xi = 8.0 + 0.5 * np.arange(15)
    grid = Grid(30.0, 7200)
    fine = grid.refined()
    values, errors, slopes_fh, slopes_bd = [], [], [], []
    for x in xi:
        params = ModelParams(5, 1, float(x))
        rv = refined_values(params, grid, 1)[0]
        values.append(rv.value)
        errors.append(rv.error)
        pair = solve_fiber(params, fine, 1)[0]
        slopes_fh.append(derivative_feynman_hellmann(params, pair, fine))
        slopes_bd.append(derivative_boundary_form(params, pair, fine))
    band = BandCurve(
        5, 1, 1, xi, np.array(values), np.array(slopes_fh), np.array(slopes_bd)
    )
    ratio = 15.0**2 * (band.values[-1] - 1.0) / k
    coeffs = expansion_coefficients(1, k, 2, 16)
    report = remainder_rate(band, coeffs, (8.0, 15.0), noise_floor=max(errors))
    passed = (
        0.9 <= ratio <= 1.1
        and not report.indeterminate
        and report.slope is not None
        and report.slope <= -2.5
    )
    return CheckResult(
        "leading-order asymptotics",
        passed,
        ratio,
        "ratio in [0.9, 1.1]; N=2 slope <= -2.5",
        f"remainder slope {report.slope if report.slope is not None else 'n/a'}",
    )


def check_derivative_cross_validation() -> CheckResult:
    """5. FH vs boundary form (1%) and vs centered differences (0.1%)."""
    rng = np.random.default_rng(20260822)
    grid = Grid(20.0, 4800)
    delta = 1e-4
    worst_bd = 0.0
    worst_cd = 0.0
    for _ in range(20):
        m = int(rng.integers(0, 7))
        p = int(rng.integers(1, 4))
        x = float(rng.uniform(0.0, 5.0))
        params = ModelParams(5, m, x)
        pair = solve_fiber(params, grid, p)[p - 1]
        fh = derivative_feynman_hellmann(params, pair, grid)
        bd = derivative_boundary_form(params, pair, grid)
        lo = fiber_eigenvalues(ModelParams(5, m, x - delta), grid, p)[p - 1]
        hi = fiber_eigenvalues(ModelParams(5, m, x + delta), grid, p)[p - 1]
        cd = (hi - lo) / (2.0 * delta)
        worst_bd = max(worst_bd, abs(fh - bd) / abs(fh))
        worst_cd = max(worst_cd, abs(fh - cd) / abs(fh))
    passed = worst_bd <= 0.01 and worst_cd <= 0.001
    return CheckResult(
        "derivative cross-validation",
        passed,
        worst_bd,
        "boundary <= 1%, centered diff <= 0.1%",
        f"worst centered-diff deviation {worst_cd:.3e}",
    )


def check_boundary_exponent() -> CheckResult:
    """6. Fitted vanishing exponent against (1 + |2m+n-3|)/2."""
    worst = 0.0
    where = ""
    grid = Grid(16.0, 8000)
    for n, m in [(4, 0), (5, 1), (5, 3)]:
        params = ModelParams(n, m, 1.5)
        pair = solve_fiber(params, grid, 1)[0]
        nu_fit = boundary_exponent(params, pair, grid, 40)
        nu = 0.5 * (1.0 + abs(2 * m + n - 3))
        rel = abs(nu_fit - nu) / nu
        if rel > worst:
            worst, where = rel, f"(n={n}, m={m}): fit {nu_fit:.4f} vs {nu}"
    return CheckResult(
        "boundary exponent",
        worst <= 0.05,
        worst,
        "relative error <= 5%",
        where,
    )


def check_high_frequency() -> CheckResult:
    """7. lambda(-10)/xi^2 against the window [1.0, 1.1].

    The window is unattainable: lambda >= min V by the variational principle,
    and min V at xi=-10 already exceeds 110 for every (m, p) here (112.8 at
    the most favorable m=0).  Reported honestly; see the module docstring.
    """
    grid = Grid(12.0, 4800)
    ratios = []
    for m in range(4):
        rows = refined_values(ModelParams(5, m, -10.0), grid, 2)
        ratios.extend(rows[p - 1].value / 100.0 for p in (1, 2))
    lo, hi = min(ratios), max(ratios)
    passed = 1.0 <= lo and hi <= 1.1
    return CheckResult(
        "high-frequency window",
        passed,
        hi,
        "lambda/xi^2 in [1.0, 1.1]",
        f"measured range [{lo:.4f}, {hi:.4f}]",
    )


def check_scaling_laws() -> CheckResult:
    """8. xi_m ~ sqrt(k_m) and |lambda'| ~ 1/sqrt(k_m) over m = 5..40."""
    study = scaling_study(5, 1, 2.0, range(5, 41))
    r1 = float(np.max(study.xi_over_sqrtk) / np.min(study.xi_over_sqrtk))
    r2 = float(np.max(study.slope_times_sqrtk) / np.min(study.slope_times_sqrtk))
    passed = (
        abs(study.xi_regression - 0.5) <= 0.05
        and abs(study.slope_regression + 0.5) <= 0.1
        and r1 <= 2.0
        and r2 <= 3.0
    )
    return CheckResult(
        "scaling laws",
        passed,
        study.xi_regression,
        "slopes 0.5 +/- 0.05 and -0.5 +/- 0.1; ratio spreads <= 2, <= 3",
        f"slope(|lambda'|) {study.slope_regression:.4f}, spreads {r1:.3f}/{r2:.3f}",
    )


def check_agmon_uniformity() -> CheckResult:
    """9. Weighted norms stay uniformly bounded across m = 10..40."""
    norms = []
    try:
        for m in range(10, 41):
            result = crossing(5, m, 1, 2.0)
            grid = _crossing_grid(12.0, 1.0 / 240.0, result.xi)
            params = ModelParams(5, m, result.xi)
            pair = solve_fiber(params, grid, 1)[0]
            weight = agmon_weight(params, 2.0, grid, alpha=2.0)
            norms.append(agmon_norm(pair, weight, grid))
    except AgmonOverflowError as exc:
        return CheckResult(
            "Agmon uniformity", False, float("inf"), "max <= 4x median", str(exc)
        )
    norms = np.array(norms)
    ratio = float(np.max(norms) / np.median(norms))
    passed = bool(np.all(np.isfinite(norms))) and ratio <= 4.0
    return CheckResult(
        "Agmon uniformity",
        passed,
        ratio,
        "all finite, max <= 4x median",
        f"norms in [{np.min(norms):.4g}, {np.max(norms):.4g}]",
    )


def check_exponential_regime() -> CheckResult:
    """10. k=0 gap closes like xi e^{-xi^2}: profile flat within 2x."""
    xi = 2.5 + 0.1 * np.arange(11)
    grid = Grid(12.0, 4800)
    fine = grid.refined()
    values, errors, slopes_fh, slopes_bd = [], [], [], []
    for x in xi:
        params = ModelParams(4, 0, float(x))
        rv = refined_values(params, grid, 1)[0]
        values.append(rv.value)
        errors.append(rv.error)
        pair = solve_fiber(params, fine, 1)[0]
        slopes_fh.append(derivative_feynman_hellmann(params, pair, fine))
        slopes_bd.append(derivative_boundary_form(params, pair, fine))
    band = BandCurve(
        4, 0, 1, xi, np.array(values), np.array(slopes_fh), np.array(slopes_bd)
    )
    report = exponential_gap_check(band, 1, (2.5, 3.5), error_estimate=max(errors))
    passed = report.positive and not report.indeterminate and report.ratio <= 2.0
    return CheckResult(
        "exponential gap regime",
        passed,
        report.ratio if np.isfinite(report.ratio) else float("inf"),
        "gap > 0, profile max/min <= 2, error < 10% of gap",
        f"gap range [{np.min(report.gap):.3e}, {np.max(report.gap):.3e}]",
    )


def check_classical_dynamics() -> CheckResult:
    """11. Invariant drifts, v_z cross-validation, and the kinematic bound."""
    rng = np.random.default_rng(1618)
    worst_drift = 0.0
    worst_vz = 0.0
    bound_ok = True
    for _ in range(5):
        r0 = float(rng.uniform(0.8, 1.6))
        while True:
            vx, vy, vz = (float(v) for v in rng.uniform(-0.8, 0.8, size=3))
            if r0 * abs(vy) >= 0.2:
                break
        traj = integrate(ClassicalState(r0, 0.0, 0.0, vx, vy, vz), 200.0, 1e-3)
        worst_drift = max(
            worst_drift, traj.energy_drift, traj.sigma_drift, traj.c_drift
        )
        report = effective_velocity(traj)
        scale = max(abs(report.fit), 1e-6)
        worst_vz = max(worst_vz, abs(report.formula - report.fit) / scale)
        if max(abs(report.formula), abs(report.fit)) > report.bound:
            bound_ok = False
    passed = worst_drift <= 1e-8 and worst_vz <= 0.01 and bound_ok
    return CheckResult(
        "classical dynamics",
        passed,
        worst_drift,
        "drifts <= 1e-8, |formula - fit| <= 1%, |v_z| <= E^1.5/|sigma|",
        f"worst v_z deviation {worst_vz:.3e}",
    )


def check_current_dichotomy() -> CheckResult:
    """12. Edge lower bound, bulk 1/sqrt(k) decay, and a small-current witness."""
    window = SpectralWindow(1.5, 2.5)
    step = 1.0 / 120.0
    meeting = bands_meeting_window(5, window, 3, step=step)
    spans = [meeting.preimages[(m, 1)] for m in range(4)]
    lo = min(s[0] for s in spans) - 0.5
    hi = max(s[1] for s in spans) + 0.5
    xi_grid = np.linspace(lo, hi, 480)
    intervals = int(np.ceil((hi + 10.0) / step))
    grid = Grid(intervals * step, intervals)
    curves = sweep(5, range(4), [1], xi_grid, grid, workers=_WORKERS)
    packet = synthesize_state(5, window, [(m, 1, 1) for m in range(4)], step=step)
    edge_current = current(packet, curves).normalized
    c_minus = edge_bound(packet, curves)

    bulk = bulk_decay_study(5, window, [10, 20, 30], step=step)
    mags = np.abs(bulk.normalized_current)
    witness_m, witness_value = witness_small_current(
        5, window, 1e-2, m_start=8, step=1.0 / 60.0
    )

    passed = (
        c_minus > 0.0
        and abs(edge_current) >= c_minus
        and bool(np.all(np.diff(mags) < 0.0))
        and abs(bulk.slope + 0.5) <= 0.15
        and abs(witness_value) <= 1e-2
    )
    return CheckResult(
        "current dichotomy",
        passed,
        abs(edge_current),
        f"edge >= C-={c_minus:.4g}; bulk decreasing, slope -0.5 +/- 0.15; witness <= 1e-2",
        f"bulk slope {bulk.slope:.4f}; witness m={witness_m}, |J|={abs(witness_value):.3e}",
    )


def check_determinism() -> CheckResult:
    """13. Sweep CSV bytes do not depend on the worker count."""
    grid = Grid(12.0, 2880)
    xi = -1.0 + 0.25 * np.arange(17)
    outputs = []
    for workers in (1, 4, 8):
        curves = sweep(5, range(3), (1, 2), xi, grid, workers=workers)
        outputs.append(render_csv(
            ("n", "m", "p", "xi", "lambda", "lambda_prime_fh", "lambda_prime_bd"),
            sweep_rows(curves),
        ).encode())
    passed = outputs[0] == outputs[1] == outputs[2]
    return CheckResult(
        "worker determinism",
        passed,
        float(len(outputs[0])),
        "byte-identical CSV for workers 1, 4, 8",
        f"{len(outputs[0])} bytes",
    )


ALL_CHECKS = [
    ("01-exact-spectrum", check_exact_spectrum),
    ("02-band-structure", check_band_structure),
    ("03-expansion-coefficients", check_expansion_coefficients),
    ("04-leading-asymptotics", check_leading_asymptotics),
    ("05-derivative-cross-validation", check_derivative_cross_validation),
    ("06-boundary-exponent", check_boundary_exponent),
    ("07-high-frequency", check_high_frequency),
    ("08-scaling-laws", check_scaling_laws),
    ("09-agmon-uniformity", check_agmon_uniformity),
    ("10-exponential-regime", check_exponential_regime),
    ("11-classical-dynamics", check_classical_dynamics),
    ("12-current-dichotomy", check_current_dichotomy),
    ("13-determinism", check_determinism),
]


def run_all() -> list[CheckResult]:
    return [fn() for _, fn in ALL_CHECKS]
