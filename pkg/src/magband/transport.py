"""Wave packets in the band representation and their axial current.

A state localized in energy decomposes over band modes (m, j, p); the current
functional is diagonal there, with density lambda'_{m,p}(xi) |phi(xi)|^2.  On
decreasing bands every contribution is negative, bounded away from zero for
low m (edge transport) and O(1/sqrt(k_m)) for high m (bulk suppression) —
both regimes are evaluated here by direct quadrature against solved bands.

Everything assumes n >= 4, where no band attains its threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, floor

import numpy as np

from .bands import _loglog_slope, crossing, sweep
from .errors import ConvergenceError, MissingBandDataError, ModelError
from .model import coupling_constant, harmonic_multiplicity
from .solver import Grid


@dataclass(frozen=True)
class SpectralWindow:
    """Open energy interval whose closure avoids every Landau level."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ModelError("window endpoints must be finite")
        if not self.lower < self.upper:
            raise ModelError(
                f"window must satisfy lower < upper, got ({self.lower}, {self.upper})"
            )
        q_min = max(1, ceil((self.lower + 1.0) / 2.0))
        q_max = floor((self.upper + 1.0) / 2.0)
        if q_max >= q_min:
            raise ModelError(
                f"window [{self.lower}, {self.upper}] touches the Landau level "
                f"{2 * q_min - 1}; the current bounds require a gap"
            )

    def contains(self, value) -> np.ndarray:
        return (np.asarray(value) > self.lower) & (np.asarray(value) < self.upper)

    @property
    def band_indices(self) -> list[int]:
        """P_I: bands whose range meets the window, i.e. E_p < sup."""
        return [p for p in range(1, max(1, ceil((self.upper + 1.0) / 2.0))) if 2 * p - 1 < self.upper]


def _as_window(window) -> SpectralWindow:
    if isinstance(window, SpectralWindow):
        return window
    return SpectralWindow(float(window[0]), float(window[1]))


@dataclass(frozen=True)
class WindowBands:
    """For each band p meeting the window, the preimage intervals per m."""

    n: int
    window: SpectralWindow
    band_indices: list[int]
    preimages: dict  # (m, p) -> (xi_low, xi_high)


def bands_meeting_window(
    n: int,
    window,
    m_max: int,
    *,
    tolerance: float = 1e-8,
    step: float = 1.0 / 120.0,
) -> WindowBands:
    """Preimages lambda_{m,p}^{-1}(I) for all p meeting I and m <= m_max.

    On a decreasing band the preimage of (a, b) is the interval between the
    crossing at b (left end) and the crossing at a (right end).
    """
    if n < 4:
        raise ModelError(f"transport analysis requires n >= 4, got n={n}")
    win = _as_window(window)
    if not (isinstance(m_max, (int, np.integer)) and m_max >= 0):
        raise ModelError(f"m_max must be an integer >= 0, got {m_max!r}")
    preimages = {}
    for p in win.band_indices:
        for m in range(m_max + 1):
            left = crossing(n, m, p, win.upper, tolerance, step=step)
            right = crossing(n, m, p, win.lower, tolerance, step=step)
            preimages[(m, p)] = (left.xi, right.xi)
    return WindowBands(n=n, window=win, band_indices=win.band_indices, preimages=preimages)


@dataclass(frozen=True)
class Profile:
    """One sampled coefficient profile phi_{m,j,p}(xi)."""

    xi: np.ndarray
    values: np.ndarray

    @property
    def norm_squared(self) -> float:
        return float(np.trapezoid(self.values**2, self.xi))


@dataclass(frozen=True)
class WavePacket:
    """Entries (m, j, p) -> profile; norm^2 is the sum of entry norms."""

    n: int
    window: SpectralWindow
    entries: dict

    @property
    def norm_squared(self) -> float:
        return float(sum(prof.norm_squared for prof in self.entries.values()))


def synthesize_state(
    n: int,
    window,
    mode_set,
    *,
    width: float | None = None,
    samples: int = 801,
    tolerance: float = 1e-8,
    step: float = 1.0 / 120.0,
) -> WavePacket:
    """Unit-norm packet of polynomial bumps, one per requested (m, j, p) mode.

    Each bump (1 - t^2)^2 is centered in its band's preimage interval and
    shrunk slightly inside it, so the support condition holds sample by
    sample; entries share the total norm equally.
    """
    win = _as_window(window)
    if n < 4:
        raise ModelError(f"transport analysis requires n >= 4, got n={n}")
    modes = [(int(m), int(j), int(p)) for (m, j, p) in mode_set]
    if not modes:
        raise ModelError("mode set must be non-empty")
    if len(set(modes)) != len(modes):
        raise ModelError("duplicate (m, j, p) entries in mode set")
    allowed = set(win.band_indices)
    for m, j, p in modes:
        if p not in allowed:
            raise ModelError(
                f"band p={p} does not meet the window (P_I = {sorted(allowed)})"
            )
        n_m = harmonic_multiplicity(n, m)
        if not 1 <= j <= n_m:
            raise ModelError(
                f"multiplicity index j={j} outside 1..{n_m} for (n={n}, m={m})"
            )
    if samples < 16:
        raise ModelError(f"profile needs at least 16 samples, got {samples}")

    entries = {}
    share = 1.0 / len(modes)
    for m, j, p in modes:
        left = crossing(n, m, p, win.upper, tolerance, step=step)
        right = crossing(n, m, p, win.lower, tolerance, step=step)
        lo, hi = left.xi, right.xi
        if not lo < hi:
            raise ModelError(f"degenerate preimage for (m={m}, p={p})")
        center = 0.5 * (lo + hi)
        half = 0.495 * (hi - lo)
        if width is not None:
            if not 0 < width:
                raise ModelError(f"bump width must be positive, got {width!r}")
            half = min(half, 0.5 * width)
        xi = np.linspace(center - half, center + half, samples)
        t = (xi - center) / half
        values = (1.0 - t**2) ** 2
        values *= np.sqrt(share / np.trapezoid(values**2, xi))
        entries[(m, j, p)] = Profile(xi=xi, values=values)
    return WavePacket(n=n, window=win, entries=entries)


@dataclass(frozen=True)
class CurrentReport:
    """Current functional of a packet, entrywise and total."""

    total: float
    contributions: dict
    norm_squared: float

    @property
    def normalized(self) -> float:
        return self.total / self.norm_squared


def current(packet: WavePacket, bands) -> CurrentReport:
    """Quadrature of lambda' |phi|^2 per entry against sampled band data.

    Band derivatives are linearly interpolated onto each profile's grid; a
    band that is absent or does not cover a profile's support is a hard error
    naming the hole.
    """
    by_key = {(curve.m, curve.p): curve for curve in bands if curve.n == packet.n}
    contributions = {}
    for (m, j, p), prof in packet.entries.items():
        curve = by_key.get((m, p))
        if curve is None:
            raise MissingBandDataError(
                f"no band data for (m={m}, p={p}) at n={packet.n}"
            )
        if curve.xi[0] > prof.xi[0] or curve.xi[-1] < prof.xi[-1]:
            raise MissingBandDataError(
                f"band (m={m}, p={p}) covers xi in [{curve.xi[0]:.4g}, "
                f"{curve.xi[-1]:.4g}] but the profile needs "
                f"[{prof.xi[0]:.4g}, {prof.xi[-1]:.4g}]"
            )
        slope = np.interp(prof.xi, curve.xi, curve.slope_fh)
        contributions[(m, j, p)] = float(
            np.trapezoid(slope * prof.values**2, prof.xi)
        )
    total = float(sum(contributions.values()))
    return CurrentReport(
        total=total, contributions=contributions, norm_squared=packet.norm_squared
    )


def edge_bound(packet: WavePacket, bands) -> float:
    """C^- = min over the packet's bands of min |lambda'| inside the window.

    Evaluated directly on the sampled sweep data; |normalized current| of any
    unit packet supported on these bands is at least this value.
    """
    win = packet.window
    by_key = {(curve.m, curve.p): curve for curve in bands if curve.n == packet.n}
    used = sorted(set((m, p) for (m, _, p) in packet.entries))
    bounds = []
    for m, p in used:
        curve = by_key.get((m, p))
        if curve is None:
            raise MissingBandDataError(
                f"no band data for (m={m}, p={p}) at n={packet.n}"
            )
        mask = win.contains(curve.values)
        if not np.any(mask):
            raise MissingBandDataError(
                f"band (m={m}, p={p}) has no sweep samples with lambda in "
                f"({win.lower}, {win.upper})"
            )
        bounds.append(float(np.min(np.abs(curve.slope_fh[mask]))))
    return min(bounds)


def _single_mode_current(
    n: int,
    win: SpectralWindow,
    m: int,
    p: int,
    *,
    tolerance: float,
    step: float,
    samples: int,
) -> float:
    """Normalized current of the unit bump packet on one (m, 1, p) band."""
    packet = synthesize_state(
        n, win, [(m, 1, p)], tolerance=tolerance, step=step, samples=samples
    )
    prof = packet.entries[(m, 1, p)]
    pad = 0.05 * (prof.xi[-1] - prof.xi[0])
    xi_grid = np.linspace(prof.xi[0] - pad, prof.xi[-1] + pad, samples)
    radius = xi_grid[-1] + 10.0
    intervals = int(np.ceil(radius / step))
    grid = Grid(intervals * step, intervals)
    curves = sweep(n, [m], [p], xi_grid, grid)
    return current(packet, curves).normalized


@dataclass(frozen=True)
class BulkDecayStudy:
    """Single-mode currents at m = M + 1 across M, with the log-log fit."""

    n: int
    window: SpectralWindow
    p: int
    m_cut: np.ndarray
    coupling: np.ndarray
    normalized_current: np.ndarray
    slope: float
    slope_err: float


def bulk_decay_study(
    n: int,
    window,
    m_cut_list,
    *,
    tolerance: float = 1e-8,
    step: float = 1.0 / 120.0,
    samples: int = 301,
) -> BulkDecayStudy:
    """Current of the first band beyond each cutoff M, across M.

    The mode is (m = M + 1, j = 1, p = min P_I): the lowest bulk band a
    cutoff at M lets through.  The regression slope of |current| against
    k_{M+1} quantifies the 1/sqrt(k) suppression.
    """
    win = _as_window(window)
    if n < 4:
        raise ModelError(f"transport analysis requires n >= 4, got n={n}")
    cuts = [int(M) for M in m_cut_list]
    if not cuts:
        raise ModelError("cutoff list must be non-empty")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ModelError("cutoff list must be strictly increasing")
    if cuts[0] < 0:
        raise ModelError(f"cutoffs must be >= 0, got {cuts[0]}")
    if not win.band_indices:
        raise ModelError(
            f"no band meets the window ({win.lower}, {win.upper}); nothing to study"
        )
    p = win.band_indices[0]
    rows = []
    for M in cuts:
        value = _single_mode_current(
            n, win, M + 1, p, tolerance=tolerance, step=step, samples=samples
        )
        rows.append((float(coupling_constant(n, M + 1)), value))
    coupling = np.array([row[0] for row in rows])
    cur = np.array([row[1] for row in rows])
    slope, err = (
        _loglog_slope(coupling, np.abs(cur)) if len(cuts) >= 2 else (float("nan"),) * 2
    )
    return BulkDecayStudy(
        n=n,
        window=win,
        p=p,
        m_cut=np.array(cuts, dtype=int),
        coupling=coupling,
        normalized_current=cur,
        slope=slope,
        slope_err=err,
    )


def witness_small_current(
    n: int,
    window,
    epsilon: float,
    *,
    m_start: int = 8,
    m_cap: int = 4096,
    tolerance: float = 1e-8,
    step: float = 1.0 / 60.0,
    samples: int = 301,
) -> tuple[int, float]:
    """Exhibit a unit packet whose |normalized current| <= epsilon.

    Doubles the angular momentum of a single-mode packet until the current
    drops below epsilon; returns (m, normalized current).  The 1/sqrt(k_m)
    law guarantees termination for any positive epsilon.
    """
    win = _as_window(window)
    if n < 4:
        raise ModelError(f"transport analysis requires n >= 4, got n={n}")
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise ModelError(f"epsilon must be positive, got {epsilon!r}")
    if not win.band_indices:
        raise ModelError(
            f"no band meets the window ({win.lower}, {win.upper}); "
            "every packet already has zero current"
        )
    p = win.band_indices[0]
    m = int(m_start)
    while m <= m_cap:
        value = _single_mode_current(
            n, win, m, p, tolerance=tolerance, step=step, samples=samples
        )
        if abs(value) <= epsilon:
            return m, value
        m *= 2
    raise ConvergenceError(
        f"no packet with |current| <= {epsilon} found for m up to {m_cap}"
    )
