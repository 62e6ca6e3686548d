"""Closed-form layer of the reduced radial model.

The full operator separates into half-line fibers

    L_m(xi) = -d^2/dr^2 + k_m / r^2 + (r - xi)^2,   r > 0,

with coupling k_m = ((2m + n - 3)^2 - 1)/4 in dimension n >= 3 and angular
number m >= 0.  Everything in this module is exact arithmetic or scalar
root-finding on the potential; no discretization happens here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, ModelError


def _validate_nm(n: int, m: int) -> None:
    if not isinstance(n, (int, np.integer)) or not isinstance(m, (int, np.integer)):
        raise ModelError(f"n and m must be integers, got n={n!r}, m={m!r}")
    if n < 3:
        raise ModelError(f"dimension n must be >= 3, got {n}")
    if m < 0:
        raise ModelError(f"angular number m must be >= 0, got {m}")


def coupling_constant(n: int, m: int) -> Fraction:
    """Coupling of the centrifugal 1/r^2 term, as an exact rational.

    Nonnegative except at (n, m) = (3, 0) where it equals -1/4 (the critical
    Hardy coupling; the operator stays bounded below).
    """
    _validate_nm(n, m)
    w = 2 * m + n - 3
    return Fraction(w * w - 1, 4)


def landau_level(p: int) -> int:
    """Threshold energy E_p = 2p - 1 of the p-th band, p >= 1."""
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ModelError(f"band index p must be an integer >= 1, got {p!r}")
    return 2 * int(p) - 1


@dataclass(frozen=True)
class ModelParams:
    """Fiber identity: dimension n, angular number m, momentum xi."""

    n: int
    m: int
    xi: float

    def __post_init__(self) -> None:
        _validate_nm(self.n, self.m)
        if not math.isfinite(self.xi):
            raise ModelError(f"momentum xi must be finite, got {self.xi!r}")

    @property
    def coupling(self) -> Fraction:
        return coupling_constant(self.n, self.m)

    @property
    def k(self) -> float:
        return float(self.coupling)


@dataclass(frozen=True)
class PotentialProfile:
    """Location and value of the potential minimum of one fiber."""

    params: ModelParams
    r_min: float
    v_min: float


def potential(params: ModelParams, r):
    """V_m(r, xi) = k_m/r^2 + (r - xi)^2 for r > 0 (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0.0):
        raise ModelError("potential is only defined for r > 0")
    out = params.k / r_arr**2 + (r_arr - params.xi) ** 2
    return out if out.ndim else float(out)


def potential_minimum(params: ModelParams) -> PotentialProfile:
    """Unique minimum of V_m over (0, inf).

    The stationarity condition V' = 0 is the quartic r^4 - xi*r^3 - k_m = 0,
    solved by Newton from max(xi, k_m^(1/4)).  From that start the iteration
    is monotone (f is increasing and convex on r > 3*xi/4), so no damping is
    needed.  Requires k_m > 0, or k_m = 0 with xi > 0 (pure parabola).
    """
    k, xi = params.k, params.xi
    if not (k > 0.0 or (k == 0.0 and xi > 0.0)):
        raise ModelError(
            f"potential has no interior minimum for k_m={k}, xi={xi}; "
            "need k_m > 0, or k_m = 0 with xi > 0"
        )
    if k == 0.0:
        return PotentialProfile(params, float(xi), 0.0)

    def f(r: float) -> float:
        return r**3 * (r - xi) - k

    r = max(xi, k**0.25)
    scale = max(1.0, k, r**4)
    for _ in range(100):
        fr = f(r)
        if abs(fr) < 1e-12:
            break
        step = fr / (r * r * (4.0 * r - 3.0 * xi))
        if abs(step) <= 4.0 * np.finfo(float).eps * abs(r):
            break  # at machine resolution; accept if the scaled residual is met
        r -= step
    if abs(f(r)) > 1e-12 * scale:
        raise ConvergenceError(
            f"potential_minimum: Newton residual {f(r):.3e} above tolerance "
            f"for k_m={k}, xi={xi}"
        )
    return PotentialProfile(params, r, potential(params, r))


def turning_points(params: ModelParams, energy: float) -> tuple[float, float]:
    """Solutions r_minus < r_plus of V_m(r) = E bracketing the well.

    Bisection on the two monotone branches on either side of r_min; the well
    I_m is the interval (r_minus, r_plus).
    """
    profile = potential_minimum(params)
    if not energy > profile.v_min:
        raise ModelError(
            f"empty well: E={energy} is not above min V = {profile.v_min}"
        )
    k, xi = params.k, params.xi
    if k == 0.0:
        # V = (r - xi)^2; the inner branch only reaches V(0+) = xi^2.
        if energy >= xi * xi:
            raise ModelError(
                f"no inner turning point: E={energy} >= V(0+)={xi * xi} at k_m=0"
            )
        root = math.sqrt(energy)
        return xi - root, xi + root

    def bisect(lo: float, hi: float, increasing: bool) -> float:
        tol = 1e-12 * max(1.0, abs(energy))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            v = potential(params, mid) - energy
            if abs(v) <= tol:
                return mid
            if (v > 0.0) == increasing:
                hi = mid
            else:
                lo = mid
        mid = 0.5 * (lo + hi)
        if abs(potential(params, mid) - energy) <= 1e-10 * max(1.0, abs(energy)):
            return mid
        raise ConvergenceError(
            f"turning point bisection stalled at r={mid} for k_m={k}, xi={xi}, E={energy}"
        )

    lo = profile.r_min
    while potential(params, lo) <= energy:
        lo *= 0.5
        if lo < 1e-300:  # unreachable for k > 0: V ~ k/r^2 near 0
            raise ConvergenceError("failed to bracket the inner turning point")
    r_minus = bisect(lo, profile.r_min, increasing=False)

    hi = profile.r_min + 1.0
    while potential(params, hi) <= energy:
        hi = profile.r_min + 2.0 * (hi - profile.r_min)
    r_plus = bisect(profile.r_min, hi, increasing=True)
    return r_minus, r_plus


def harmonic_multiplicity(n: int, m: int) -> int:
    """Dimension N_m of the degree-m spherical-harmonic space on S^(n-2).

    N_m = C(m+n-2, n-2) - C(m+n-4, n-2), with C(a, b) = 0 for a < b.
    Used by the transport layer, which works in n >= 4.
    """
    _validate_nm(n, m)
    if n < 4:
        raise ModelError(f"harmonic_multiplicity requires n >= 4, got n={n}")

    def comb0(a: int, b: int) -> int:
        return math.comb(a, b) if a >= b else 0

    return comb0(m + n - 2, n - 2) - comb0(m + n - 4, n - 2)
