#!/usr/bin/env python3
"""Crossing locations and band slopes across angular momentum.

For a fixed energy inside the first spectral gap, tabulates xi_m and
lambda'(xi_m) for m = 5..40 and prints the fitted power laws; the columns
xi_m/sqrt(k_m) and |lambda'| sqrt(k_m) should flatten as m grows.
"""

from __future__ import annotations

from magband import scaling_study

study = scaling_study(5, 1, 2.0, range(5, 41))

print(f"{'m':>3} {'k_m':>9} {'xi_m':>9} {'slope':>11} "
      f"{'xi/sqrt(k)':>11} {'|slope|sqrt(k)':>15}")
for i, m in enumerate(study.m):
    print(f"{m:>3} {study.coupling[i]:>9.2f} {study.xi[i]:>9.4f} "
          f"{study.slope[i]:>11.3e} {study.xi_over_sqrtk[i]:>11.6f} "
          f"{study.slope_times_sqrtk[i]:>15.6f}")

print()
print(f"log-log slope of xi_m vs k_m:      "
      f"{study.xi_regression:+.4f} +/- {study.xi_regression_err:.4f}   (law: +1/2)")
print(f"log-log slope of |lambda'| vs k_m: "
      f"{study.slope_regression:+.4f} +/- {study.slope_regression_err:.4f}   (law: -1/2)")
