"""Measuring collision sets: box dimension and measure at scale.

The diamond refinement collides exactly on the ternary limit set, whose box
dimension is log 2 / log 3.  Swapping the removal schedule for shrinking
middle fractions leaves a collision set of positive measure.
"""

import numpy as np

from qvlab import (
    cantor_level,
    cantor_limit,
    CantorConstruction,
    dimension_report,
    fat_residual_length,
    measure_at_scale,
    scan,
)


def main():
    approx, _ = cantor_limit("diamond", 10)
    sc = scan(approx, 3**10 + 1)
    rep = dimension_report(sc, [3.0**-k for k in range(3, 10)])
    print("ternary diamond refinement, level 10, grid 3^10 + 1:")
    print(f"  occupied boxes per scale: {rep.counts.tolist()}")
    print(f"  box dimension = {rep.slope:.4f}   (log 2 / log 3 = {np.log(2) / np.log(3):.4f}, r^2 = {rep.r_squared:.5f})")

    print("\nmeasure of the flagged set's eps-neighbourhood, eps = 3^-level:")
    for level in (4, 6, 8, 10):
        s = scan(cantor_level(CantorConstruction(level, "diamond")), 3**level + 1)
        print(f"  level {level:2d}: {measure_at_scale(s, 3.0 ** -level):.5f}")
    print("  -> vanishing measure for the ternary schedule")

    fat, _ = cantor_limit("diamond", 10, schedule="fat")
    sfat = scan(fat, 4097)
    m = measure_at_scale(sfat, 0.01)
    print(f"\nfat schedule (middle 4^-k fractions): flagged measure {m:.4f}")
    print(f"analytic residual of the schedule at level 10: {fat_residual_length(10):.4f}")


if __name__ == "__main__":
    main()
