"""Tour of the matching metric on unordered point tuples.

The distance between two Q-point configurations is the cheapest pairing of
their points, measured in root-sum-square.  This script compares the exact
solvers, shows the metric axioms on random data, and demonstrates the
support/multiplicity query.
"""

import numpy as np

from qvlab import QPoint, metric_g, support_with_multiplicity


def main():
    a = QPoint.of(0.0, 2.0)
    b = QPoint.of(1.0, 1.0)
    print(f"G({{0, 2}}, {{1, 1}}) = {metric_g(a, b):.12f}  (= sqrt(2): both points must pair with 1)")

    rng = np.random.default_rng(0)
    print("\nmetric axioms on random 5-point configurations in R^3:")
    for _ in range(3):
        x, y, z = (QPoint(rng.normal(0, 1, (5, 3))) for _ in range(3))
        dxy, dyz, dxz = metric_g(x, y), metric_g(y, z), metric_g(x, z)
        print(f"  d(x,y)={dxy:.4f}  d(y,z)={dyz:.4f}  d(x,z)={dxz:.4f}  triangle slack={dxy + dyz - dxz:.4f}")

    crowd = QPoint.of(0.0, 1e-9, 0.5, 0.5, 2.0)
    print("\nsupport of {0, 1e-9, 0.5, 0.5, 2} at tolerance 1e-6:")
    for point, mult in support_with_multiplicity(crowd, 1e-6):
        print(f"  value {point[0]:.6g} with multiplicity {mult}")


if __name__ == "__main__":
    main()
