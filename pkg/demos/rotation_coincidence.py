"""Three constructions, one function: the rotation example.

For a rotation by theta in (-pi/2, pi/2) the Penot-Zalinescu (A),
proximal-average (B) and Ghoussoub (C) representers all reduce to the
unified formula ``<x, x*> + q*(x* - A x)``.  This script evaluates all four
at a handful of points and prints the largest disagreement per angle.

Run:  python3 demos/rotation_coincidence.py
"""

import math

import numpy as np

from autoconj import a_rep_eval, b_rep_eval, c_rep_eval, rotation, unified_eval


def main():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-2, 2, (8, 4))
    print(f"{'theta':>8} {'max |A-U|':>11} {'max |B-U|':>11} {'max |C-U|':>11}")
    for theta in (0.0, math.pi / 6, math.pi / 3, 1.5):
        A = rotation(theta)
        gaps = np.zeros(3)
        for p in pts:
            x, xs = p[:2], p[2:]
            u = unified_eval(A, x, xs)
            vals = (a_rep_eval(A, x, xs)[0], b_rep_eval(A, x, xs)[0], c_rep_eval(A, x, xs))
            gaps = np.maximum(gaps, [abs(v - u) for v in vals])
        print(f"{theta:8.4f} {gaps[0]:11.2e} {gaps[1]:11.2e} {gaps[2]:11.2e}")

    # at x = (1, 0), x* = 0 the two quadratic pieces contribute 1/4 and 3/4
    A = rotation(math.pi / 3)
    print("\nC at ((1, 0), (0, 0)) for the 60 degree rotation:", c_rep_eval(A, [1.0, 0.0], [0.0, 0.0]))


if __name__ == "__main__":
    main()
