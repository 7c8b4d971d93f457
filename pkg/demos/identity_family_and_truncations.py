"""Many autoconjugate representers for the identity, and what truncation hides.

Part 1: every ``g`` with ``g*(-x) = g(x) >= 0`` yields an autoconjugate
representer of ``Id`` on R.  The grid oracle confirms autoconjugacy and the
extracted graph is the diagonal.

Part 2: for ``A = diag(k)`` truncated to ``n`` terms the two constructions
coincide exactly.  The quantities ``S_n = <x_n, A x_n>`` for the truncations
of ``x = (k^(-4/3))`` stay bounded, while ``A x`` is not square summable.

Run:  python3 demos/identity_family_and_truncations.py
"""

import numpy as np

from autoconj import (GridSpec, GSpec, autoconjugacy_residual, diag_truncation_reps,
                      energy_sequence_demo, extract_graph, id_family, id_family_eval)


def main():
    grid = GridSpec.cube(-3.0, 3.0, 241, 2)
    pts = np.random.default_rng(0).uniform(-1, 1, (25, 2))
    print(f"{'g':>10} {'F_g(2, 0)':>10} {'residual':>10} {'bound':>8} {'graph max|x-y|':>15}")
    for g in (GSpec("halfline"), GSpec("energy"), GSpec("power", 3.0)):
        F = id_family(g)
        rep = autoconjugacy_residual(F, grid, pts)
        G = extract_graph(F, grid, tol=0.5 * grid.step[0] ** 2)
        print(f"{str(g):>10} {float(id_family_eval(g, 2.0, 0.0)):10.4f} {rep.residual:10.2e} "
              f"{rep.bound:8.3f} {np.max(np.abs(G.x - G.xstar)):15.3f}")

    print("\ntruncated diagonal operator, n = 2, (x, x*) = ((1, 1), (1, 1)):",
          diag_truncation_reps(2, [1.0, 1.0], [1.0, 1.0]))
    print(f"\n{'n':>8} {'S_n':>10} {'tail bound':>11}")
    for n, s, tail in energy_sequence_demo(10 ** 6):
        print(f"{n:8d} {s:10.6f} {tail:11.2e}")


if __name__ == "__main__":
    main()
