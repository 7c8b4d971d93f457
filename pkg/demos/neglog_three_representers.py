"""Three different autoconjugate representers of the subdifferential of -ln.

For ``f = -ln`` on ``(0, inf)`` the separable function ``f (+) f*``, the
Penot-Zalinescu representer and the proximal-average representer are all
autoconjugate and all represent ``x* = -1/x``, yet their domains are nested
strictly.  The script prints the three values on the slice ``x = 1`` and
the point where each becomes finite.

Run:  python3 demos/neglog_three_representers.py
"""

import numpy as np

from autoconj import b_rep_eval, neglog_domain_classify, neglog_pair, neglog_values


def fmt(v):
    return "     +inf" if np.isinf(v) else f"{v:9.4f}"


def main():
    pair = neglog_pair()
    print("slice x = 1")
    print(f"{'x*':>7} {'A (closed)':>10} {'B (numeric)':>11} {'f(+)f*':>9}")
    for xs in (-2.0, -1.0, -0.5, -1 / 3, -0.25, -0.2, -0.1):
        a = float(neglog_values("Arep", 1.0, xs))
        b, _ = b_rep_eval(pair, 1.0, xs)
        s = float(neglog_values("SepRep", 1.0, xs))
        print(f"{xs:7.3f} {fmt(a):>10} {fmt(b):>11} {fmt(s):>9}")

    print("\nall three equal the pairing on the graph: at (1, -1) they give",
          [float(neglog_values(w, 1.0, -1.0)) for w in ("Arep", "SepRep")] + [b_rep_eval(pair, 1.0, -1.0)[0]])
    print("\ndomain membership (A, B, f(+)f*):")
    for p in ((1.0, -1 / 3), (1.0, -0.2)):
        print(" ", p, tuple(bool(neglog_domain_classify(w, *p)) for w in ("Arep", "Brep", "SepRep")))


if __name__ == "__main__":
    main()
