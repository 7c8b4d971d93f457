"""Named invariant suites run by ``autoconj verify``.

Each suite returns a list of :class:`Check` records; a suite passes when
every check does.
"""

import math
from dataclasses import dataclass

import numpy as np

from .fitzpatrick import fitzpatrick_function
from .gallery import (GSpec, g_axiom_check, id_family, id_family_eval, neglog_domain_classify,
                      neglog_pair, neglog_values)
from .linop import LinearMonotoneOperator, as_operator
from .oracle import GridSpec, audit_monotone, autoconjugacy_residual, extract_graph, tabulate
from .representers import (a_rep_eval, b_rep_eval, c_rep_eval, c_representer,
                           sum_identity_gaps, unified_eval)


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: measured={self.measured:.3e} tol={self.tolerance:.3e} {self.detail}".rstrip()


def random_monotone(rng, n, rank=None, antisym_scale=2.0):
    """Random monotone matrix: PSD symmetric part of the given rank plus an antisymmetric part.

    Nonzero eigenvalues of the symmetric part are drawn from ``[0.2, 3]``.
    """
    if rank is None:
        rank = n
    Qm, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.zeros(n)
    lam[:rank] = rng.uniform(0.2, 3.0, rank)
    S = (Qm * lam) @ Qm.T
    K = rng.uniform(-antisym_scale, antisym_scale, (n, n))
    K = 0.5 * (K - K.T)
    return 0.5 * (S + S.T) + K


def random_points(rng, A, count, box=2.0, on_domain=0.5):
    """Joint points ``(x, x*)``; a fraction lands in the domain ``x* - A x in ran A+``."""
    A = as_operator(A)
    n = A.dim
    x = rng.uniform(-box, box, (count, n))
    xs = rng.uniform(-box, box, (count, n))
    k = int(round(on_domain * count))
    if A.symmetric.rank < n and k:
        z = rng.uniform(-box, box, (k, n))
        xs[:k] = x[:k] @ A.matrix.T + z @ A.symmetric.matrix.T
    return np.hstack([x, xs])


def rel_gap(a, b):
    if math.isinf(a) or math.isinf(b):
        return 0.0 if a == b else math.inf
    return abs(a - b) / (1.0 + abs(b))


def coincidence(n_values=(1, 2, 3), trials=20, points=50, seed=0):
    """The A, B, C constructions agree with the unified formula for random operators."""
    rng = np.random.default_rng(seed)
    ga = gb = gc = 0.0
    for t in range(trials):
        n = n_values[t % len(n_values)]
        rank = n if t % 4 else int(rng.integers(0, n))
        A = LinearMonotoneOperator(random_monotone(rng, n, rank))
        for p in random_points(rng, A, points):
            x, xs = p[:n], p[n:]
            u = unified_eval(A, x, xs)
            ga = max(ga, rel_gap(a_rep_eval(A, x, xs)[0], u))
            gb = max(gb, rel_gap(b_rep_eval(A, x, xs)[0], u))
            gc = max(gc, rel_gap(c_rep_eval(A, x, xs), u))
    return [
        Check("A_closed == unified", ga <= 1e-8, ga, 1e-8),
        Check("B_numeric == unified", gb <= 1e-6, gb, 1e-6),
        Check("C == unified", gc <= 1e-10, gc, 1e-10),
    ]


def _grid_for(A, lo=-3.0, hi=3.0):
    n = as_operator(A).dim
    m = 241 if n == 1 else 21
    return GridSpec.cube(lo, hi, m, 2 * n)


def autoconj(A=None, seed=0):
    """Grid-oracle autoconjugacy of ``C_A``; default ``A = Id`` on R."""
    A = as_operator(np.eye(1) if A is None else A)
    n = A.dim
    grid = _grid_for(A)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-0.75, 0.75, (25, 2 * n))
    rep = autoconjugacy_residual(c_representer(A), grid, pts)
    return [Check(f"C_A autoconjugate (n={n})", rep.passed, rep.residual, rep.bound)]


def graph(A=None):
    """Graph extraction on ``F_A`` and ``C_A`` stays on ``x* = A x``; samples are monotone."""
    A = as_operator(np.eye(1) if A is None else A)
    grid = _grid_for(A)
    h = float(np.max(grid.step))
    checks = []
    # eps-graph points are 2eps-monotone for autoconjugates; F_A only has F_A <= F_A*^T, giving 4eps
    for label, F, k in (("F_A", fitzpatrick_function(A), 4.0), ("C_A", c_representer(A), 2.0)):
        table = tabulate(F, grid)
        G = extract_graph(F, grid, table=table)
        off = float(np.max(np.linalg.norm(G.xstar - G.x @ A.matrix.T, axis=1), initial=0.0))
        audit = audit_monotone(G, tol_pair=k * G.tol + 1e-12)
        checks.append(Check(f"{label} graph within 5h", len(G) > 0 and off <= 5 * h, off, 5 * h,
                            f"({len(G)} nodes)"))
        checks.append(Check(f"{label} graph sample monotone", audit.passed, -audit.worst, k * G.tol))
    return checks


# points in the three -ln domains: (x, x*) with the expected (A, B, sep) membership
NEGLOG_WITNESSES = [
    ((1.0, -1.0), (True, True, True)),
    ((1.0, -1.0 / 3.0), (False, True, True)),
    ((1.0, -0.2), (False, False, True)),
    ((-1.0, -1.0), (False, False, False)),
    ((2.0, -0.25), (True, True, True)),
]


def neglog_domains(crosscheck=True):
    """Domain classification for the -ln representers, with strict-inclusion witnesses."""
    checks = []
    for (x, xs), want in NEGLOG_WITNESSES:
        got = tuple(bool(neglog_domain_classify(w, x, xs)) for w in ("Arep", "Brep", "SepRep"))
        checks.append(Check(f"domains at ({x:g}, {xs:g})", got == want, 0.0, 0.0, f"A,B,sep={got}"))
        if crosscheck and x > 0:
            v = neglog_domain_classify("Brep", x, xs, crosscheck=True)
            checks.append(Check(f"numeric B finiteness at ({x:g}, {xs:g})", v.numeric == v.member,
                                0.0, 0.0, f"exact={v.member} numeric={v.numeric}"))
    fitz = float(neglog_values("Fitz", 1.0, -1.0))
    checks.append(Check("Fitzpatrick(1,-1) == -1", fitz == -1.0, abs(fitz + 1.0), 0.0))
    pair = neglog_pair()
    worst = 0.0
    for x in (0.7, 1.0, 1.5, 2.5):
        for xs in (-1.0 / x, -1.5 / x, -3.0 / x):
            worst = max(worst, abs(a_rep_eval(pair, x, xs)[0] - float(neglog_values("Arep", x, xs))))
    checks.append(Check("A numeric == closed form", worst <= 1e-6, worst, 1e-6))
    return checks


IDFAM_SPECS = (GSpec("halfline"), GSpec("energy"), GSpec("power", 3.0))


def idfam():
    """Identity family: g axioms, autoconjugacy, diagonal graph, pairwise distinctness."""
    checks = []
    grid = GridSpec.cube(-3.0, 3.0, 241, 2)
    h = float(np.max(grid.step))
    rng = np.random.default_rng(1)
    pts = rng.uniform(-1.0, 1.0, (25, 2))
    pts = pts[pts[:, 0] >= pts[:, 1]]
    for g in IDFAM_SPECS:
        ax = g_axiom_check(g)
        checks.append(Check(f"g axioms ({g})", ax.passed, ax.conjugate_gap, ax.bound))
        F = id_family(g)
        table = tabulate(F, grid)
        rep = autoconjugacy_residual(F, grid, pts, table=table)
        checks.append(Check(f"F_g autoconjugate ({g})", rep.passed, rep.residual, rep.bound))
        G = extract_graph(F, grid, tol=0.5 * h * h, table=table)
        off = float(np.max(np.abs(G.x - G.xstar), initial=0.0))
        checks.append(Check(f"F_g graph diagonal ({g})", len(G) > 0 and off <= 2 * h, off, 2 * h))
    probes = np.array([[0.0, 1.0], [1.0, 0.0], [2.0, 0.0], [0.0, 2.0], [1.0, -1.0]])
    for i in range(len(IDFAM_SPECS)):
        for j in range(i + 1, len(IDFAM_SPECS)):
            gi, gj = IDFAM_SPECS[i], IDFAM_SPECS[j]
            vi = np.atleast_1d(id_family_eval(gi, probes[:, 0], probes[:, 1]))
            vj = np.atleast_1d(id_family_eval(gj, probes[:, 0], probes[:, 1]))
            d = max(rel_gap(a, b) * (1.0 + abs(b)) if math.isfinite(b) else rel_gap(a, b)
                    for a, b in zip(vi, vj))
            checks.append(Check(f"F_{gi} != F_{gj}", d > 0.1, d, 0.1))
    return checks


def sum_identity(pairs=10, points=20, seed=2):
    """``C_A (box) C_B == C_{A+B}`` for random pairs, and the shear special case."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for t in range(pairs):
        n = (1, 2, 3)[t % 3]
        A, B = random_monotone(rng, n), random_monotone(rng, n)
        pts = np.hstack([rng.uniform(-2, 2, (points, n)), rng.uniform(-2, 2, (points, n))])
        worst = max(worst, float(np.max(sum_identity_gaps(A, B, pts))))
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    pts = rng.uniform(-2, 2, (points, 4))
    shear_gap = float(np.max(sum_identity_gaps(J, np.eye(2), pts)))
    return [
        Check("C_A box C_B == C_{A+B}", worst <= 1e-6, worst, 1e-6),
        Check("antisymmetric + Id (shear case)", shear_gap <= 1e-12, shear_gap, 1e-12),
    ]


SUITES = {
    "coincidence": coincidence,
    "autoconj": autoconj,
    "graph": graph,
    "neglog-domains": neglog_domains,
    "idfam": idfam,
    "sum-identity": sum_identity,
}
