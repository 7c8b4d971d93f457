"""Autoconjugate representers of linear monotone operators.

Three constructions are provided for a continuous linear monotone ``A``:

``a_rep_eval``
    Penot-Zalinescu: ``inf_{y*} 1/2 F(x, x*+y*) + 1/2 F^{*T}(x, x*-y*)``.
``b_rep_eval``
    proximal average: ``inf_{y, y*} 1/2 F(x+y, x*+y*) + 1/2 F^{*T}(x-y, x*-y*)
    + 1/2|y|^2 + 1/2|y*|^2``.
``c_rep_eval``
    Ghoussoub: ``q_{A+}(x) + q_{A+}^*(x* - A_o x)`` with ``A_o`` the
    antisymmetric part.

For linear ``A`` all three equal ``<x, x*> + q_{A+}^*(x* - A x)``
(``unified_eval``).  The ``A`` and ``B`` constructions also accept a pair of
BivariateFunctions ``(F, F^{*T})`` for nonlinear operators, in which case
the infimum is computed numerically.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .fitzpatrick import fitz_eval
from .linop import (INF, LinearMonotoneOperator, _as_vectors, _scalar_or_array, as_operator,
                    pairing)
from .minimize import DEFAULT_BOX, MinimizerReport, exact_report, minimize_in_box
from .oracle import BivariateFunction, autoconjugacy_residual, sampled_conjugate_check


class RepresenterKind(enum.Enum):
    PenotZalinescu = "A"
    ProximalAverage = "B"
    Ghoussoub = "C"
    Unified = "unified"
    Indicator = "indicator"
    Separable = "separable"
    Shear = "shear"
    PartialInfConv = "partial_inf_conv"


def c_rep_eval(A, x, xs):
    """Ghoussoub representer ``q_{A+}(x) + q_{A+}^*(x* - A_o x)``."""
    A = as_operator(A)
    x = _as_vectors(x, A.dim)
    xs = _as_vectors(xs, A.dim, "x*")
    Q = A.symmetric
    s = xs - x @ A.antisymmetric.T
    return _scalar_or_array(np.asarray(Q(x)) + np.asarray(Q.conjugate(s)))


def unified_eval(A, x, xs):
    """Common value ``<x, x*> + q_{A+}^*(x* - A x)`` of all three constructions."""
    A = as_operator(A)
    x = _as_vectors(x, A.dim)
    xs = _as_vectors(xs, A.dim, "x*")
    return _scalar_or_array(np.asarray(pairing(x, xs)) + np.asarray(A.symmetric.conjugate(xs - A.apply(x))))


def _box(box, dim):
    lo, hi = DEFAULT_BOX if box is None else box
    return np.full(dim, float(lo)), np.full(dim, float(hi))


def _is_pair(source):
    return isinstance(source, tuple) and len(source) == 2 and all(
        isinstance(f, BivariateFunction) for f in source)


def a_rep_eval(source, x, xs, mode=None, box=None):
    """Penot-Zalinescu representer.

    Parameters
    ----------
    source : LinearMonotoneOperator, array_like, or (F, F_star_T)
        A linear operator (closed mode) or a pair of BivariateFunctions
        ``F`` and ``F^{*T}`` (numeric mode).
    mode : {"closed", "numeric"}, optional
        Inferred from ``source`` when omitted.
    box : (lo, hi), optional
        Search interval per coordinate of ``y*`` in numeric mode.

    Returns
    -------
    value : float
    report : MinimizerReport

    Notes
    -----
    In closed mode ``F^{*T}`` is an indicator of ``gra A`` plus a quadratic,
    so the infimum is attained at ``y* = x* - A x`` and the value is
    ``1/2 F_A(x, 2x* - A x) + q_{A+}(x)``.
    """
    if mode is None:
        mode = "numeric" if _is_pair(source) else "closed"
    if mode == "closed":
        if _is_pair(source):
            raise ValueError("closed mode needs a linear operator")
        A = as_operator(source)
        x = _as_vectors(x, A.dim)
        xs = _as_vectors(xs, A.dim, "x*")
        Ax = A.apply(x)
        val = 0.5 * np.asarray(fitz_eval(A, x, 2.0 * xs - Ax)) + np.asarray(A.symmetric(x))
        val = _scalar_or_array(val)
        return val, exact_report(xs - Ax, val)
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    if not _is_pair(source):
        raise ValueError("numeric mode needs (F, F_star_T); for linear operators F^{*T} "
                         "is a graph indicator and the closed mode is exact")
    F, FsT = source
    x = _as_vectors(x, F.dim)
    xs = _as_vectors(xs, F.dim, "x*")

    def objective(ys):
        return 0.5 * F(x, xs + ys) + 0.5 * FsT(x, xs - ys)

    lo, hi = _box(box, F.dim)
    rep = minimize_in_box(objective, lo, hi)
    return rep.objective, rep


def _b_collapsed_objective(A, x, xs):
    """Proximal-average objective over ``y`` once ``F^{*T}`` pins ``y* = x* - A(x - y)``."""
    Q = A.symmetric
    M, S, Sp = A.matrix, Q.matrix, Q.pinv

    def objective(y):
        u, v = x + y, x - y
        ystar = xs - M @ v
        s = (xs + ystar) + M.T @ u
        # 1/2 F_A(u, x*+y*) = 1/4 q^*(s); finiteness is decided once by the caller
        return 0.125 * (s @ Sp @ s) + 0.5 * (v @ S @ v) + 0.5 * (y @ y) + 0.5 * (ystar @ ystar)

    def exact(y):
        u, v = x + y, x - y
        ystar = xs - M @ v
        return (0.5 * fitz_eval(A, u, xs + ystar) + 0.5 * float(v @ (M @ v))
                + 0.5 * float(y @ y) + 0.5 * float(ystar @ ystar))

    return objective, exact


def b_rep_eval(source, x, xs, mode=None, box=None):
    """Proximal-average representer, computed by numerical minimization.

    Parameters
    ----------
    source : LinearMonotoneOperator, array_like, or (F, F_star_T)
    mode : {"collapsed", "numeric"}, optional
        ``collapsed`` (linear operators) substitutes the forced ``y*`` and
        minimizes over ``y`` in ``R^n``; ``numeric`` minimizes over ``(y, y*)``
        jointly for a pair of BivariateFunctions.
    box : (lo, hi), optional
        Per-coordinate search interval, default ``[-10, 10]``.

    Returns
    -------
    value : float
    report : MinimizerReport
    """
    if mode is None:
        mode = "numeric" if _is_pair(source) else "collapsed"
    if mode == "collapsed":
        if _is_pair(source):
            raise ValueError("collapsed mode needs a linear operator")
        A = as_operator(source)
        x = np.asarray(_as_vectors(x, A.dim), dtype=float)
        xs = np.asarray(_as_vectors(xs, A.dim, "x*"), dtype=float)
        if x.ndim != 1 or xs.ndim != 1:
            raise ValueError("b_rep_eval takes one point at a time")
        objective, exact = _b_collapsed_objective(A, x, xs)
        y0 = np.zeros(A.dim)
        if not np.isfinite(exact(y0)):
            # the F_A term is +inf for every y exactly when x* - A_o x leaves ran A+
            return INF, MinimizerReport(None, INF, 0, 0.0, flags=["empty-domain"])
        lo, hi = _box(box, A.dim)
        rep = minimize_in_box(objective, lo, hi, x0=y0)
        rep.objective = float(exact(rep.argmin))
        return rep.objective, rep
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    if not _is_pair(source):
        raise ValueError("numeric mode needs (F, F_star_T); use collapsed mode for linear operators")
    F, FsT = source
    n = F.dim
    x = _as_vectors(x, n)
    xs = _as_vectors(xs, n, "x*")

    def objective(w):
        y, ys = w[:n], w[n:]
        return (0.5 * F(x + y, xs + ys) + 0.5 * FsT(x - y, xs - ys)
                + 0.5 * float(y @ y) + 0.5 * float(ys @ ys))

    lo, hi = _box(box, 2 * n)
    rep = minimize_in_box(objective, lo, hi)
    return rep.objective, rep


def partial_inf_conv(F1, F2, x, xs, box=None):
    """``inf_{y*} F1(x, y*) + F2(x, x* - y*)``.

    If either operand is the indicator of a graph (``graph_matrix`` set) the
    infimum collapses exactly onto that graph.  Otherwise it is minimized
    numerically over ``y*`` in the search box.

    Returns
    -------
    value : float
    report : MinimizerReport
    """
    if F1.dim != F2.dim:
        raise ValueError("operands live on different spaces")
    n = F1.dim
    x = _as_vectors(x, n)
    xs = _as_vectors(xs, n, "x*")
    if F1.graph_matrix is not None:
        ys = np.asarray(F1.graph_matrix) @ x
        val = F2(x, xs - ys)
        return val, exact_report(ys, val)
    if F2.graph_matrix is not None:
        ys = xs - np.asarray(F2.graph_matrix) @ x
        val = F1(x, ys)
        return val, exact_report(ys, val)

    def objective(ys):
        return F1(x, ys) + F2(x, xs - ys)

    lo, hi = _box(box, n)
    rep = minimize_in_box(objective, lo, hi, x0=0.5 * xs)
    return rep.objective, rep


def shear_rep(F1, A2, tol=1e-12):
    """``(x, x*) -> F1(x, x* - A2 x)`` for antisymmetric ``A2``."""
    K = np.atleast_2d(np.asarray(A2, dtype=float))
    if K.shape != (F1.dim, F1.dim):
        raise ValueError(f"shear matrix must be {F1.dim}x{F1.dim}")
    if np.max(np.abs(K + K.T), initial=0.0) > tol:
        raise ValueError("shear matrix is not antisymmetric")
    graph = None if F1.graph_matrix is None else np.asarray(F1.graph_matrix) + K
    return BivariateFunction(lambda x, xs: F1(x, xs - x @ K.T), F1.dim,
                             f"shear({F1.label})", graph_matrix=graph)


# -- BivariateFunction factories ---------------------------------------------

def c_representer(A):
    A = as_operator(A)
    graph = A.antisymmetric if A.symmetric.rank == 0 else None
    return BivariateFunction(lambda x, xs: c_rep_eval(A, x, xs), A.dim, "C_A", graph_matrix=graph)


def unified_representer(A):
    A = as_operator(A)
    return BivariateFunction(lambda x, xs: unified_eval(A, x, xs), A.dim, "unified_A")


def a_representer(A):
    A = as_operator(A)
    return BivariateFunction(lambda x, xs: a_rep_eval(A, x, xs)[0], A.dim, "A_A")


def graph_indicator(K):
    """Indicator of ``gra K`` for an antisymmetric matrix ``K``."""
    K = np.atleast_2d(np.asarray(K, dtype=float))
    op = LinearMonotoneOperator(K)
    return BivariateFunction(lambda x, xs: c_rep_eval(op, x, xs), K.shape[0],
                             "indicator_gra", graph_matrix=K)


def separable(f, fstar, label="f+f*"):
    """``f (+) f^*``: the representer of a subdifferential (scalar callables, n = 1)."""
    def ev(x, xs):
        x, xs = np.broadcast_arrays(np.asarray(x, float)[..., 0], np.asarray(xs, float)[..., 0])
        return np.asarray(f(x), dtype=float) + np.asarray(fstar(xs), dtype=float)
    return BivariateFunction(ev, 1, label)


# -- identities ------------------------------------------------------------------

def _rel_gap(a, b):
    a, b = float(a), float(b)
    if np.isinf(a) or np.isinf(b):
        return 0.0 if a == b else INF
    return abs(a - b) / (1.0 + abs(b))


def sum_identity_gaps(A, B, points, box=None):
    """Relative gaps between ``C_A (box) C_B`` and ``C_{A+B}`` at joint points."""
    A, B = as_operator(A), as_operator(B)
    n = A.dim
    FA, FB = c_representer(A), c_representer(B)
    AB = LinearMonotoneOperator(A.matrix + B.matrix)
    gaps = []
    for p in np.atleast_2d(points):
        x, xs = p[:n], p[n:]
        conv, _ = partial_inf_conv(FB, FA, x, xs, box=box)
        gaps.append(_rel_gap(conv, c_rep_eval(AB, x, xs)))
    return np.array(gaps)


def ghoussoub_sum_identity(A, B, points, tol=1e-6, box=None):
    """True iff ``min_{y*} C_A(x, x*-y*) + C_B(x, y*) = C_{A+B}(x, x*)`` at every point.

    Agreement is measured as ``|lhs - rhs| <= tol (1 + |rhs|)``; two infinite
    values agree.
    """
    A, B = as_operator(A), as_operator(B)
    if A.dim != B.dim:
        raise ValueError("operators differ in dimension")
    return bool(np.all(sum_identity_gaps(A, B, points, box) <= tol))


@dataclass
class SymmetryVerdict:
    """Per-condition outcome of the symmetric-operator characterization.

    ``autoconjugate`` is a sampled necessary condition (plus the grid
    oracle for ``n = 1`` when a grid is given), not a proof.
    """

    autoconjugate: bool
    zero_at_origin: bool
    swap_symmetric: bool
    origin_value: float
    worst_swap_gap: float
    worst_conjugate_slack: float

    @property
    def passed(self):
        return self.autoconjugate and self.zero_at_origin and self.swap_symmetric

    def failures(self):
        names = ("autoconjugate", "zero_at_origin", "swap_symmetric")
        return [k for k in names if not getattr(self, k)]


def hoe_symmetry_check(A, F, pairs, tol=1e-9, grid=None):
    """Test ``F`` against the conditions characterizing ``C_A`` for symmetric ``A``.

    Checks ``F(0, 0) = 0``, ``F(x, A y) = F(y, A x)`` on the given ``(x, y)``
    pairs (array of shape ``(k, 2n)``), and a sampled autoconjugacy condition.

    Parameters
    ----------
    A : array_like or LinearMonotoneOperator
        Symmetric monotone operator.
    F : BivariateFunction
    pairs : array_like, shape (k, 2n)
    tol : float
        Absolute tolerance, scaled by ``1 + |value|`` for the swap test.
    grid : GridSpec, optional
        For ``n = 1``, also run the grid autoconjugacy oracle on this box.
    """
    A = as_operator(A)
    M = A.matrix
    if np.max(np.abs(M - M.T)) > 1e-12 * (1.0 + np.max(np.abs(M))):
        raise ValueError("operator is not symmetric")
    n = A.dim
    P = np.atleast_2d(np.asarray(pairs, dtype=float))
    X, Y = P[:, :n], P[:, n:]
    AX, AY = X @ M.T, Y @ M.T
    lhs = np.atleast_1d(F(X, AY))
    rhs = np.atleast_1d(F(Y, AX))
    both_inf = np.isinf(lhs) & np.isinf(rhs)
    gap = np.where(both_inf, 0.0, np.abs(lhs - rhs) / (1.0 + np.abs(np.where(np.isfinite(rhs), rhs, 0.0))))
    gap = np.nan_to_num(gap, nan=INF)
    worst_gap = float(np.max(gap, initial=0.0))
    origin = float(F(np.zeros(n), np.zeros(n)))
    sample = np.concatenate([np.hstack([X, AY]), np.hstack([Y, AX]), P], axis=0)
    slack = sampled_conjugate_check(F, sample)
    auto = slack >= -tol * (1.0 + np.max(np.abs(sample)) ** 2)
    if grid is not None and n == 1:
        lo, hi = np.array(grid.lower), np.array(grid.upper)
        inside = sample[np.all(np.abs(sample - 0.5 * (lo + hi)) <= 0.25 * (hi - lo), axis=1)]
        if len(inside):
            auto = auto and autoconjugacy_residual(F, grid, inside).passed
    return SymmetryVerdict(bool(auto), abs(origin) <= tol, worst_gap <= tol, origin, worst_gap, slack)
