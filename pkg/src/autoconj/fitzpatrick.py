"""Fitzpatrick functions of monotone operators.

For a continuous linear monotone ``A`` the Fitzpatrick function has the
closed form ``F_A(x, x*) = 1/2 q_{A+}^*(x* + A^T x)`` and its conjugate is
``F_A^*(x*, x) = <x, A x> + indicator of gra A``.  For anything else the
only general route is the supremum over a sampled graph, which is a lower
bound.
"""

import numpy as np

from .linop import INF, RANGE_TOL, DimensionError, _as_vectors, _scalar_or_array, as_operator
from .oracle import BivariateFunction


def fitz_eval(A, x, xs):
    """Closed-form Fitzpatrick function of a linear monotone operator.

    Parameters
    ----------
    A : LinearMonotoneOperator or array_like
    x, xs : array_like
        Primal and dual points, shape ``(..., n)``.

    Returns
    -------
    float or ndarray
        ``1/2 q_{A+}^*(x* + A^T x)``; ``+inf`` when the argument leaves
        ``ran A+``.  For antisymmetric ``A`` this is the indicator of the graph.
    """
    A = as_operator(A)
    x = _as_vectors(x, A.dim)
    xs = _as_vectors(xs, A.dim, "x*")
    return _scalar_or_array(0.5 * np.asarray(A.symmetric.conjugate(xs + A.apply_adjoint(x))))


def fitz_conjugate_eval(A, xs, x):
    """``F_A^*(x*, x)``: ``<x, A x>`` if ``x* = A x`` (to ``RANGE_TOL``), else ``+inf``.

    Note the argument order, dual point first.
    """
    A = as_operator(A)
    x = _as_vectors(x, A.dim)
    xs = _as_vectors(xs, A.dim, "x*")
    Ax = A.apply(x)
    on_graph = np.linalg.norm(xs - Ax, axis=-1) <= RANGE_TOL * (1.0 + np.linalg.norm(xs, axis=-1))
    val = np.einsum("...i,...i->...", x, Ax)
    return _scalar_or_array(np.where(on_graph, val, INF))


def fitz_sampled(graph_points, x, xs):
    """Fitzpatrick lower bound from a finite graph sample.

    ``max over (y, y*) of <x, y*> + <y, x*> - <y, y*>``.

    Parameters
    ----------
    graph_points : sequence of (y, y*) pairs, or a pair of arrays ``(Y, Ys)``
        each of shape ``(k, n)``.
    x, xs : array_like, shape (n,)
    """
    if isinstance(graph_points, tuple) and len(graph_points) == 2 and np.ndim(graph_points[0]) == 2:
        Y, Ys = (np.asarray(a, dtype=float) for a in graph_points)
    else:
        pts = list(graph_points)
        if not pts:
            raise ValueError("empty graph sample")
        Y = np.array([np.atleast_1d(p[0]) for p in pts], dtype=float)
        Ys = np.array([np.atleast_1d(p[1]) for p in pts], dtype=float)
    if len(Y) == 0:
        raise ValueError("empty graph sample")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if x.shape != (Y.shape[1],) or xs.shape != (Y.shape[1],):
        raise DimensionError("point and sample dimensions differ")
    vals = Ys @ x + Y @ xs - np.einsum("ij,ij->i", Y, Ys)
    return float(vals.max())


def fitzpatrick_function(A):
    """``F_A`` as a BivariateFunction."""
    A = as_operator(A)
    return BivariateFunction(lambda x, xs: fitz_eval(A, x, xs), A.dim, "F_A")


def fitzpatrick_conjugate_transpose(A):
    """``F_A^{*T}(x, x*) = F_A^*(x*, x)`` as a BivariateFunction."""
    A = as_operator(A)
    return BivariateFunction(lambda x, xs: fitz_conjugate_eval(A, xs, x), A.dim, "F_A^*T")
