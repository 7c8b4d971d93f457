"""Brute-force oracles: grid Legendre transforms, graph extraction, audits.

Everything here works by exhaustive evaluation on a tensor grid and is meant
to check closed forms at desk scale (joint dimension <= 4), not to be fast.
"""

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from .linop import INF, DimensionError

# Keeps node x query blocks around 32 MB.
_BLOCK = 4_000_000


class ImproperRestrictionError(ValueError):
    """The function is +inf on every grid node, so its grid conjugate is -inf."""


@dataclass
class BivariateFunction:
    """A map ``F(x, x*)`` on ``R^n x R^n`` with values in ``]-inf, +inf]``.

    ``evaluator`` receives arrays of shape ``(..., n)`` for ``x`` and ``x*``.
    If ``vectorized`` is false it is called one point at a time.

    ``graph_matrix`` marks ``F`` as the indicator of the graph of that
    (antisymmetric) matrix, which lets infimal convolutions collapse exactly.

    ``scalar``, if given, evaluates a single point ``(x, x*)`` of 1-D arrays and
    returns a float; the minimizers call it in tight loops.
    """

    evaluator: object
    dim: int
    label: str = ""
    vectorized: bool = True
    graph_matrix: object = field(default=None, repr=False)
    scalar: object = field(default=None, repr=False)

    def __call__(self, x, xs):
        x = np.asarray(x, dtype=float)
        xs = np.asarray(xs, dtype=float)
        if self.dim == 1:
            if x.ndim == 0:
                x = x.reshape(1)
            if xs.ndim == 0:
                xs = xs.reshape(1)
        if x.shape[-1:] != (self.dim,) or xs.shape[-1:] != (self.dim,):
            raise DimensionError(f"{self.label or 'F'} expects vectors of length {self.dim}")
        if self.scalar is not None and x.ndim == 1 and xs.ndim == 1:
            out = float(self.scalar(x, xs))
            if out == -INF or out != out:
                raise ValueError(f"{self.label or 'F'} produced -inf or nan")
            return out
        if self.vectorized:
            out = np.asarray(self.evaluator(x, xs), dtype=float)
        else:
            x, xs = np.broadcast_arrays(x, xs)
            lead = x.shape[:-1]
            flat_x = x.reshape(-1, self.dim)
            flat_s = xs.reshape(-1, self.dim)
            out = np.array([float(self.evaluator(a, b)) for a, b in zip(flat_x, flat_s)])
            out = out.reshape(lead)
        if np.any(out == -INF) or np.any(np.isnan(out)):
            raise ValueError(f"{self.label or 'F'} produced -inf or nan")
        return float(out) if out.ndim == 0 else out

    def joint(self, w):
        """Evaluate at joint vectors ``w = (x, x*)`` of length ``2n``."""
        w = np.asarray(w, dtype=float)
        return self(w[..., : self.dim], w[..., self.dim:])

    def transpose(self):
        """``F^T(x*, x) = F(x, x*)``."""
        return BivariateFunction(lambda a, b: self(b, a), self.dim, f"{self.label}^T")

    def __add__(self, c):
        """Shift by a real constant."""
        c = float(c)
        return BivariateFunction(lambda x, xs: self(x, xs) + c, self.dim, f"{self.label}+{c:g}")


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned box ``[lower, upper]`` sampled with ``points_per_axis`` nodes per axis."""

    lower: tuple
    upper: tuple
    points_per_axis: int

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi):
            raise DimensionError("lower and upper differ in length")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError("need lower < upper on every axis")
        if int(self.points_per_axis) < 3:
            raise ValueError("need at least 3 points per axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "points_per_axis", int(self.points_per_axis))

    @classmethod
    def cube(cls, lo, hi, m, ndim):
        return cls((lo,) * ndim, (hi,) * ndim, m)

    @property
    def ndim(self):
        return len(self.lower)

    @property
    def step(self):
        return (np.array(self.upper) - np.array(self.lower)) / (self.points_per_axis - 1)

    def axes(self):
        return [np.linspace(a, b, self.points_per_axis) for a, b in zip(self.lower, self.upper)]

    def nodes(self):
        """All grid nodes as an array of shape ``(m**ndim, ndim)`` in C order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=-1)

    def inner(self, fraction=0.5):
        """Mask of nodes inside the centred sub-box scaled by ``fraction``."""
        lo, hi = np.array(self.lower), np.array(self.upper)
        mid, half = 0.5 * (lo + hi), 0.5 * fraction * (hi - lo)
        nodes = self.nodes()
        return np.all(np.abs(nodes - mid) <= half + 1e-12, axis=-1)

    def contains(self, points, margin=0.0):
        p = np.atleast_2d(points)
        return np.all((p >= np.array(self.lower) + margin) & (p <= np.array(self.upper) - margin), axis=-1)


@dataclass
class Tabulation:
    """Node coordinates and values of a function on a grid."""

    grid: GridSpec
    nodes: np.ndarray
    values: np.ndarray

    @property
    def finite(self):
        return np.isfinite(self.values)


def tabulate(F, grid):
    """Evaluate ``F`` (a BivariateFunction or a plain callable on joint vectors) on every node."""
    nodes = grid.nodes()
    if isinstance(F, BivariateFunction):
        if grid.ndim != 2 * F.dim:
            raise DimensionError(f"grid has {grid.ndim} axes, F needs {2 * F.dim}")
        values = np.atleast_1d(F.joint(nodes))
    else:
        values = np.atleast_1d(np.asarray(F(nodes), dtype=float))
    if not np.any(np.isfinite(values)):
        raise ImproperRestrictionError("function is +inf on every grid node")
    return Tabulation(grid, nodes, values)


def _sup_over_nodes(nodes, values, queries):
    out = np.full(len(queries), -INF)
    if len(nodes) == 0:
        return out
    rows = max(1, _BLOCK // max(len(queries), 1))
    for i in range(0, len(nodes), rows):
        blk = nodes[i:i + rows] @ queries.T - values[i:i + rows, None]
        np.maximum(out, blk.max(axis=0), out=out)
    return out


def grid_conjugate(F, grid, query, table=None, mask=None):
    """Lower bound ``max_w <w, z> - F(w)`` of the Fenchel conjugate over grid nodes.

    Parameters
    ----------
    F : BivariateFunction or callable
        Function on the joint space; its ``+inf`` nodes are skipped.
    grid : GridSpec
    query : array_like
        One joint vector ``z`` or an array of them, shape ``(k, ndim)``.
    table : Tabulation, optional
        Reuse a previous tabulation of ``F`` on ``grid``.
    mask : ndarray of bool, optional
        Restrict the sup to a subset of nodes.

    Raises
    ------
    ImproperRestrictionError
        If ``F`` is ``+inf`` on every node.
    """
    if table is None:
        table = tabulate(F, grid)
    z = np.asarray(query, dtype=float)
    single = z.ndim == 1
    z = np.atleast_2d(z)
    if z.shape[-1] != grid.ndim:
        raise DimensionError(f"query length {z.shape[-1]} != grid dimension {grid.ndim}")
    keep = table.finite if mask is None else table.finite & mask
    out = _sup_over_nodes(table.nodes[keep], table.values[keep], z)
    return float(out[0]) if single else out


def lipschitz_estimate(table):
    """Largest finite-difference gradient norm over adjacent finite node pairs."""
    g = table.grid
    shape = (g.points_per_axis,) * g.ndim
    vals = table.values.reshape(shape)
    slopes = []
    for ax, h in enumerate(g.step):
        with np.errstate(invalid="ignore"):
            d = np.diff(vals, axis=ax)
        ok = np.isfinite(d)
        slopes.append(float(np.max(np.abs(d[ok]), initial=0.0)) / h)
    return float(np.linalg.norm(slopes))


def grid_error_bound(table, factor=10.0):
    """``factor * h * L`` with ``h`` the largest grid step and ``L`` the sampled Lipschitz bound."""
    return factor * float(np.max(table.grid.step)) * lipschitz_estimate(table)


@dataclass
class AutoconjugacyReport:
    """Outcome of comparing a grid conjugate with the transpose of ``F``.

    ``residual`` is the largest gap over test points where both sides are
    finite.  ``mismatched`` lists test points where ``F`` is ``+inf`` yet the
    grid conjugate shows no growth between the inner half box and the full
    box, i.e. no sign of being ``+inf`` itself.  ``skipped`` lists ``+inf``
    points within two grid steps of a finite node, where that test is not
    conclusive.
    """

    residual: float
    bound: float
    n_finite: int
    mismatched: list
    gaps: np.ndarray
    skipped: list = field(default_factory=list)

    @property
    def passed(self):
        return self.residual <= self.bound and not self.mismatched

    def __float__(self):
        return self.residual


def autoconjugacy_residual(F, grid, test_points, table=None, bound=None):
    """Measure ``|F^*(x*, x) - F(x, x*)|`` at test points with the grid conjugate.

    Parameters
    ----------
    F : BivariateFunction
    grid : GridSpec
        Box in the joint space; test points must lie strictly inside it.
    test_points : array_like, shape (k, 2n)
        Joint points ``(x, x*)``.
    bound : float, optional
        Pass threshold; defaults to ``grid_error_bound``.
    """
    pts = np.atleast_2d(np.asarray(test_points, dtype=float))
    if pts.size == 0:
        raise ValueError("empty test set")
    if not np.all(grid.contains(pts)):
        raise ValueError("test points must lie inside the grid box")
    if table is None:
        table = tabulate(F, grid)
    if bound is None:
        bound = grid_error_bound(table)
    n = F.dim
    swapped = np.concatenate([pts[:, n:], pts[:, :n]], axis=1)
    conj = grid_conjugate(F, grid, swapped, table=table)
    fvals = np.atleast_1d(F.joint(pts))
    both = np.isfinite(fvals)
    gaps = np.where(both, np.abs(conj - np.where(both, fvals, 0.0)), np.nan)
    mismatched, skipped = [], []
    if not np.all(both):
        mismatched, skipped = infinite_side_check(table, pts[~both], swapped[~both], conj[~both])
    residual = float(np.nanmax(gaps)) if np.any(both) else 0.0
    return AutoconjugacyReport(residual, float(bound), int(both.sum()), mismatched, gaps, skipped)


def infinite_side_check(table, points, queries, conj=None):
    """Look for evidence that the conjugate is ``+inf`` at ``queries``.

    A finite conjugate whose maximizer lies in the central half box changes
    by at most ``h L`` when the sup is widened to the full box; growth beyond
    that is read as divergence.  Points within two grid steps of a finite
    node of ``F`` sit on the domain boundary and are skipped.

    Returns
    -------
    mismatched, skipped : list of tuple
    """
    grid = table.grid
    h = float(np.max(grid.step))
    if conj is None:
        conj = grid_conjugate(None, grid, queries, table=table)
    inner = grid_conjugate(None, grid, queries, table=table, mask=grid.inner(0.5))
    grown = np.atleast_1d(conj - inner)
    threshold = grid_error_bound(table, factor=1.0)
    fin_nodes = table.nodes[table.finite]
    mismatched, skipped = [], []
    for p, g in zip(np.atleast_2d(points), grown):
        d = np.min(np.linalg.norm(fin_nodes - p, axis=1))
        if d <= 2.0 * h + 1e-12:
            skipped.append(tuple(float(v) for v in p))
        elif not g > threshold:
            mismatched.append(tuple(float(v) for v in p))
    return mismatched, skipped


@dataclass
class GraphSample:
    """Grid nodes ``(x, x*)`` where ``F(x, x*)`` is within ``tol`` of the pairing."""

    x: np.ndarray
    xstar: np.ndarray
    residual: np.ndarray
    tol: float
    step: float = 0.0

    def __len__(self):
        return len(self.residual)

    @property
    def pairs(self):
        return list(zip(self.x, self.xstar, self.residual))

    def to_csv(self, fh):
        """Write ``x..., xstar..., residual`` rows to an open text file."""
        n = self.x.shape[1] if self.x.ndim == 2 else 1
        if n == 1:
            header = ["x", "xstar", "residual"]
        else:
            header = [f"x{i + 1}" for i in range(n)] + [f"xstar{i + 1}" for i in range(n)] + ["residual"]
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for a, b, r in self.pairs:
            w.writerow([repr(float(v)) for v in itertools.chain(a, b, [r])])


def extract_graph(F, grid, tol=None, table=None):
    """Nodes with ``|F(x, x*) - <x, x*>| <= tol``.

    The default ``tol`` is the square of the smallest grid step.
    """
    if table is None:
        table = tabulate(F, grid)
    n = grid.ndim // 2
    if tol is None:
        tol = float(np.min(grid.step)) ** 2
    x, xs = table.nodes[:, :n], table.nodes[:, n:]
    res = table.values - np.einsum("ij,ij->i", x, xs)
    hit = np.isfinite(res) & (np.abs(res) <= tol)
    return GraphSample(x[hit], xs[hit], res[hit], float(tol), float(np.max(grid.step)))


@dataclass
class MonotoneAudit:
    passed: bool
    worst: float
    worst_pair: tuple


def audit_monotone(sample, tol_pair=None):
    """Check ``<x - y, x* - y*> >= -tol_pair`` over all pairs of a graph sample.

    The default ``tol_pair = 2 * sample.tol``: if ``F`` is autoconjugate, two
    points within ``tol`` of its graph satisfy the inequality with ``-2 tol``
    by Fenchel-Young applied to ``F`` and ``F^* = F^T``.
    """
    if tol_pair is None:
        tol_pair = 2.0 * sample.tol + 1e-12
    X = np.atleast_2d(np.asarray(sample.x, dtype=float))
    S = np.atleast_2d(np.asarray(sample.xstar, dtype=float))
    k = len(X)
    worst, pair = INF, (None, None)
    rows = max(1, _BLOCK // max(k, 1))
    for i in range(0, k, rows):
        dx = X[i:i + rows, None, :] - X[None, :, :]
        ds = S[i:i + rows, None, :] - S[None, :, :]
        ip = np.einsum("abi,abi->ab", dx, ds)
        # a point paired with itself says nothing
        idx = np.arange(ip.shape[0])
        ip[idx, i + idx] = INF
        j = np.unravel_index(np.argmin(ip), ip.shape)
        if ip[j] < worst:
            worst, pair = float(ip[j]), (i + int(j[0]), int(j[1]))
    if k < 2:
        worst = 0.0
    return MonotoneAudit(worst >= -tol_pair, worst, pair)


def fenchel_young_check(F, test_points, tol=1e-9):
    """True iff ``F(x, x*) >= <x, x*> - tol`` at every joint test point."""
    pts = np.atleast_2d(np.asarray(test_points, dtype=float))
    n = F.dim
    vals = np.atleast_1d(F.joint(pts))
    pair = np.einsum("ij,ij->i", pts[:, :n], pts[:, n:])
    return bool(np.all(vals >= pair - tol))


def sampled_conjugate_check(F, points, tol=1e-9):
    """Necessary condition for ``F^* = F^T`` on a finite sample.

    For every pair of sample points ``u = (x, x*)`` and ``w = (y, y*)``,
    ``F(u) + F(w) >= <x, y*> + <y, x*>``.  Works in any dimension.  Returns the
    most negative slack.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = F.dim
    vals = np.atleast_1d(F.joint(pts))
    X, S = pts[:, :n], pts[:, n:]
    cross = X @ S.T
    slack = vals[:, None] + vals[None, :] - cross - cross.T
    return float(np.min(slack))
