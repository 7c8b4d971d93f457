"""Derivative-free minimization of convex, possibly extended-valued objectives.

The representer constructions are infima of convex functions over a dual
variable.  Only attainment is guaranteed, not an algorithm, so this module
supplies a small toolkit:

* ``golden_section`` on a bracket where the objective is finite,
* ``finite_interval`` to locate the (convex, hence interval) domain of a
  1-D objective by probing and bisection,
* ``minimize_convex`` which dispatches to the 1-D routine, to nested golden
  sections in 2-D when the objective takes the value ``+inf`` inside the
  box, and to multi-start Powell otherwise,
* ``minimize_in_box`` which applies the box-boundary policy: if the argmin
  lands within ``BOUNDARY_MARGIN`` of the box, the box is doubled once and the
  search repeated before non-attainment is flagged.

Convexity of the objective is assumed throughout and not checked.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .linop import INF

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
BOUNDARY_MARGIN = 1e-3
STEP_TOL = 1e-8
DEFAULT_BOX = (-10.0, 10.0)


@dataclass
class MinimizerReport:
    """Record of one minimization.

    ``certificate`` is the final bracket width (1-D searches) or the last
    Powell step length; ``attained`` is false when the minimizer sits on the
    search-box boundary even after enlarging the box.
    """

    argmin: np.ndarray
    objective: float
    iterations: int
    certificate: float
    attained: bool = True
    box_expanded: bool = False
    flags: list = field(default_factory=list)

    def as_dict(self):
        return {
            "argmin": None if self.argmin is None else [float(v) for v in np.atleast_1d(self.argmin)],
            "objective": self.objective,
            "iterations": self.iterations,
            "certificate": self.certificate,
            "attained": self.attained,
            "flags": list(self.flags),
        }


def exact_report(argmin, value):
    """Report for a minimization solved in closed form."""
    return MinimizerReport(np.atleast_1d(np.asarray(argmin, dtype=float)), float(value), 0, 0.0)


def golden_section(fun, lo, hi, tol=1e-11, maxiter=300):
    """Golden-section search for a unimodal ``fun`` on ``[lo, hi]``.

    Returns ``(x, f(x), iterations, final_width)``; the endpoints are
    evaluated too so that a minimum on the boundary is not lost.
    """
    a, b = float(lo), float(hi)
    best_x, best_f = a, fun(a)
    fb = fun(b)
    if fb < best_f:
        best_x, best_f = b, fb
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    it = 0
    while b - a > tol * (1.0 + abs(a) + abs(b)) and it < maxiter:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = fun(d)
        it += 1
    for xv, fv in ((c, fc), (d, fd)):
        if fv < best_f:
            best_x, best_f = xv, fv
    return best_x, best_f, it, b - a


def _bisect_edge(fun, inside, outside, tol):
    # finite at `inside`, +inf at `outside`; domain is an interval
    while abs(outside - inside) > tol * (1.0 + abs(inside)):
        mid = 0.5 * (inside + outside)
        if math.isfinite(fun(mid)):
            inside = mid
        else:
            outside = mid
    return inside


def finite_interval(fun, lo, hi, levels=(41, 401, 4001), tol=1e-13):
    """Locate ``[a, b]`` inside ``[lo, hi]`` where a convex ``fun`` is finite.

    Probes uniform grids of increasing density until a finite value turns
    up, then bisects outward to both edges.  Returns ``None`` when no probe
    is finite.
    """
    for m in levels:
        ts = np.linspace(lo, hi, m)
        vals = np.array([fun(t) for t in ts])
        fin = np.flatnonzero(np.isfinite(vals))
        if len(fin):
            break
    else:
        return None
    i, j = fin[0], fin[-1]
    a = ts[i] if i == 0 else _bisect_edge(fun, ts[i], ts[i - 1], tol)
    b = ts[j] if j == m - 1 else _bisect_edge(fun, ts[j], ts[j + 1], tol)
    return a, b


def minimize_1d(fun, lo, hi, tol=1e-11, levels=(41, 401, 4001)):
    """Minimize a convex extended-valued function of one variable on ``[lo, hi]``."""
    dom = finite_interval(fun, lo, hi, levels)
    if dom is None:
        return MinimizerReport(None, INF, 0, 0.0, flags=["empty-domain"])
    a, b = dom
    if b - a <= tol * (1.0 + abs(a)):
        return MinimizerReport(np.array([a]), float(fun(a)), 0, b - a)
    x, f, it, width = golden_section(fun, a, b, tol=tol)
    return MinimizerReport(np.array([x]), float(f), it, width)


def _nested_2d(fun, lower, upper, tol):
    def inner(t):
        rep = minimize_1d(lambda s: fun(np.array([t, s])), lower[1], upper[1], tol=tol, levels=(41, 401))
        inner.last[t] = rep
        return rep.objective

    inner.last = {}
    outer = minimize_1d(inner, lower[0], upper[0], tol=tol * 10, levels=(41, 401))
    if outer.argmin is None:
        return MinimizerReport(None, INF, outer.iterations, 0.0, flags=["empty-domain"])
    t = float(outer.argmin[0])
    rep = inner.last.get(t) or minimize_1d(lambda s: fun(np.array([t, s])), lower[1], upper[1], tol=tol)
    return MinimizerReport(np.array([t, rep.argmin[0]]), rep.objective, outer.iterations,
                           max(outer.certificate, rep.certificate))


def _powell(fun, lower, upper, starts, step_tol):
    bounds = list(zip(lower, upper))
    best = None
    iters = 0
    for x0 in starts:
        x = np.asarray(x0, dtype=float)
        fx = fun(x)
        step = INF
        for _ in range(8):
            res = optimize.minimize(fun, x, method="Powell", bounds=bounds,
                                    options={"xtol": 1e-12, "ftol": 1e-15, "maxfev": 40000})
            iters += int(res.nfev)
            step = float(np.linalg.norm(res.x - x))
            improved = res.fun < fx - 1e-15 * (1.0 + abs(fx))
            if res.fun <= fx:
                x, fx = res.x, float(res.fun)
            if not improved or step < step_tol:
                break
        if best is None or fx < best[1]:
            best = (x, fx, step)
    x, fx, step = best
    return MinimizerReport(np.asarray(x, dtype=float), float(fx), iters, step)


def minimize_convex(fun, lower, upper, x0=None, tol=1e-11, step_tol=STEP_TOL):
    """Minimize a convex ``fun: R^d -> ]-inf, +inf]`` over a box.

    Dimension 1 uses ``minimize_1d``.  In higher dimensions a coarse probe
    grid decides the route: if every probe is finite the objective is
    treated as smooth enough for multi-start Powell; otherwise nested golden
    sections are used (``d == 2`` only).  No finite probe means ``+inf``.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    d = len(lower)
    if d == 1:
        return minimize_1d(lambda t: fun(np.array([t])), lower[0], upper[0], tol=tol)
    per_axis = 5 if d <= 3 else 3
    axes = [np.linspace(a, b, per_axis) for a, b in zip(lower, upper)]
    probes = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
    if x0 is not None:
        probes = np.vstack([np.asarray(x0, dtype=float)[None, :], probes])
    vals = np.array([fun(p) for p in probes])
    if np.all(np.isfinite(vals)):
        starts = [probes[int(np.argmin(vals))]]
        centre = 0.5 * (lower + upper)
        if not np.allclose(starts[0], centre):
            starts.append(centre)
        return _powell(fun, lower, upper, starts, step_tol)
    if d == 2:
        return _nested_2d(fun, lower, upper, tol)
    if not np.any(np.isfinite(vals)):
        return MinimizerReport(None, INF, len(probes), 0.0, flags=["empty-domain"])
    raise NotImplementedError("extended-valued objectives are supported up to dimension 2")


def _near_boundary(x, lower, upper, margin):
    x = np.atleast_1d(x)
    return bool(np.any((x - lower <= margin) | (upper - x <= margin)))


def minimize_in_box(fun, lower, upper, x0=None, margin=BOUNDARY_MARGIN, **kw):
    """``minimize_convex`` plus the boundary-attainment policy."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    rep = minimize_convex(fun, lower, upper, x0=x0, **kw)
    if rep.argmin is None or not _near_boundary(rep.argmin, lower, upper, margin):
        return rep
    centre, half = 0.5 * (lower + upper), upper - lower
    big = minimize_convex(fun, centre - half, centre + half, x0=rep.argmin, **kw)
    if big.objective > rep.objective:
        big = rep
    big.box_expanded = True
    if big.argmin is not None and _near_boundary(big.argmin, centre - half, centre + half, margin):
        big.attained = False
        big.flags.append("boundary-hit")
    return big
