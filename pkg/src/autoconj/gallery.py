"""Worked scalar examples with exact formulas.

* A one-parameter family of autoconjugate representers for ``Id`` on R,
  built from functions ``g`` with ``g^*(-x) = g(x) >= 0``.
* The subdifferential of ``f = -ln``, for which the Penot-Zalinescu
  representer, the proximal-average representer and ``f (+) f^*`` have three
  different domains.
* Finite diagonal truncations of ``B = diag(1/k)``, ``A = B^{-1}``, and the
  partial energies ``sum_{k<=n} k^{-5/3}`` of the truncated sequence
  ``(k^{-4/3})``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .linop import INF, QuadraticForm, _scalar_or_array
from .oracle import (BivariateFunction, GridSpec, grid_conjugate, grid_error_bound,
                     infinite_side_check, tabulate)
from .representers import b_rep_eval

# values of -1 - 2 x x* in [-SQRT_CLAMP, 0] are rounding noise on the boundary
SQRT_CLAMP = 1e-12


# -- identity family ----------------------------------------------------------

@dataclass(frozen=True)
class GSpec:
    """A function ``g: R -> ]-inf, +inf]`` with ``g^*(-x) = g(x) >= 0``.

    ``tag`` is one of ``"halfline"`` (indicator of ``[0, inf)``), ``"energy"``
    (``x^2/2``) or ``"power"`` (``x^p/p`` for ``x >= 0``, ``(-x)^q/q``
    otherwise, with ``1/p + 1/q = 1``).
    """

    tag: str
    p: float = 3.0

    def __post_init__(self):
        if self.tag not in ("halfline", "energy", "power"):
            raise ValueError(f"unknown g {self.tag!r}")
        if self.tag == "power" and not self.p > 1:
            raise ValueError("power needs p > 1")

    @classmethod
    def parse(cls, text):
        """``"energy"``, ``"halfline"`` or ``"power:p"``."""
        tag, _, p = text.partition(":")
        return cls(tag, float(p)) if p else cls(tag)

    @property
    def q(self):
        return self.p / (self.p - 1.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.tag == "halfline":
            out = np.where(x >= 0, 0.0, INF)
        elif self.tag == "energy":
            out = 0.5 * x * x
        else:
            pos = np.maximum(x, 0.0)
            neg = np.maximum(-x, 0.0)
            out = np.where(x >= 0, pos ** self.p / self.p, neg ** self.q / self.q)
        return _scalar_or_array(out)

    def __str__(self):
        return f"power:{self.p:g}" if self.tag == "power" else self.tag


def id_family_eval(g, x, y):
    """``q((x + y)/sqrt 2) + g((x - y)/sqrt 2)`` with ``q = |.|^2/2``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = (x + y) / math.sqrt(2.0)
    v = (x - y) / math.sqrt(2.0)
    return _scalar_or_array(0.5 * u * u + np.asarray(g(v)))


def id_family(g):
    """The identity-family representer for ``g`` as a BivariateFunction on R x R."""
    return BivariateFunction(lambda x, y: id_family_eval(g, x[..., 0], y[..., 0]), 1, f"F_{g}")


@dataclass
class GAxiomReport:
    nonnegative: bool
    zero_at_zero: bool
    conjugate_gap: float
    bound: float
    unbounded_ok: bool

    @property
    def passed(self):
        return self.nonnegative and self.zero_at_zero and self.conjugate_gap <= self.bound and self.unbounded_ok


def g_axiom_check(g, grid=None, test_points=None, bound=None):
    """Check ``g >= 0``, ``g(0) = 0`` and ``g^*(-x) = g(x)`` with a 1-D grid conjugate.

    Parameters
    ----------
    g : GSpec or callable
    grid : GridSpec, optional
        1-D box; default ``[-6, 6]`` with 2001 nodes.
    test_points : array_like, optional
        Where to compare ``g^*(-x)`` and ``g(x)``; default the nodes in the
        central third of the box.
    bound : float, optional
        Tolerance for the conjugate gap; default ``grid_error_bound``.

    Returns
    -------
    GAxiomReport
        Truthy attribute ``passed``.  At points with ``g(x) = +inf`` the grid
        conjugate must keep growing between the inner half box and the full
        box (see ``infinite_side_check``).
    """
    if grid is None:
        grid = GridSpec((-6.0,), (6.0,), 2001)
    table = tabulate(lambda w: np.asarray(g(w[:, 0])), grid)
    if bound is None:
        bound = grid_error_bound(table)
    nodes = table.nodes[:, 0]
    if test_points is None:
        lo, hi = grid.lower[0], grid.upper[0]
        third = (hi - lo) / 6.0
        mid = 0.5 * (lo + hi)
        test_points = nodes[np.abs(nodes - mid) <= third + 1e-12]
    xs = np.atleast_1d(np.asarray(test_points, dtype=float))
    gx = np.atleast_1d(g(xs))
    conj = grid_conjugate(None, grid, -xs[:, None], table=table)
    fin = np.isfinite(gx)
    gap = float(np.max(np.abs(conj[fin] - gx[fin]), initial=0.0))
    unbounded_ok = True
    if np.any(~fin):
        mismatched, _ = infinite_side_check(table, xs[~fin, None], -xs[~fin, None], conj[~fin])
        unbounded_ok = not mismatched
    with np.errstate(invalid="ignore"):
        nonneg = bool(np.all(table.values >= 0))
    return GAxiomReport(nonneg, float(g(0.0)) == 0.0, gap, float(bound), unbounded_ok)


# -- the -ln example ------------------------------------------------------------------

NEGLOG_ITEMS = ("f", "fstar", "Fitz", "FitzConj", "Arep", "SepRep")


def _neglog(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, -np.log(np.where(x > 0, x, 1.0)), INF)


def _clamped_sqrt(t):
    t = np.where((t < 0) & (t >= -SQRT_CLAMP), 0.0, t)
    with np.errstate(invalid="ignore"):
        return np.sqrt(t)


def in_C(x, xs, scale=1.0):
    """Membership in ``scale * C`` where ``C = {x* <= -1/x < 0}``.

    ``scale * C = {x* <= -scale^2 / x < 0}``; ``scale = 1/sqrt 2`` gives
    ``x* <= -1/(2x)`` and ``scale = 1/2`` gives ``x* <= -1/(4x)``.
    """
    x = np.asarray(x, dtype=float)
    xs = np.asarray(xs, dtype=float)
    with np.errstate(divide="ignore"):
        bound = -scale * scale / np.where(x > 0, x, 1.0)
    return (x > 0) & (xs <= bound)


def neglog_values(which, x, xs):
    """Closed-form values attached to ``f = -ln``.

    ``which`` selects ``f(x)``, ``fstar(x*) = -1 + f(-x*)``, the Fitzpatrick
    function ``Fitz = 1 - 2 sqrt(-x x*)`` on ``x >= 0 >= x*``, its conjugate
    transpose ``FitzConj = -1 + indicator of C``, the Penot-Zalinescu
    representer ``Arep = -sqrt(-1 - 2 x x*)`` on ``C / sqrt 2``, or ``SepRep =
    f(x) + f^*(x*)``.
    """
    x = np.asarray(x, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if which == "f":
        out = _neglog(x)
    elif which == "fstar":
        out = -1.0 + _neglog(-xs)
    elif which == "Fitz":
        ok = (x >= 0) & (xs <= 0)
        out = np.where(ok, 1.0 - 2.0 * _clamped_sqrt(np.where(ok, -x * xs, 0.0)), INF)
    elif which == "FitzConj":
        out = np.where(in_C(x, xs), -1.0, INF)
    elif which == "Arep":
        ok = in_C(x, xs, 1.0 / math.sqrt(2.0))
        out = np.where(ok, 0.0 - _clamped_sqrt(np.where(ok, -1.0 - 2.0 * x * xs, 0.0)), INF)
    elif which == "SepRep":
        out = _neglog(x) + (-1.0 + _neglog(-xs))
    else:
        raise ValueError(f"unknown item {which!r}; choose from {NEGLOG_ITEMS}")
    return _scalar_or_array(out)


def _neglog_scalar(which, x, xs):
    # pure-float twin of neglog_values for the minimizers' inner loops
    if which == "Fitz":
        if x >= 0 and xs <= 0:
            return 1.0 - 2.0 * math.sqrt(-x * xs)
        return INF
    if which == "FitzConj":
        return -1.0 if x > 0 and xs <= -1.0 / x else INF
    return float(neglog_values(which, x, xs))


def neglog_function(which):
    """A ``neglog_values`` item as a BivariateFunction on R x R."""
    return BivariateFunction(lambda x, xs: neglog_values(which, x[..., 0], xs[..., 0]), 1, f"-ln:{which}",
                             scalar=lambda x, xs: _neglog_scalar(which, float(x[0]), float(xs[0])))


def neglog_pair():
    """``(F, F^{*T})`` for ``d(-ln)``, the input of the numeric constructions."""
    return neglog_function("Fitz"), neglog_function("FitzConj")


NEGLOG_DOMAIN_SCALE = {"Arep": 1.0 / math.sqrt(2.0), "Brep": 0.5}


@dataclass
class DomainVerdict:
    member: bool
    numeric: object = None

    def __bool__(self):
        return self.member


def neglog_domain_classify(which, x, xs, crosscheck=False, box=None):
    """Exact membership of ``(x, x*)`` in the domain of a ``-ln`` representer.

    ``Arep``: ``x* <= -1/(2x) < 0``; ``Brep``: ``x* <= -1/(4x) < 0``;
    ``SepRep``: ``x > 0`` and ``x* < 0``.  With ``crosscheck`` the ``Brep``
    verdict is paired with finiteness of the numerically minimized
    proximal-average objective.
    """
    if which == "SepRep":
        member = bool(x > 0 and xs < 0)
    elif which in NEGLOG_DOMAIN_SCALE:
        member = bool(in_C(x, xs, NEGLOG_DOMAIN_SCALE[which]))
    else:
        raise ValueError(f"no domain formula for {which!r}")
    numeric = None
    if crosscheck and which == "Brep":
        value, _ = b_rep_eval(neglog_pair(), x, xs, box=box)
        numeric = bool(np.isfinite(value))
    return DomainVerdict(member, numeric)


# -- diagonal truncations ----------------------------------------------------------------

@dataclass
class DiagonalTruncation:
    """``B = diag(1/k)`` and ``A = B^{-1} = diag(k)`` for ``k = 1..n``."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        k = np.arange(1, self.n + 1, dtype=float)
        self.A = np.diag(k)
        self.B = np.diag(1.0 / k)
        self.qA = QuadraticForm(self.A)
        self.qB = QuadraticForm(self.B)


def diag_truncation_reps(n, x, xs, tol=1e-10):
    """``A_A = q_A (+) q_B`` and ``B_A = q_B^* (+) q_B`` for the ``n``-term truncation.

    In finite dimensions ``q_B^* = q_A``, so the two agree; a disagreement
    beyond ``tol (1 + |value|)`` raises ``AssertionError``.
    """
    D = n if isinstance(n, DiagonalTruncation) else DiagonalTruncation(int(n))
    a = float(D.qA(x)) + float(D.qB(xs))
    b = float(D.qB.conjugate(x)) + float(D.qB(xs))
    if not abs(a - b) <= tol * (1.0 + abs(a)):
        raise AssertionError(f"truncated representers disagree: {a!r} vs {b!r}")
    return a, b


def energy_tail_bound(n):
    """``integral_n^inf t^{-5/3} dt = (3/2) n^{-2/3}``, an upper bound for the tail sum."""
    return 1.5 * float(n) ** (-2.0 / 3.0)


def energy_partial_sums(n_max):
    """``S_n = sum_{k<=n} k^{-5/3}`` for ``n = 1..n_max``."""
    k = np.arange(1, int(n_max) + 1, dtype=float)
    return np.cumsum(k ** (-5.0 / 3.0))


def energy_sequence_demo(n_max, rows=None):
    """Table of ``(n, S_n, tail_bound(n))``.

    ``S_n = <x_n, A x_n>`` for ``x_n`` the truncation of ``(k^{-4/3})``.  The
    sums stay bounded while the limit sequence is not in the domain of the
    infinite-dimensional ``A``.  Rows default to powers of ten up to
    ``n_max`` plus ``n_max`` itself.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    S = energy_partial_sums(n_max)
    if rows is None:
        rows = sorted({10 ** e for e in range(int(math.log10(n_max)) + 1)} | {int(n_max)})
    return [(int(n), float(S[n - 1]), energy_tail_bound(n)) for n in rows]
