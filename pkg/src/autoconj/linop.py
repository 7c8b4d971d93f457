"""Dense linear operators on R^n and the quadratic-form calculus.

Extended real values are plain floats with ``math.inf`` standing for
:math:`+\\infty`.  IEEE arithmetic already gives ``inf + finite == inf`` and a
total order in which ``inf`` dominates every finite value; :math:`-\\infty`
never arises for the proper functions handled here.

All evaluation routines broadcast over leading axes: ``x`` may have shape
``(n,)`` or ``(..., n)``.  A 1-D input returns a Python float.
"""

import json
import math

import numpy as np

INF = math.inf

#: eigenvalues below ``PINV_CUTOFF * max(lambda_max, 1)`` are treated as zero
PINV_CUTOFF = 1e-10
#: relative tolerance for deciding ``s in ran S``
RANGE_TOL = 1e-8
#: default monotonicity tolerance
MONOTONE_TOL = 1e-10


class DimensionError(ValueError):
    """Raised when vector or matrix shapes do not agree."""


class NotMonotoneError(ValueError):
    """Raised when an operator fails the monotonicity certificate."""


class MatrixParseError(ValueError):
    """Malformed operator file; carries the 1-based line and column."""

    def __init__(self, msg, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(msg + where)


def is_finite(value):
    """True where an extended real is finite."""
    return np.isfinite(value)


def _scalar_or_array(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


def _as_square(matrix):
    M = np.array(matrix, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


def _as_vectors(x, n, name="x"):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 and n == 1:
        x = x.reshape(1)
    if x.shape[-1:] != (n,):
        raise DimensionError(f"{name} has shape {x.shape}, expected (..., {n})")
    return x


class QuadraticForm:
    """The form ``q(x) = 1/2 <x, S x>`` of a symmetric PSD matrix ``S``.

    Holds the pseudoinverse ``S^+`` and the orthogonal projector onto
    ``ran S`` so that the conjugate ``q^*`` can be evaluated exactly, including
    the indicator of ``ran S``.

    Parameters
    ----------
    matrix : array_like
        Symmetric positive semidefinite matrix. It is symmetrized on
        construction.
    eigen_cutoff : float
        Relative threshold below which eigenvalues count as zero.
    """

    def __init__(self, matrix, eigen_cutoff=PINV_CUTOFF):
        S = _as_square(matrix)
        S = 0.5 * (S + S.T)
        w, V = np.linalg.eigh(S)
        cut = eigen_cutoff * max(float(w.max(initial=0.0)), 1.0)
        keep = w > cut
        Vk = V[:, keep]
        self.matrix = S
        self.eigen_cutoff = eigen_cutoff
        self.eigenvalues = w
        self.pinv = (Vk / w[keep]) @ Vk.T
        self.range_projector = Vk @ Vk.T
        self.rank = int(keep.sum())
        for a in (self.matrix, self.pinv, self.range_projector):
            a.setflags(write=False)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __call__(self, x):
        return quad_eval(self, x)

    def conjugate(self, s):
        return quad_conjugate_eval(self, s)

    def in_range(self, s):
        """Numerical test of ``s in ran S`` with tolerance ``RANGE_TOL*(1+|s|)``."""
        s = _as_vectors(s, self.dim, "s")
        off = np.linalg.norm(s - s @ self.range_projector, axis=-1)
        return off <= RANGE_TOL * (1.0 + np.linalg.norm(s, axis=-1))

    def __repr__(self):
        return f"QuadraticForm(dim={self.dim}, rank={self.rank})"


class LinearMonotoneOperator:
    """A dense ``n x n`` matrix ``A`` viewed as a monotone operator.

    The adjoint is the transpose.  Symmetric part, antisymmetric part and
    the quadratic form of the symmetric part are computed once.

    Parameters
    ----------
    matrix : array_like
        Square real matrix.
    check : bool
        If true (default), raise ``NotMonotoneError`` unless
        ``certify_monotone`` accepts the matrix.
    tol : float
        Tolerance passed to ``certify_monotone``.
    """

    def __init__(self, matrix, check=True, tol=MONOTONE_TOL):
        A = _as_square(matrix)
        if not np.all(np.isfinite(A)):
            raise ValueError("operator matrix has non-finite entries")
        if check and not certify_monotone(A, tol):
            raise NotMonotoneError("symmetric part has a negative eigenvalue")
        self.matrix = A
        self.matrix.setflags(write=False)
        self.symmetric, self.antisymmetric = decompose(A)
        self.antisymmetric.setflags(write=False)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def T(self):
        return self.matrix.T

    def __matmul__(self, x):
        return np.asarray(x, dtype=float) @ self.matrix.T

    def apply(self, x):
        """``A x`` broadcast over leading axes."""
        x = _as_vectors(x, self.dim)
        return x @ self.matrix.T

    def apply_adjoint(self, x):
        x = _as_vectors(x, self.dim)
        return x @ self.matrix

    def __add__(self, other):
        return LinearMonotoneOperator(self.matrix + as_operator(other).matrix)

    def __repr__(self):
        return f"LinearMonotoneOperator({self.matrix.tolist()!r})"


def as_operator(A, check=True):
    if isinstance(A, LinearMonotoneOperator):
        return A
    return LinearMonotoneOperator(A, check=check)


def decompose(A):
    """Split ``A`` into its symmetric part (as a QuadraticForm) and antisymmetric part.

    Returns
    -------
    symmetric : QuadraticForm
        Form of ``(A + A^T)/2``.
    antisymmetric : ndarray
        ``(A - A^T)/2``.
    """
    if isinstance(A, LinearMonotoneOperator):
        return A.symmetric, A.antisymmetric
    A = _as_square(A)
    return QuadraticForm(0.5 * (A + A.T)), 0.5 * (A - A.T)


def certify_monotone(A, tol=MONOTONE_TOL):
    """True iff the smallest eigenvalue of ``(A + A^T)/2`` is >= ``-tol (1 + |A|_2)``."""
    if isinstance(A, LinearMonotoneOperator):
        A = A.matrix
    A = _as_square(A)
    lam_min = np.linalg.eigvalsh(0.5 * (A + A.T))[0]
    return bool(lam_min >= -tol * (1.0 + np.linalg.norm(A, 2)))


def quad_eval(Q, x):
    """``q(x) = 1/2 <x, S x>``."""
    x = _as_vectors(x, Q.dim)
    return _scalar_or_array(0.5 * np.einsum("...i,ij,...j->...", x, Q.matrix, x))


def quad_conjugate_eval(Q, s):
    """``q^*(s)``: ``1/2 <s, S^+ s>`` on ``ran S`` and ``+inf`` off it.

    When ``S = 0`` the projector vanishes and ``q^*`` reduces to the indicator
    of ``{0}``.
    """
    s = _as_vectors(s, Q.dim, "s")
    val = 0.5 * np.einsum("...i,ij,...j->...", s, Q.pinv, s)
    val = np.where(Q.in_range(s), val, INF)
    return _scalar_or_array(val)


def pairing(x, xs):
    """Euclidean pairing ``<x, x*>`` over the last axis."""
    return _scalar_or_array(np.einsum("...i,...i->...", np.asarray(x, float), np.asarray(xs, float)))


# -- operator files ---------------------------------------------------------

def parse_matrix(text):
    """Parse an operator from JSON ``{"n": int, "rows": [...]}`` or plain rows.

    Plain text is one matrix row per non-blank line, whitespace separated;
    ``#`` starts a comment.  Ragged rows are rejected.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixParseError(exc.msg, exc.lineno, exc.colno) from None
        if not isinstance(obj, dict) or "rows" not in obj:
            raise MatrixParseError("JSON operator needs a 'rows' field", 1, 1)
        rows = obj["rows"]
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise MatrixParseError("'rows' must be a non-empty list of lists", 1, 1)
        width = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != width:
                raise MatrixParseError(f"ragged row {i + 1}: {len(r)} entries, expected {width}")
            for v in r:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise MatrixParseError(f"non-numeric entry {v!r} in row {i + 1}")
        M = np.array(rows, dtype=float)
        n = obj.get("n", M.shape[0])
        if n != M.shape[0]:
            raise DimensionError(f"declared n={n} but {M.shape[0]} rows given")
    else:
        rows = []
        width = None
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0]
            if not body.strip():
                continue
            row = []
            col = 0
            for tok in body.split():
                col = body.index(tok, col) + 1
                try:
                    row.append(float(tok))
                except ValueError:
                    raise MatrixParseError(f"bad number {tok!r}", lineno, col) from None
                col += len(tok) - 1
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise MatrixParseError(f"ragged row: {len(row)} entries, expected {width}", lineno, 1)
            rows.append(row)
        if not rows:
            raise MatrixParseError("empty operator file", 1, 1)
        M = np.array(rows, dtype=float)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"operator matrix must be square, got {M.shape}")
    return M


def load_matrix(path):
    with open(path) as fh:
        return parse_matrix(fh.read())


def dump_matrix(A):
    """JSON text for ``A`` in the operator file format."""
    A = _as_square(A.matrix if isinstance(A, LinearMonotoneOperator) else A)
    return json.dumps({"n": A.shape[0], "rows": A.tolist()})


def rotation(theta):
    """The plane rotation by ``theta``; monotone for ``|theta| <= pi/2``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])
