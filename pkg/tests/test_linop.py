import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from autoconj import (DimensionError, LinearMonotoneOperator, MatrixParseError, NotMonotoneError,
                      QuadraticForm, certify_monotone, decompose, dump_matrix, load_matrix,
                      parse_matrix, quad_conjugate_eval, quad_eval, rotation)
from autoconj.oracle import GridSpec, grid_conjugate, grid_error_bound, tabulate

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def square(n):
    return arrays(np.float64, (n, n), elements=finite)


def psd(rng, n, rank):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.zeros(n)
    lam[:rank] = rng.uniform(0.2, 3.0, rank)
    return (Q * lam) @ Q.T


# -- decompose ----------------------------------------------------------------

def test_decompose_antisymmetric():
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    S, K = decompose(J)
    assert np.array_equal(S.matrix, np.zeros((2, 2)))
    assert np.array_equal(K, J)


def test_decompose_symmetric():
    D = np.diag([2.0, 3.0])
    S, K = decompose(D)
    assert np.array_equal(S.matrix, D)
    assert np.array_equal(K, np.zeros((2, 2)))


def test_decompose_rotation():
    S, K = decompose(rotation(math.pi / 3))
    np.testing.assert_allclose(S.matrix, 0.5 * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(K, math.sqrt(3) / 2 * np.array([[0, -1], [1, 0]]), atol=1e-15)


def test_decompose_rejects_non_square():
    with pytest.raises(DimensionError):
        decompose(np.ones((2, 3)))


@given(st.integers(1, 4).flatmap(square))
def test_decompose_parts_exact(M):
    S, K = decompose(M)
    assert np.array_equal(S.matrix, S.matrix.T)
    assert np.array_equal(K, -K.T)
    np.testing.assert_allclose(S.matrix + K, M, rtol=0, atol=1e-12 * (1 + np.abs(M).max()))


# -- certify_monotone -----------------------------------------------------------

@pytest.mark.parametrize("M, expected", [
    (np.eye(2), True),
    (np.array([[0.0, -1.0], [1.0, 0.0]]), True),
    (np.array([[-1.0, 0.0], [0.0, 1.0]]), False),
])
def test_certify_examples(M, expected):
    assert certify_monotone(M) is expected


def test_rotation_near_quarter_turn_certifies():
    for theta in (math.pi / 2, math.pi / 2 - 1e-9, -math.pi / 2):
        assert certify_monotone(rotation(theta))
    assert not certify_monotone(rotation(math.pi / 2 + 1e-3))


def test_operator_rejects_non_monotone():
    with pytest.raises(NotMonotoneError):
        LinearMonotoneOperator([[-1.0, 0.0], [0.0, 1.0]])
    LinearMonotoneOperator([[-1.0, 0.0], [0.0, 1.0]], check=False)


def test_operator_is_immutable():
    A = LinearMonotoneOperator(np.eye(2))
    with pytest.raises(ValueError):
        A.matrix[0, 0] = 5.0
    with pytest.raises(ValueError):
        A.symmetric.pinv[0, 0] = 5.0


# -- quadratic forms ----------------------------------------------------------

@pytest.mark.parametrize("S, x, expected", [
    (np.eye(2), [3.0, 4.0], 12.5),
    (np.diag([2.0, 0.0]), [1.0, 5.0], 1.0),
    (0.5 * np.eye(2), [1.0, 0.0], 0.25),
])
def test_quad_eval_examples(S, x, expected):
    assert quad_eval(QuadraticForm(S), x) == pytest.approx(expected, abs=1e-15)


def test_quad_conjugate_examples():
    Q = QuadraticForm(np.diag([2.0, 0.0]))
    assert quad_conjugate_eval(Q, [2.0, 0.0]) == pytest.approx(1.0)
    assert quad_conjugate_eval(Q, [0.0, 1.0]) == math.inf


def test_quad_conjugate_zero_form_is_origin_indicator():
    Q = QuadraticForm(np.zeros((2, 2)))
    assert quad_conjugate_eval(Q, [0.0, 0.0]) == 0.0
    assert quad_conjugate_eval(Q, [1e-12, 0.0]) == 0.0
    assert quad_conjugate_eval(Q, [1e-3, 0.0]) == math.inf


def test_dimension_mismatch():
    Q = QuadraticForm(np.eye(2))
    with pytest.raises(DimensionError):
        quad_eval(Q, [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        quad_conjugate_eval(Q, [1.0])


def test_batched_evaluation_matches_loop(rng):
    Q = QuadraticForm(psd(rng, 3, 2))
    pts = rng.standard_normal((7, 3))
    batch = quad_eval(Q, pts)
    assert batch.shape == (7,)
    np.testing.assert_array_equal(batch, [quad_eval(Q, p) for p in pts])


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_scalar_identity_expansion(x, xs):
    # 1/2 (x + x*)^2 = 1/2 x^2 + x x* + 1/2 x*^2
    Q = QuadraticForm([[1.0]])
    lhs = quad_conjugate_eval(Q, [xs + x])
    rhs = quad_eval(Q, [x]) + x * xs + quad_conjugate_eval(Q, [xs])
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 2 ** 32 - 1), st.booleans())
def test_conjugate_shift_identity(n, rank, seed, in_range):
    # q*(x* + S x) = q(x) + <x, x*> + q*(x*), both sides +inf together
    rng = np.random.default_rng(seed)
    S = psd(rng, n, min(rank, n))
    Q = QuadraticForm(S)
    x = rng.uniform(-2, 2, n)
    xs = S @ rng.uniform(-2, 2, n) if in_range else rng.uniform(-2, 2, n)
    lhs = quad_conjugate_eval(Q, xs + S @ x)
    rhs = quad_eval(Q, x) + x @ xs + quad_conjugate_eval(Q, xs)
    if math.isinf(rhs):
        assert math.isinf(lhs)
    else:
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 2 ** 32 - 1))
def test_conjugate_of_image_is_form(n, rank, seed):
    rng = np.random.default_rng(seed)
    S = psd(rng, n, min(rank, n))
    Q = QuadraticForm(S)
    x = rng.uniform(-3, 3, n)
    assert quad_conjugate_eval(Q, S @ x) == pytest.approx(quad_eval(Q, x), rel=1e-9, abs=1e-9)


@given(st.integers(1, 5), st.integers(0, 5), st.integers(0, 2 ** 32 - 1))
def test_pseudoinverse_and_nonnegativity(n, rank, seed):
    rng = np.random.default_rng(seed)
    S = psd(rng, n, min(rank, n))
    Q = QuadraticForm(S)
    assert np.array_equal(Q.matrix, Q.matrix.T)
    np.testing.assert_allclose(Q.matrix @ Q.pinv @ Q.matrix, Q.matrix, atol=1e-10 * (1 + np.abs(S).max()))
    assert Q.rank == min(rank, n)
    assert np.all(quad_eval(Q, rng.standard_normal((20, n))) >= 0)


def test_conjugate_matches_grid_legendre_transform():
    Q = QuadraticForm([[2.0]])
    grid = GridSpec((-4.0,), (4.0,), 801)
    table = tabulate(lambda w: quad_eval(Q, w), grid)
    bound = grid_error_bound(table)
    s = np.linspace(-2, 2, 9)[:, None]
    approx = grid_conjugate(None, grid, s, table=table)
    exact = quad_conjugate_eval(Q, s)
    np.testing.assert_array_equal(exact, s[:, 0] ** 2 / 4)
    assert np.max(np.abs(approx - exact)) <= bound


# -- operator files -------------------------------------------------------------

def test_parse_json_and_plain():
    assert np.array_equal(parse_matrix('{"n": 2, "rows": [[1, 0], [0, 2]]}'), np.diag([1.0, 2.0]))
    text = "# rotation by 90 degrees\n0 -1\n\n1  0   # second row\n"
    assert np.array_equal(parse_matrix(text), [[0.0, -1.0], [1.0, 0.0]])


def test_parse_rejects_ragged_rows_with_position():
    with pytest.raises(MatrixParseError) as err:
        parse_matrix("1 2\n3\n")
    assert err.value.line == 2
    with pytest.raises(MatrixParseError):
        parse_matrix('{"rows": [[1, 2], [3]]}')


def test_parse_reports_bad_token_column():
    with pytest.raises(MatrixParseError) as err:
        parse_matrix("1 0\n0  x\n")
    assert (err.value.line, err.value.column) == (2, 4)
    with pytest.raises(MatrixParseError) as err:
        parse_matrix('{"rows": [[1, 0],\n  [0, 1]')
    assert err.value.line == 2


def test_parse_dimension_errors():
    with pytest.raises(DimensionError):
        parse_matrix("1 2 3\n4 5 6\n")
    with pytest.raises(DimensionError):
        parse_matrix('{"n": 3, "rows": [[1]]}')


@given(st.integers(1, 4).flatmap(square))
def test_dump_parse_round_trip(M):
    assert np.array_equal(parse_matrix(dump_matrix(M)), M)


def test_load_matrix(tmp_path):
    p = tmp_path / "rot.json"
    p.write_text(dump_matrix(rotation(0.3)))
    assert np.array_equal(load_matrix(str(p)), rotation(0.3))
