import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from autoconj import (BivariateFunction, GraphSample, GridSpec, ImproperRestrictionError,
                      audit_monotone, autoconjugacy_residual, c_representer, extract_graph,
                      fenchel_young_check, grid_conjugate, graph_indicator, id_family,
                      neglog_function, neglog_values, sampled_conjugate_check, separable, tabulate)
from autoconj.gallery import GSpec
from autoconj.verify import random_monotone


def energy_joint(w):
    return 0.5 * np.sum(w * w, axis=-1)


def neglog_separable():
    return separable(lambda x: neglog_values("f", x[..., 0], 0.0),
                     lambda s: neglog_values("fstar", 0.0, s[..., 0]))


# -- BivariateFunction and GridSpec -------------------------------------------

def test_bivariate_rejects_minus_infinity_and_nan():
    F = BivariateFunction(lambda x, xs: -np.inf * np.ones(x.shape[:-1]), 1)
    with pytest.raises(ValueError):
        F(1.0, 1.0)
    G = BivariateFunction(lambda x, xs: np.full(x.shape[:-1], np.nan), 1)
    with pytest.raises(ValueError):
        G(np.zeros((3, 1)), np.zeros((3, 1)))


def test_bivariate_transpose_and_shift():
    F = BivariateFunction(lambda x, xs: x[..., 0] + 2 * xs[..., 0], 1, "F")
    assert F.transpose()(1.0, 3.0) == 3.0 + 2.0
    assert (F + 0.5)(1.0, 0.0) == 1.5


@pytest.mark.parametrize("lo, hi, m", [((0.0,), (0.0,), 5), ((1.0,), (0.0,), 5), ((0.0,), (1.0,), 2)])
def test_gridspec_validation(lo, hi, m):
    with pytest.raises(ValueError):
        GridSpec(lo, hi, m)


def test_gridspec_nodes_and_step():
    g = GridSpec((-1.0, 0.0), (1.0, 4.0), 5)
    assert g.nodes().shape == (25, 2)
    np.testing.assert_array_equal(g.step, [0.5, 1.0])
    assert g.inner(0.5).sum() == 9


# -- grid_conjugate -----------------------------------------------------------

def test_energy_conjugate_at_origin():
    grid = GridSpec.cube(-3.0, 3.0, 61, 2)
    assert grid_conjugate(energy_joint, grid, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)


def test_origin_indicator_conjugate_is_zero():
    grid = GridSpec.cube(-2.0, 2.0, 41, 2)
    ind = lambda w: np.where(np.all(np.abs(w) < 1e-12, axis=-1), 0.0, np.inf)
    for q in ([0.0, 0.0], [3.0, -7.0], [100.0, 1.0]):
        assert grid_conjugate(ind, grid, q) == 0.0


def test_energy_representer_conjugate_at_graph_point():
    F = c_representer(np.eye(1))
    grid = GridSpec.cube(-3.0, 3.0, 241, 2)
    assert grid_conjugate(F, grid, [1.0, 1.0]) == pytest.approx(F(1.0, 1.0), abs=1e-3)


def test_improper_restriction_raises():
    grid = GridSpec.cube(-1.0, 1.0, 5, 2)
    with pytest.raises(ImproperRestrictionError):
        grid_conjugate(lambda w: np.full(len(w), np.inf), grid, [0.0, 0.0])


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(3, 12))
def test_refinement_never_decreases_conjugate(a, b, k):
    # the grid with 2k - 1 nodes per axis contains the one with k
    F = id_family(GSpec("power", 3.0))
    coarse = GridSpec.cube(-2.0, 2.0, k, 2)
    fine = GridSpec.cube(-2.0, 2.0, 2 * k - 1, 2)
    assert grid_conjugate(F, fine, [a, b]) >= grid_conjugate(F, coarse, [a, b]) - 1e-12


def test_biconjugate_below_original():
    F = id_family(GSpec("halfline"))
    grid = GridSpec.cube(-2.0, 2.0, 41, 2)
    table = tabulate(F, grid)
    conj_vals = grid_conjugate(F, grid, grid.nodes(), table=table)
    conj = lambda w: grid_conjugate(None, grid, w, table=type(table)(grid, grid.nodes(), conj_vals))
    inner = grid.nodes()[grid.inner(0.5)]
    bic = conj(inner)
    orig = F.joint(inner)
    assert np.all(bic <= orig + 1e-9)


# -- autoconjugacy_residual ---------------------------------------------------

def test_energy_sum_residual_small():
    F = c_representer(np.eye(1))
    grid = GridSpec.cube(-3.0, 3.0, 241, 2)
    pts = np.random.default_rng(0).uniform(-1.0, 1.0, (25, 2))
    rep = autoconjugacy_residual(F, grid, pts)
    assert rep.residual <= 0.01
    assert rep.passed


def test_halfline_member_residual_small():
    F = id_family(GSpec("halfline"))
    grid = GridSpec.cube(-3.0, 3.0, 241, 2)
    pts = np.random.default_rng(1).uniform(-1.0, 1.0, (25, 2))
    rep = autoconjugacy_residual(F, grid, pts)
    assert rep.n_finite < 25
    assert rep.residual <= 0.01
    assert not rep.mismatched
    assert len(rep.skipped) < 25 - rep.n_finite


def test_false_infinity_is_flagged():
    # restricting C_Id to x >= x* is not autoconjugate: its conjugate stays finite where it is +inf
    C = c_representer(np.eye(1))
    F = BivariateFunction(lambda x, xs: np.where(x[..., 0] >= xs[..., 0], C(x, xs), np.inf), 1)
    grid = GridSpec.cube(-3.0, 3.0, 121, 2)
    rep = autoconjugacy_residual(F, grid, [[-1.0, 1.0], [0.0, 0.02]])
    assert rep.mismatched == [(-1.0, 1.0)]
    assert rep.skipped == [(0.0, 0.02)]
    assert not rep.passed


def test_neglog_fitzpatrick_not_autoconjugate():
    F = neglog_function("Fitz")
    grid = GridSpec((0.05, -4.0), (4.0, -0.05), 241)
    rep = autoconjugacy_residual(F, grid, [[1.0, -2.0], [1.5, -1.5]])
    assert rep.residual > 0.5


def test_residual_rejects_points_outside_box():
    grid = GridSpec.cube(-1.0, 1.0, 11, 2)
    with pytest.raises(ValueError):
        autoconjugacy_residual(c_representer(np.eye(1)), grid, [[2.0, 0.0]])
    with pytest.raises(ValueError):
        autoconjugacy_residual(c_representer(np.eye(1)), grid, np.empty((0, 2)))


# -- extract_graph and audit_monotone -----------------------------------------

def test_energy_graph_on_diagonal():
    grid = GridSpec.cube(-2.0, 2.0, 81, 2)
    G = extract_graph(c_representer(np.eye(1)), grid)
    assert len(G) >= 81
    assert np.max(np.abs(G.x - G.xstar)) <= 2 * G.step
    assert np.all(np.abs(G.residual) <= G.tol)


def test_antisymmetric_indicator_graph():
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    grid = GridSpec.cube(-2.0, 2.0, 5, 4)
    G = extract_graph(graph_indicator(J), grid, tol=0.0)
    assert len(G) == 25
    np.testing.assert_array_equal(G.xstar, G.x @ J.T)


def test_neglog_separable_graph():
    grid = GridSpec((0.25, -4.0), (4.0, -0.25), 301)
    G = extract_graph(neglog_separable(), grid)
    assert len(G) > 10
    x, xs = G.x[:, 0], G.xstar[:, 0]
    assert np.max(np.abs(xs + 1.0 / x)) <= 0.2
    assert audit_monotone(G).passed


def test_audit_examples():
    diag = GraphSample(np.linspace(-1, 1, 5)[:, None], np.linspace(-1, 1, 5)[:, None], np.zeros(5), 0.0)
    assert audit_monotone(diag).passed
    bad = GraphSample(np.array([[0.0], [1.0]]), np.array([[1.0], [0.0]]), np.zeros(2), 0.0)
    audit = audit_monotone(bad)
    assert not audit.passed and audit.worst == -1.0
    assert set(audit.worst_pair) == {0, 1}
    good = GraphSample(np.array([[1.0], [2.0]]), np.array([[-1.0], [-0.5]]), np.zeros(2), 0.0)
    assert audit_monotone(good).passed
    assert audit_monotone(good).worst == pytest.approx(0.5)


@given(st.integers(0, 2 ** 32 - 1))
def test_autoconjugate_graph_samples_are_monotone(seed):
    rng = np.random.default_rng(seed)
    F = c_representer(random_monotone(rng, 1, rank=1))
    G = extract_graph(F, GridSpec.cube(-2.0, 2.0, 61, 2))
    assert audit_monotone(G).passed


def test_graph_csv_header():
    G = GraphSample(np.array([[1.0, 2.0]]), np.array([[3.0, 4.0]]), np.array([0.0]), 0.1)
    buf = io.StringIO()
    G.to_csv(buf)
    assert buf.getvalue().splitlines() == ["x1,x2,xstar1,xstar2,residual", "1.0,2.0,3.0,4.0,0.0"]
    G1 = GraphSample(np.array([[0.1]]), np.array([[0.2]]), np.array([1e-17]), 0.1)
    buf = io.StringIO()
    G1.to_csv(buf)
    assert buf.getvalue().splitlines() == ["x,xstar,residual", "0.1,0.2,1e-17"]


# -- Fenchel-Young ------------------------------------------------------------

def test_fenchel_young_examples():
    assert fenchel_young_check(c_representer(np.eye(1)), [[1.0, -1.0]])
    assert neglog_values("Fitz", 1.0, -1.0) == -1.0
    assert fenchel_young_check(neglog_function("Fitz"), [[1.0, -1.0]], tol=0.0)
    assert neglog_values("Arep", 1.0, -0.5) == 0.0
    assert fenchel_young_check(neglog_function("Arep"), [[1.0, -0.5]])
    below = BivariateFunction(lambda x, xs: np.sum(x * xs, axis=-1) - 1.0, 1)
    assert not fenchel_young_check(below, [[1.0, 1.0]])


@given(st.integers(0, 2 ** 32 - 1))
def test_representers_dominate_pairing(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    F = c_representer(random_monotone(rng, n))
    pts = rng.uniform(-3, 3, (30, 2 * n))
    assert fenchel_young_check(F, pts, tol=1e-9)
    assert sampled_conjugate_check(F, pts) >= -1e-9
