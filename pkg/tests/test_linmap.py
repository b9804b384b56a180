import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catgrad.category import CompositionError
from catgrad.linmap import (
    MAT,
    ForkL,
    IdL,
    JoinL,
    ScaleL,
    ZeroL,
    all_associations,
    chain_cost,
    chain_order,
    format_chain,
    format_dense,
    lm_add,
    lm_apply,
    lm_compose,
    lm_cross,
    lm_dup,
    lm_exl,
    lm_from_dense,
    lm_jam,
    lm_scale_map,
    lm_to_dense,
    lm_transpose,
)
from catgrad.shape import PairS, PairV, R, ScalarV, ShapeError, VecS, dim, flatten, unflatten

from helpers import SMALL_SHAPES, close, rand_matrix

shape_idx = st.integers(0, len(SMALL_SHAPES) - 1)


def rand_lm(rng, dom, cod):
    m = rand_matrix(rng, dim(cod), dim(dom))
    return lm_from_dense(m, dom, cod), m


def test_scalar_blocks():
    assert lm_to_dense(ScaleL(3.0)).tolist() == [[3.0]]
    assert lm_to_dense(lm_exl(R, R)).tolist() == [[1.0, 0.0]]
    assert lm_to_dense(lm_dup(R)).tolist() == [[1.0], [1.0]]
    assert lm_to_dense(lm_jam(R)).tolist() == [[1.0, 1.0]]
    assert lm_to_dense(IdL(PairS(R, R))).tolist() == [[1.0, 0.0], [0.0, 1.0]]


def test_apply_checks_shape():
    with pytest.raises(ShapeError):
        lm_apply(ScaleL(2.0), PairV(ScalarV(1.0), ScalarV(1.0)))


def test_magsqr_derivative_is_a_row():
    row = JoinL(ScaleL(6.0), ScaleL(8.0))
    assert lm_to_dense(row).tolist() == [[6.0, 8.0]]


def test_compose_stays_structural():
    f = ForkL(ScaleL(2.0), ScaleL(3.0))
    g = JoinL(ScaleL(5.0), ScaleL(7.0))
    h = lm_compose(g, f)
    assert isinstance(h, ScaleL) and h.c == 31.0
    k = lm_compose(f, g)
    assert isinstance(k, ForkL)
    assert lm_to_dense(k).tolist() == [[10.0, 14.0], [15.0, 21.0]]


def test_zero_absorbs():
    z = ZeroL(R, R)
    assert isinstance(lm_compose(z, ForkL(ScaleL(1.0), ScaleL(2.0)).f), ZeroL)
    assert lm_add(z, ScaleL(4.0)) == ScaleL(4.0)


def test_shape_mismatch():
    with pytest.raises(CompositionError):
        lm_compose(ScaleL(1.0), lm_dup(R))
    with pytest.raises(CompositionError):
        lm_add(ScaleL(1.0), lm_dup(R))


@settings(max_examples=150, deadline=None)
@given(shape_idx, shape_idx, shape_idx, st.integers(0, 2**32 - 1))
def test_compose_matches_dense(i, j, k, seed):
    a, b, c = SMALL_SHAPES[i], SMALL_SHAPES[j], SMALL_SHAPES[k]
    rng = np.random.default_rng(seed)
    f, F = rand_lm(rng, a, b)
    g, G = rand_lm(rng, b, c)
    assert close(lm_to_dense(lm_compose(g, f)), G @ F, 1e-12)


@settings(max_examples=150, deadline=None)
@given(shape_idx, shape_idx, st.integers(0, 2**32 - 1))
def test_add_transpose_scale_match_dense(i, j, seed):
    a, b = SMALL_SHAPES[i], SMALL_SHAPES[j]
    rng = np.random.default_rng(seed)
    f, F = rand_lm(rng, a, b)
    g, G = rand_lm(rng, a, b)
    assert close(lm_to_dense(lm_add(f, g)), F + G, 1e-12)
    if a == b:
        assert close(lm_to_dense(lm_add(f, IdL(a))), F + np.eye(dim(a)), 1e-12)
    assert close(lm_to_dense(lm_transpose(f)), F.T, 0.0)
    assert close(lm_to_dense(lm_scale_map(-2.5, f)), -2.5 * F, 1e-12)


@settings(max_examples=100, deadline=None)
@given(shape_idx, shape_idx, shape_idx, shape_idx, st.integers(0, 2**32 - 1))
def test_cross_is_block_diagonal(i, j, k, m, seed):
    a, b, c, d = (SMALL_SHAPES[x] for x in (i, j, k, m))
    rng = np.random.default_rng(seed)
    f, F = rand_lm(rng, a, c)
    g, G = rand_lm(rng, b, d)
    got = lm_to_dense(lm_cross(f, g))
    assert close(got[: F.shape[0], : F.shape[1]], F, 0.0)
    assert close(got[F.shape[0]:, F.shape[1]:], G, 0.0)
    assert not got[: F.shape[0], F.shape[1]:].any()
    assert not got[F.shape[0]:, : F.shape[1]].any()


def test_add_mixed_layouts():
    s = PairS(R, R)
    fork = ForkL(JoinL(ScaleL(1.0), ScaleL(2.0)), JoinL(ScaleL(3.0), ScaleL(4.0)))
    join = JoinL(ForkL(ScaleL(10.0), ScaleL(30.0)), ForkL(ScaleL(20.0), ScaleL(40.0)))
    got = lm_to_dense(lm_add(fork, join))
    assert got.tolist() == [[11.0, 22.0], [33.0, 44.0]]
    assert lm_to_dense(lm_add(IdL(s), fork)).tolist() == [[2.0, 2.0], [3.0, 5.0]]


def test_from_dense_roundtrip_and_zero_blocks():
    s = PairS(R, VecS(2, R))
    m = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 2.0]])
    lm = lm_from_dense(m, s, s)
    assert np.array_equal(lm_to_dense(lm), m)
    assert isinstance(lm_from_dense(np.zeros((3, 3)), s, s), ZeroL)


def test_apply_agrees_with_dense():
    rng = np.random.default_rng(0)
    s = PairS(VecS(2, R), R)
    lm, M = rand_lm(rng, s, s)
    x = [0.5, -1.0, 2.0]
    assert np.allclose(flatten(lm_apply(lm, unflatten(s, x))), M @ np.array(x))


def test_matrices_category_ops():
    f = MAT.fork(MAT.scale(2.0), MAT.negateC())
    assert lm_to_dense(f).tolist() == [[2.0], [-1.0]]
    assert lm_to_dense(MAT.addC()).tolist() == [[1.0, 1.0]]
    assert lm_to_dense(MAT.jamI(3, R)).tolist() == [[1.0, 1.0, 1.0]]
    assert lm_to_dense(MAT.replI(2, R)).tolist() == [[1.0], [1.0]]
    assert lm_to_dense(MAT.hom_zero(R, PairS(R, R))).tolist() == [[0.0], [0.0]]


def test_format_dense():
    assert format_dense(np.array([[6.0, 8.0]])) == "6 8"
    assert format_dense(np.array([[0.1], [-2.0]])) == "0.10000000000000001\n-2"


# --- matrix-chain association ---------------------------------------------------


def test_chain_textbook_instance():
    cost, tree = chain_order([10, 100, 5, 50])
    assert cost == 7500
    assert format_chain(tree) == "((A1 A2) A3)"
    assert chain_cost([10, 100, 5, 50], tree) == 7500


def test_chain_single_matrix():
    assert chain_order([4, 7]) == (0, 1)
    assert format_chain(1) == "A1"


def test_chain_ties_prefer_smallest_split():
    # all associations of three square matrices cost the same
    cost, tree = chain_order([2, 2, 2, 2])
    assert cost == 16 and tree == (1, (2, 3))


@pytest.mark.parametrize("bad", [[], [3], [3, 0, 2], [2, -1]])
def test_chain_rejects_bad_dims(bad):
    with pytest.raises(ValueError):
        chain_order(bad)


def test_associations_are_catalan():
    catalan = [1, 1, 2, 5, 14, 42, 132, 429]
    for n in range(1, 9):
        assert sum(1 for _ in all_associations(1, n)) == catalan[n - 1]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=2, max_size=7))
def test_chain_matches_exhaustive(dims):
    cost, tree = chain_order(dims)
    best = min(chain_cost(dims, t) for t in all_associations(1, len(dims) - 1))
    assert cost == best == chain_cost(dims, tree)


def test_chain_products_agree_numerically():
    rng = np.random.default_rng(5)
    dims = [3, 6, 2, 5, 4]
    mats = [rng.normal(size=(dims[i], dims[i + 1])) for i in range(len(dims) - 1)]

    def product(t):
        return mats[t - 1] if isinstance(t, int) else product(t[0]) @ product(t[1])

    ref = np.linalg.multi_dot(mats)
    for t in all_associations(1, 4):
        assert np.allclose(product(t), ref)
