import pytest
from hypothesis import given, strategies as st

from catgrad.shape import (
    UNIT,
    UNIT_V,
    PairS,
    PairV,
    R,
    ScalarV,
    ShapeError,
    VecS,
    VecV,
    add,
    basis,
    check_conforms,
    conforms,
    dim,
    dot_value,
    flatten,
    neg,
    one_hot,
    parse_shape,
    scale_value,
    shape_of,
    sum_values,
    unflatten,
    zero,
)

shapes = st.recursive(
    st.sampled_from([R, UNIT]),
    lambda inner: st.one_of(
        st.builds(PairS, inner, inner),
        st.builds(VecS, st.integers(1, 3), inner),
    ),
    max_leaves=6,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


@st.composite
def shaped_value(draw, s=None):
    s = s if s is not None else draw(shapes)
    xs = draw(st.lists(finite, min_size=dim(s), max_size=dim(s)))
    return s, unflatten(s, xs)


@st.composite
def two_values(draw):
    s = draw(shapes)
    _, u = draw(shaped_value(s))
    _, v = draw(shaped_value(s))
    return s, u, v


def test_dims():
    assert dim(R) == 1
    assert dim(UNIT) == 0
    assert dim(PairS(R, PairS(R, R))) == 3
    assert dim(VecS(3, PairS(R, R))) == 6


def test_vector_arity_must_be_positive():
    with pytest.raises(ShapeError):
        VecS(0, R)


def test_zero_and_add():
    s = PairS(R, VecS(2, R))
    v = unflatten(s, [1.0, 2.0, 3.0])
    assert add(zero(s), v) == v
    assert flatten(add(v, v)) == [2.0, 4.0, 6.0]
    assert flatten(neg(v)) == [-1.0, -2.0, -3.0]
    assert add(UNIT_V, UNIT_V) == UNIT_V


def test_add_mismatch_reports_path():
    u = PairV(ScalarV(1.0), VecV((ScalarV(1.0), ScalarV(2.0))))
    v = PairV(ScalarV(1.0), VecV((ScalarV(1.0),)))
    with pytest.raises(ShapeError) as err:
        add(u, v)
    assert err.value.path == ".right"


def test_check_conforms_names_first_divergence():
    s = PairS(R, VecS(2, PairS(R, R)))
    bad = PairV(ScalarV(0.0), VecV((PairV(ScalarV(1.0), ScalarV(2.0)), ScalarV(3.0))))
    assert not conforms(bad, s)
    with pytest.raises(ShapeError) as err:
        check_conforms(bad, s)
    assert err.value.path == ".right[1]"
    assert "expected pair" in str(err.value)


def test_shape_of_rejects_ragged_vectors():
    with pytest.raises(ShapeError):
        shape_of(VecV((ScalarV(1.0), PairV(ScalarV(1.0), ScalarV(2.0)))))


def test_dot_value():
    s = PairS(R, VecS(2, R))
    u = unflatten(s, [1.0, 2.0, 3.0])
    v = unflatten(s, [4.0, 5.0, 6.0])
    assert dot_value(u, v) == 32.0
    assert dot_value(UNIT_V, UNIT_V) == 0.0


def test_basis_is_one_hot():
    s = VecS(2, PairS(R, R))
    b = basis(s)
    assert len(b) == 4
    assert flatten(b[2]) == [0.0, 0.0, 1.0, 0.0]
    assert one_hot(R, 0) == ScalarV(1.0)
    assert basis(UNIT) == []


def test_sum_values_empty_is_zero():
    assert sum_values([], PairS(R, R)) == zero(PairS(R, R))


def test_unflatten_wrong_length():
    with pytest.raises(ShapeError):
        unflatten(PairS(R, R), [1.0])


@pytest.mark.parametrize(
    "text, expected",
    [
        ("R", R),
        ("1", UNIT),
        ("()", UNIT),
        ("(R, R)", PairS(R, R)),
        ("((R,R),R)", PairS(PairS(R, R), R)),
        ("[3 x R]", VecS(3, R)),
        ("(R, [2 x (R, R)])", PairS(R, VecS(2, PairS(R, R)))),
    ],
)
def test_parse_shape(text, expected):
    assert parse_shape(text) == expected


@pytest.mark.parametrize("text", ["", "(R R)", "[x R]", "[0 x R]", "Q", "(R, R"])
def test_parse_shape_errors(text):
    with pytest.raises(ShapeError):
        parse_shape(text)


@given(shapes)
def test_shape_text_roundtrip(s):
    assert parse_shape(str(s)) == s


@given(shaped_value())
def test_flatten_roundtrip(sv):
    s, v = sv
    assert conforms(v, s)
    assert unflatten(s, flatten(v)) == v
    assert len(flatten(v)) == dim(s)


@given(two_values(), finite)
def test_vector_space_laws(uv, c):
    s, u, v = uv
    assert add(u, v) == add(v, u)
    assert add(u, zero(s)) == u
    assert flatten(add(u, neg(u))) == pytest.approx([0.0] * dim(s), abs=1e-9)
    assert flatten(scale_value(c, add(u, v))) == pytest.approx(
        flatten(add(scale_value(c, u), scale_value(c, v))), rel=1e-9, abs=1e-3
    )
