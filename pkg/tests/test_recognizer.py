import pytest
from hypothesis import given, settings, strategies as st

from bcfl.grammar import HOLE, UnknownTokenError
from bcfl.oracle import enumerate_completions
from bcfl.recognizer import (PorousString, leaf_set, recognize, set_matrix, set_product,
                             squaring_fixpoint)

from conftest import porous_instances


def _pre(g, t):
    (w,) = leaf_set(t, g)
    return w


def test_set_product(dyck):
    L, R = _pre(dyck, "("), _pre(dyck, ")")
    assert set_product({L}, {R}, dyck) == {"S"}
    assert set_product(set(), {R, L, "S"}, dyck) == frozenset()
    (Q,) = set_product({L}, {"S"}, dyck)
    assert Q not in (L, R, "S")


@pytest.mark.parametrize("text,expected", [
    ("( )", True),
    ("( ( )", False),
    ("_ _", True),
    ("( _ )", False),
    ("_ _ _ _", True),
    ("( (", False),
    (") _ _ (", False),
])
def test_recognize_dyck(dyck, text, expected):
    assert recognize(dyck, text) is expected


def test_unknown_token(dyck):
    with pytest.raises(UnknownTokenError, match="'x'"):
        recognize(dyck, "( x )")


def test_empty_string_rejected(dyck):
    with pytest.raises(ValueError):
        recognize(dyck, "")


def test_superdiagonal_is_leaf_sets(dyck):
    m = set_matrix(dyck, "( _ )")
    assert m[(0, 1)] == leaf_set("(", dyck)
    assert m[(1, 2)] == leaf_set("(", dyck) | leaf_set(")", dyck)
    assert m[(2, 3)] == leaf_set(")", dyck)
    assert all(c > r for r, c in m)


def test_porous_string_admits():
    s = PorousString.parse("( _ ) _")
    assert s.holes == (1, 3)
    assert s.admits(["(", "(", ")", ")"])
    assert not s.admits([")", "(", ")", ")"])
    assert not s.admits(["("])


@pytest.mark.parametrize("grammar", ["dyck", "expr"])
def test_oracle_equivalence(grammar, request):
    g = request.getfixturevalue(grammar)
    for s in porous_instances(g, max_len=5, reps=1, seed=7):
        assert recognize(g, s) == bool(enumerate_completions(g, s)), s


@pytest.mark.parametrize("grammar", ["dyck", "expr"])
def test_span_schedule_matches_squaring(grammar, request):
    g = request.getfixturevalue(grammar)
    for s in porous_instances(g, max_len=5, reps=1, seed=3)[::5]:
        assert set_matrix(g, s) == squaring_fixpoint(g, s), s


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(["(", ")", HOLE]), min_size=1, max_size=8), st.data())
def test_hole_monotonicity(dyck, tokens, data):
    pos = data.draw(st.integers(0, len(tokens) - 1))
    widened = list(tokens)
    widened[pos] = HOLE
    if recognize(dyck, tokens):
        assert recognize(dyck, widened)
