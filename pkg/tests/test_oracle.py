import pytest
from hypothesis import given, settings, strategies as st

from nilpcp.decision import NpcpInstance, PcpInstance
from nilpcp.freegroup import Word
from nilpcp.hall import PolyQ
from nilpcp.nilpotent import free_abelian, heisenberg
from nilpcp.oracle import (BudgetExhausted, SearchBudget, brute_npcp_search, brute_pcp_search,
                           brute_product_membership, grid_zero_test, h3_product_membership, reduced_words)

H = heisenberg()
Z = free_abelian(1)


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(max_length=0)
    with pytest.raises(ValueError):
        SearchBudget(seconds=0)


def test_reduced_words_counts():
    words = list(reduced_words(2, 3))
    assert len(words) == 4 + 12 + 36
    assert words[0] == Word([1])
    assert all(len(w) == len(Word(w)) for w in words)


def test_pcp_search_finds_shortest():
    w = brute_pcp_search(PcpInstance(2, Z, [(2,), (3,)], [(3,), (2,)]), SearchBudget(max_length=4))
    assert w == Word([1, 2])
    assert brute_pcp_search(PcpInstance(1, Z, [(1,)], [(2,)]), SearchBudget(max_length=5)) is None


def test_pcp_search_time_cap():
    I = PcpInstance(2, H, [(1, 0, 0), (0, 0, 0)], [(0, 0, 0), (0, 1, 0)])
    with pytest.raises(BudgetExhausted):
        brute_pcp_search(I, SearchBudget(max_length=30, seconds=0.05))


def test_npcp_search():
    I = NpcpInstance(1, Z, [(3,)], [(5,)], u1=(2,))
    assert brute_npcp_search(I, SearchBudget(max_length=3)) == Word([1])
    J = NpcpInstance(1, Z, [(1,)], [(1,)])
    assert brute_npcp_search(J, SearchBudget(max_length=3), allow_empty=True) == Word()


def test_bounded_product_membership():
    assert brute_product_membership(H, [(1, 0, 0)], [(0, 1, 0)], (1, 1, 0), SearchBudget(2, 2))
    assert not brute_product_membership(H, [(1, 0, 0)], [(0, 1, 0)], (0, 0, 1), SearchBudget(2, 2))


def test_h3_oracle_examples():
    assert h3_product_membership([(1, 0, 0)], [(0, 1, 0)], (1, 1, 0))
    assert not h3_product_membership([(1, 0, 0)], [(0, 1, 0)], (0, 0, 1))
    assert h3_product_membership([(1, 0, 0), (0, 1, 0)], [], (0, 0, 1))
    assert h3_product_membership([(0, 0, 2)], [(0, 0, 3)], (0, 0, 1))
    assert not h3_product_membership([(0, 0, 2)], [(0, 0, 4)], (0, 0, 1))


elt = st.tuples(*[st.integers(-2, 2)] * 3)


@settings(max_examples=60, deadline=None)
@given(st.lists(elt, min_size=1, max_size=2), st.lists(elt, min_size=1, max_size=2), elt)
def test_h3_oracle_extends_bounded_search(a, b, x):
    # whatever the bounded search finds, the exact check must accept
    if brute_product_membership(H, a, b, x, SearchBudget(max_length=2, max_exponent=2)):
        assert h3_product_membership(a, b, x)


def test_grid_zero_test():
    x, y = PolyQ.var("x"), PolyQ.var("y")
    assert grid_zero_test((x + y) ** 2 - x * x - 2 * x * y - y * y, [2, 2])
    assert not grid_zero_test(x * (x - 1) * (x - 2) - PolyQ(), {"x": 3})
    with pytest.raises(ValueError):
        grid_zero_test(x * x, {"x": 1})
    assert grid_zero_test(PolyQ(), [])
