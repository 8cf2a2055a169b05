import pytest
from hypothesis import given, settings, strategies as st

from nilpcp.decision import (Decision, NpcpInstance, PcpInstance, conjugacy_via_npcp, decide_npcp1,
                             decide_npcp_nilpotent, decide_pcp_nilpotent, decide_verbal_pcp,
                             equalizer_generators, is_injective, wp_via_pcp)
from nilpcp.freegroup import Word, commutator
from nilpcp.hall import is_law
from nilpcp.nilpotent import free_abelian, heisenberg
from nilpcp.oracle import SearchBudget, brute_npcp_search, brute_pcp_search

H = heisenberg()
Z = free_abelian(1)
Z2 = free_abelian(2)
A1, A2, A3, ONE = (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)


def test_pcp_examples():
    d = decide_pcp_nilpotent(PcpInstance(2, Z, [(2,), (3,)], [(3,), (2,)]))
    assert d.answer and sorted(d.witness) == [1, 2]
    assert not decide_pcp_nilpotent(PcpInstance(1, Z, [(0,)], [(0,)])).answer
    assert not decide_pcp_nilpotent(PcpInstance(2, H, [A1, ONE], [ONE, A2])).answer


def test_equalizer_generators_heisenberg():
    FN, E = equalizer_generators(PcpInstance(2, H, [A1, ONE], [ONE, A2]))
    assert E.rows == ((0, 0, 1),)
    assert FN.lift(E.rows[0]) == Word([1, 2, -1, -2])


def test_npcp_examples():
    d = decide_npcp_nilpotent(NpcpInstance(1, Z, [(3,)], [(5,)], u1=(2,)))
    assert d.answer and d.witness == Word([1])
    assert not decide_npcp_nilpotent(NpcpInstance(1, Z, [(2,)], [(2,)], u1=(1,))).answer


def test_npcp1_examples():
    d = decide_npcp1(NpcpInstance(2, H, [A1, A2], [A2, A1]))
    assert d.answer and d.witness == Word()
    assert not decide_npcp1(NpcpInstance(1, Z, [(2,)], [(2,)], u1=(1,))).answer
    assert decide_npcp1(NpcpInstance(1, Z, [(3,)], [(5,)], u1=(2,))).answer


def test_wp_examples():
    assert wp_via_pcp(H, H.multiply(H.comm(A1, A2), H.invert(A3)))
    assert not wp_via_pcp(H, A3)
    assert wp_via_pcp(Z, Z.collect([1, 1, -1, -1]))


def test_conjugacy_examples():
    assert conjugacy_via_npcp(H, A1, H.multiply(A1, A3)).answer
    assert not conjugacy_via_npcp(H, A3, (0, 0, 2)).answer
    assert conjugacy_via_npcp(H, (2, 1, 5), (2, 1, 5)).answer


def test_verbal_pcp_examples():
    d = decide_verbal_pcp(PcpInstance(2, Z, [(2,), (3,)], [(3,), (2,)]))
    assert d.answer
    d = decide_verbal_pcp(PcpInstance(2, H, [A1, ONE], [ONE, A2]))
    assert d.answer and d.witness == Word([1, 2, -1, -2])
    assert decide_verbal_pcp(PcpInstance(1, Z, [(0,)], [(0,)])).answer


def test_injectivity_criterion():
    assert is_injective(H, [A3])
    assert not is_injective(H, [ONE])
    assert not is_injective(H, [A1, A2])


def test_decision_verdict_line():
    assert Decision(False).verdict_line() == "NO"
    assert Decision(True, Word([1, -2])).verdict_line() == "YES witness=1 -2"


h3_small = st.tuples(*[st.integers(-2, 2)] * 3)
z_small = st.tuples(st.integers(-3, 3))


def _pcp_against_oracle(I):
    d = decide_pcp_nilpotent(I)
    found = brute_pcp_search(I, SearchBudget(max_length=6))
    if found is not None:
        assert d.answer
    if d.answer:
        gw, hw = I.g_of(d.witness), I.h_of(d.witness)
        assert gw == hw and (gw != I.codomain.identity())


@settings(max_examples=40, deadline=None)
@given(st.lists(z_small, min_size=2, max_size=2), st.lists(z_small, min_size=2, max_size=2))
def test_pcp_over_z_agrees_with_search(g, h):
    I = PcpInstance(2, Z, g, h)
    d = decide_pcp_nilpotent(I)
    # over Z the answer is: some x with (g-h).x = 0 and g.x != 0
    import itertools
    exists = any(sum((a[0] - b[0]) * e for a, b, e in zip(g, h, x)) == 0
                 and sum(a[0] * e for a, e in zip(g, x)) != 0
                 for x in itertools.product(range(-6, 7), repeat=2))
    assert d.answer == exists
    _pcp_against_oracle(I)


@settings(max_examples=25, deadline=None)
@given(st.lists(h3_small, min_size=2, max_size=2), st.lists(h3_small, min_size=2, max_size=2))
def test_pcp_over_h3_agrees_with_search(g, h):
    _pcp_against_oracle(PcpInstance(2, H, g, h))


@settings(max_examples=25, deadline=None)
@given(st.lists(z_small, min_size=1, max_size=2), st.data())
def test_npcp_over_z2_agrees_with_search(g, data):
    r = len(g)
    h = data.draw(st.lists(z_small, min_size=r, max_size=r))
    u1 = data.draw(z_small)
    I = NpcpInstance(r, Z, g, h, u1=u1)
    d = decide_npcp_nilpotent(I)
    found = brute_npcp_search(I, SearchBudget(max_length=5))
    if found is not None:
        assert d.answer
    if d.answer:
        left, right = I.sides(d.witness)
        assert d.witness and left == right


@settings(max_examples=15, deadline=None)
@given(st.lists(h3_small, min_size=2, max_size=2), st.lists(h3_small, min_size=2, max_size=2), h3_small,
       h3_small)
def test_npcp_over_h3_witnesses(g, h, u1, v2):
    I = NpcpInstance(2, H, g, h, u1=u1, v2=v2)
    d = decide_npcp_nilpotent(I)
    if d.answer:
        left, right = I.sides(d.witness)
        assert d.witness and left == right
    else:
        assert brute_npcp_search(I, SearchBudget(max_length=4)) is None


@settings(max_examples=15, deadline=None)
@given(st.lists(h3_small, min_size=2, max_size=2), st.lists(h3_small, min_size=2, max_size=2), h3_small,
       h3_small)
def test_npcp1_is_npcp_or_trivial_solution(g, h, u1, v2):
    I = NpcpInstance(2, H, g, h, u1=u1, v2=v2)
    expected = decide_npcp_nilpotent(I).answer or H.multiply(I.u1, I.u2) == H.multiply(I.v1, I.v2)
    assert decide_npcp1(I).answer == expected


@settings(max_examples=15, deadline=None)
@given(h3_small, h3_small)
def test_npcp_matches_pcp_for_injective_maps(g, h):
    # ker g is trivial, so nontrivial solutions of g(x) = h(x) are exactly PCP solutions
    I = NpcpInstance(1, H, [g], [h])
    assert decide_npcp1(I).answer
    if is_injective(H, [g]):
        assert decide_npcp_nilpotent(I).answer == decide_pcp_nilpotent(PcpInstance(1, H, [g], [h])).answer


@settings(max_examples=20, deadline=None)
@given(st.lists(h3_small, min_size=2, max_size=2), st.lists(h3_small, min_size=2, max_size=2))
def test_verbal_pcp_contains_kernel_pcp(g, h):
    # the verbal subgroup lies inside ker g n ker h, so a kernel-based yes is also a verbal yes
    I = PcpInstance(2, H, g, h)
    if decide_pcp_nilpotent(I).answer:
        assert decide_verbal_pcp(I).answer
