"""Acceptance criteria, one test per criterion.

The terminal summary prints a PASS/FAIL line for each criterion (see conftest.py).
"""
import itertools
import math
import random
import time

import pytest

from matrix_models import F23_REPS, H3_GENS, eye, h3_coords, mat_mul, mat_pow, uni_inverse, word_matrix
from nilpcp.decision import (NpcpInstance, PcpInstance, conjugacy_via_npcp, decide_npcp1, decide_npcp_nilpotent,
                             decide_pcp_nilpotent, decide_verbal_pcp, equalizer_generators, wp_via_pcp)
from nilpcp.freegroup import PermAction, Word
from nilpcp.hall import LawWord, PolyQ, is_law, multiplication_polynomials, word_value_polynomials
from nilpcp.linalg import det, hermite_normal_form, matmul, smith_normal_form
from nilpcp.nilpotent import direct_product, free_abelian, heisenberg
from nilpcp.oracle import (SearchBudget, bounded_product_set, brute_npcp_search, brute_pcp_search,
                           grid_zero_test, h3_product_membership)
from nilpcp.subgroups import igs_from_generators, kernel, product_membership
from nilpcp.varieties import free_nilpotent, verbal_product
from nilpcp.virtual import (VirtualElement, decide_pcp_virtual, infinite_dihedral, restrict_instance, v_invert,
                            v_multiply, z2_swap)

H = heisenberg()
Z = free_abelian(1)
Z2 = free_abelian(2)
A1, A2, A3, ONE = (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f} s, limit {self.limit} s"


# -- 1 ----------------------------------------------------------------------

def _dfs_agree(P, gens, mats, max_len, check):
    """Walk all reduced words up to max_len, carrying the group element and its matrix."""
    letters = [x for i in range(1, len(gens) + 1) for x in (i, -i)]
    step = {x: (gens[x - 1] if x > 0 else P.invert(gens[-x - 1])) for x in letters}
    mstep = {x: (mats[x - 1] if x > 0 else uni_inverse(mats[-x - 1])) for x in letters}
    count = 0
    stack = [((), P.identity(), eye(len(mats[0])))]
    while stack:
        w, g, M = stack.pop()
        check(g, M)
        count += 1
        if len(w) == max_len:
            continue
        for x in letters:
            if w and w[-1] == -x:
                continue
            stack.append((w + (x,), P.multiply(g, step[x]), mat_mul(M, mstep[x])))
    return count


@pytest.mark.criterion(1, "collection agrees with unitriangular matrix models")
def test_collection_matches_matrix_models():
    with Clock(30):
        def check_h3(g, M):
            assert g == h3_coords(M)

        n = _dfs_agree(H, [A1, A2, A3], list(H3_GENS), 8, check_h3)
        assert n == 1 + sum(6 * 5 ** (k - 1) for k in range(1, 9))

        F = free_nilpotent(2, 3)
        P = F.presentation
        # the two representations are jointly faithful: they separate each layer
        basis_imgs = [[word_matrix(rep, w) for w in F.lift_words] for rep in F23_REPS]
        corner = [[M[0][3] for M in imgs[3:5]] for imgs in basis_imgs]
        assert det(corner) != 0
        assert any(imgs[2] != eye(4) for imgs in basis_imgs)

        def normal_form_matrix(rep_imgs, x):
            M = eye(4)
            for B, e in zip(rep_imgs, x):
                M = mat_mul(M, mat_pow(B, e))
            return M

        for rep, imgs in zip(F23_REPS, basis_imgs):
            def check_f23(g, M, imgs=imgs):
                assert normal_form_matrix(imgs, g) == M

            _dfs_agree(P, [P.gen(0), P.gen(1)], list(rep), 6, check_f23)
        # collect() on words, not just right multiplication by letters
        rng = random.Random(11)
        for _ in range(300):
            w = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(rng.randint(0, 8))]
            assert H.collect(w) == h3_coords(word_matrix(H3_GENS, w))


# -- 2 ----------------------------------------------------------------------

@pytest.mark.criterion(2, "Hall polynomials of H3 agree with collection on [-3,3]^6")
def test_hall_polynomials_h3():
    with Clock(10):
        x = [PolyQ.var(f"x{i}") for i in (1, 2, 3)]
        y = [PolyQ.var(f"y{i}") for i in (1, 2, 3)]
        d = multiplication_polynomials(H)
        assert d == [x[0] + y[0], x[1] + y[1], x[2] + y[2] - x[1] * y[0]]
        names = [f"x{i}" for i in (1, 2, 3)] + [f"y{i}" for i in (1, 2, 3)]
        fs = [p.compile(names) for p in d]
        for pt in itertools.product(range(-3, 4), repeat=6):
            assert tuple(f(*pt) for f in fs) == H.multiply(pt[:3], pt[3:])


# -- 3 ----------------------------------------------------------------------

def _class_two_corpus():
    return {
        "Z": (Z, True),
        "Z^2": (Z2, True),
        "Z^3": (free_abelian(3), True),
        "H3": (H, False),
        "H3 x Z": (direct_product(H, Z), False),
        "H3 x H3": (direct_product(H, H), False),
        "F(3,2)": (free_nilpotent(3, 2).presentation, False),
    }


def _grid_law(P, w):
    polys = word_value_polynomials(P, w)
    return all(grid_zero_test(p, {v: p.degree(v) for v in p.variables()}) for p in polys)


@pytest.mark.criterion(3, "law checking on the class-2 corpus")
def test_law_checking():
    with Clock(10):
        comm = LawWord.parse("[X1,X2]")
        triple = LawWord.parse("[[X1,X2],X3]")
        for name, (P, abelian) in _class_two_corpus().items():
            assert is_law(P, triple), name
            assert _grid_law(P, triple), name
            assert is_law(P, comm) == abelian, name
            assert _grid_law(P, comm) == abelian, name
        assert not is_law(H, comm)


# -- 4 ----------------------------------------------------------------------

@pytest.mark.criterion(4, "HNF/SNF postconditions on 500 random matrices")
def test_normal_forms_random():
    rng = random.Random(2024)
    with Clock(10):
        for _ in range(500):
            r, c = rng.randint(1, 6), rng.randint(1, 6)
            M = [[rng.randint(-10, 10) for _ in range(c)] for _ in range(r)]
            Hm, U = hermite_normal_form(M)
            assert abs(det(U)) == 1 and matmul(U, M) == Hm
            pivots = []
            for row in Hm:
                nz = [j for j, v in enumerate(row) if v]
                if nz:
                    assert row[nz[0]] > 0
                    pivots.append(nz[0])
                else:
                    pivots.append(c)
            assert all(p < q for p, q in zip(pivots, pivots[1:]) if p < c)
            S, U, V = smith_normal_form(M)
            assert abs(det(U)) == 1 and abs(det(V)) == 1
            assert matmul(matmul(U, M), V) == S
            diag = [S[i][i] for i in range(min(r, c))]
            assert all(S[i][j] == 0 for i in range(r) for j in range(c) if i != j)
            nz = [v for v in diag if v]
            assert diag[:len(nz)] == nz and all(v > 0 for v in nz)
            assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


# -- 5 ----------------------------------------------------------------------

@pytest.mark.criterion(5, "equalizers of the two reference instances")
def test_equalizers():
    with Clock(10):
        FN, E = equalizer_generators(PcpInstance(2, Z, [(2,), (3,)], [(3,), (2,)]))
        assert FN.presentation == Z2
        for t in range(-10, 11):
            assert (t, t) in E
        for x in itertools.product(range(-10, 11), repeat=2):
            assert (x in E) == (x[0] == x[1])
        FN, E = equalizer_generators(PcpInstance(2, H, [A1, ONE], [ONE, A2]))
        F = FN.presentation
        assert E.same_as(igs_from_generators(F, [FN.project([1, 2, -1, -2])]))


# -- 6 ----------------------------------------------------------------------

def _h3_subgroup_corpus(rng, count):
    subs = []
    while len(subs) < count:
        k = rng.choice([1, 2])
        gens = tuple(tuple(rng.randint(-3, 3) for _ in range(3)) for _ in range(k))
        if gens not in subs:
            subs.append(gens)
    return subs


@pytest.mark.criterion(6, "product membership agrees with the oracles on H3")
def test_product_membership_h3():
    rng = random.Random(6)
    subs = _h3_subgroup_corpus(rng, 20)
    xs = list(itertools.product(range(-3, 4), repeat=3))
    bounded = SearchBudget(max_length=2, max_exponent=3)
    cases = disagreements = found_by_search = 0
    with Clock(300):
        for A_gens, B_gens in zip(subs[:10] * 10, [b for b in subs[10:] for _ in range(10)]):
            A, B = igs_from_generators(H, A_gens), igs_from_generators(H, B_gens)
            near = bounded_product_set(H, A_gens, B_gens, bounded)
            for x in xs:
                ok, pair = product_membership(H, A, B, x)
                cases += 1
                if ok:
                    a, b = pair
                    assert a in A and b in B and H.multiply(a, b) == x
                if x in near:
                    found_by_search += 1
                    assert ok, (A_gens, B_gens, x)
                if ok != h3_product_membership(A_gens, B_gens, x):
                    disagreements += 1
    print(f"{cases} cases, {found_by_search} confirmed by bounded search, {disagreements} disagreements")
    assert cases >= 3000
    assert disagreements == 0


# -- 7 ----------------------------------------------------------------------

# (name, instance, expected, reason for a NO)
def _pcp_corpus():
    return [
        ("Z swap", PcpInstance(2, Z, [(2,), (3,)], [(3,), (2,)]), True, None),
        ("Z zero maps", PcpInstance(1, Z, [(0,)], [(0,)]), False, "Eq = ker g = ker h"),
        ("Z n = 2n", PcpInstance(1, Z, [(1,)], [(2,)]), False, "n = 2n forces n = 0"),
        ("Z equal maps", PcpInstance(1, Z, [(4,)], [(4,)]), True, None),
        ("Z doubled", PcpInstance(2, Z, [(1,), (1,)], [(2,), (2,)]), False,
         "s = 2s for s = exponent sum, so g(x) = s = 0"),
        ("Z opposite", PcpInstance(2, Z, [(1,), (-1,)], [(-1,), (1,)]), False,
         "a - b = b - a forces equal exponent sums, then g(x) = 0"),
        ("Z^2 swap", PcpInstance(2, Z2, [(1, 0), (0, 1)], [(0, 1), (1, 0)]), True, None),
        ("Z^2 axes", PcpInstance(1, Z2, [(1, 0)], [(0, 1)]), False, "(n, 0) = (0, n) forces n = 0"),
        ("Z^2 shifted", PcpInstance(2, Z2, [(1, 2), (0, 0)], [(0, 0), (1, 2)]), True, None),
        ("H3 reference", PcpInstance(2, H, [A1, ONE], [ONE, A2]), False,
         "a1^s = a2^t forces s = t = 0; Eq = <[a, b]> lies in both kernels"),
        ("H3 central", PcpInstance(2, H, [A1, A3], [A1, (0, 0, 2)]), True, None),
        ("H3 inverse centre", PcpInstance(1, H, [A3], [(0, 0, -1)]), False, "a3^n = a3^-n forces n = 0"),
    ]


@pytest.mark.criterion(7, "PCP verdicts on the 12-instance corpus")
def test_pcp_corpus():
    corpus = _pcp_corpus()
    assert len(corpus) == 12
    with Clock(60):
        for name, I, expected, reason in corpus:
            d = decide_pcp_nilpotent(I)
            assert d.answer == expected, name
            found = brute_pcp_search(I, SearchBudget(max_length=8 if I.alphabet_size == 1 else 6))
            if expected:
                # the YES certificate is a witness found by enumeration
                assert found is not None, name
                gw, hw = I.g_of(d.witness), I.h_of(d.witness)
                assert gw == hw and gw != I.codomain.identity(), name
            else:
                assert reason and found is None, name


# -- 8 ----------------------------------------------------------------------

def _npcp_corpus():
    gens = [H.gen(i) for i in range(3)]

    def conj(u, v):
        return NpcpInstance(3, H, gens, gens, u1=u, v2=v)

    return [
        ("2 + 3n = 5n", NpcpInstance(1, Z, [(3,)], [(5,)], u1=(2,)), True),
        ("1 + 2n = 2n", NpcpInstance(1, Z, [(2,)], [(2,)], u1=(1,)), False),
        ("3 + n = 2n + 1", NpcpInstance(1, Z, [(1,)], [(2,)], u1=(3,), v2=(1,)), True),
        ("a1 ~ a1 a3", conj(A1, (1, 0, 1)), True),
        ("a3 ~ a3^2", conj(A3, (0, 0, 2)), False),
        ("u ~ u", conj((2, 1, 5), (2, 1, 5)), True),
        ("a1 ~ a2", conj(A1, A2), False),
    ]


def _conjugate_by_search(u, v, bound=6):
    r = range(-bound, bound + 1)
    return any(H.conjugate(u, y) == v for y in itertools.product(r, r, r))


def _search_bound_is_complete(bound=6):
    # conjugates of (p, q, z) are (p, q, z + k gcd(p, q)); every such target with
    # coordinates in [-3, 3] must be reached by a conjugator inside the bound
    r = range(-bound, bound + 1)
    for u in itertools.product(range(-3, 4), repeat=3):
        reach = {H.conjugate(u, y) for y in itertools.product(r, r, [0])}
        g = math.gcd(u[0], u[1])
        for z in range(-3, 4):
            if ((z - u[2]) % g == 0 if g else z == u[2]) and (u[0], u[1], z) not in reach:
                return False
    return True


@pytest.mark.criterion(8, "NPCP verdicts, conjugacy and verbal products")
def test_npcp_and_conjugacy():
    with Clock(300):
        for name, I, expected in _npcp_corpus():
            d = decide_npcp_nilpotent(I)
            assert d.answer == expected, name
            if expected:
                left, right = I.sides(d.witness)
                assert d.witness and left == right
                assert brute_npcp_search(I, SearchBudget(max_length=3)) is not None, name
        assert _search_bound_is_complete()
        rng = random.Random(8)
        agree = 0
        for k in range(50):
            u = tuple(rng.randint(-3, 3) for _ in range(3))
            if k % 2:
                v = (u[0], u[1], rng.randint(-3, 3))
            else:
                v = tuple(rng.randint(-3, 3) for _ in range(3))
            d = conjugacy_via_npcp(H, u, v)
            assert d.answer == _conjugate_by_search(u, v), (u, v)
            if d.answer and d.witness:
                y = H.collect(d.witness)
                assert H.multiply(u, y) == H.multiply(y, v)
            agree += 1
        assert agree == 50
        for A, B, n in [(Z, Z, 3), (H, Z, 6)]:
            vp = verbal_product(A, B, 2)
            VP = vp.presentation
            assert VP.n == n
            assert kernel(A, VP, vp.embed_a).is_trivial() and kernel(B, VP, vp.embed_b).is_trivial()
            for e in vp.embed_a:
                assert VP.eval_images(B, vp.projection, e) == B.identity()
            for i, e in enumerate(vp.embed_b):
                assert VP.eval_images(B, vp.projection, e) == B.gen(i)
        assert verbal_product(Z, Z, 2).presentation == free_nilpotent(2, 2).presentation


# -- 9 ----------------------------------------------------------------------

@pytest.mark.criterion(9, "verbal PCP verdicts and the contrast with the kernel PCP")
def test_verbal_pcp():
    with Clock(60):
        d = decide_verbal_pcp(PcpInstance(2, Z, [(2,), (3,)], [(3,), (2,)]))
        assert d.answer and not is_law(Z, LawWord.from_signed(d.witness))
        shared = PcpInstance(2, H, [A1, ONE], [ONE, A2])
        d = decide_verbal_pcp(shared)
        assert d.answer and d.witness == Word([1, 2, -1, -2])
        assert shared.g_of(d.witness) == shared.h_of(d.witness) == ONE
        assert not decide_pcp_nilpotent(shared).answer
        d = decide_verbal_pcp(PcpInstance(1, Z, [(0,)], [(0,)]))
        assert d.answer and d.witness == Word([1])


# -- 10 ---------------------------------------------------------------------

def _orbit_size(I):
    G = I.codomain
    perms = []
    for a in range(I.alphabet_size):
        gc, hc = I.g[a].coset, I.h[a].coset
        perms.append(tuple(G.sigma[p // G.m][gc] * G.m + G.sigma[p % G.m][hc] for p in range(G.m ** 2)))
    return len(PermAction(G.m ** 2, tuple(perms)).orbit(0))


def _virtual_check(I, expected=None):
    d = decide_pcp_virtual(I)
    found = brute_pcp_search(I, SearchBudget(max_length=8))
    if found is not None:
        assert d.answer
    if expected is not None:
        assert d.answer == expected
    if d.answer:
        gw = I.g_of(d.witness)
        assert gw == I.h_of(d.witness) and gw != I.codomain.identity()
    basis, reps, sub = restrict_instance(I)
    assert len(reps) == _orbit_size(I)
    for b in basis:
        assert I.g_of(b).coset == 0 and I.h_of(b).coset == 0
    return d.answer, found is not None


@pytest.mark.criterion(10, "virtually nilpotent corpus (D-infinity and a crystallographic group)")
def test_virtual_corpus():
    D = infinite_dihedral()
    r, s = D.generators
    with Clock(300):
        _virtual_check(PcpInstance(1, D, [r], [v_invert(D, r)]), False)
        _virtual_check(PcpInstance(1, D, [s], [s]), True)
        _virtual_check(PcpInstance(1, D, [v_multiply(D, r, s)], [v_multiply(D, s, r)]), False)
        rng = random.Random(10)
        kept = {True: 0, False: 0}
        quota = {True: 3, False: 2}
        while kept[True] + kept[False] < 5:
            r = rng.randint(1, 2)
            g = [VirtualElement((rng.randint(-2, 2),), rng.randint(0, 1)) for _ in range(r)]
            h = [VirtualElement((rng.randint(-2, 2),), rng.randint(0, 1)) for _ in range(r)]
            answer, confirmed = _virtual_check(PcpInstance(r, D, g, h))
            # keep instances whose verdict the length-8 search confirms, with both verdicts present
            if answer == confirmed and kept[answer] < quota[answer]:
                kept[answer] += 1
        G = z2_swap()
        x, t = G.generators
        _virtual_check(PcpInstance(2, G, [t, x], [t, VirtualElement((0, 1), 0)]), True)


# -- 11 ---------------------------------------------------------------------

@pytest.mark.criterion(11, "reduction coherence for WP and NPCP1")
def test_reduction_coherence():
    rng = random.Random(11)
    with Clock(60):
        for k in range(500):
            w = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(rng.randint(0, 10))]
            x = H.collect(w)
            if k % 2:
                # append a word for the inverse, making the whole word trivial
                w = w + H.word_of(H.invert(x))
                x = H.collect(w)
            assert wp_via_pcp(H, x) == (x == ONE)
        for name, I, _ in _npcp_corpus():
            K = I.codomain
            trivial = K.multiply(I.u1, I.u2) == K.multiply(I.v1, I.v2)
            assert decide_npcp1(I).answer == (decide_npcp_nilpotent(I).answer or trivial), name
