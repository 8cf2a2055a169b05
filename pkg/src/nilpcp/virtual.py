"""Finite extensions of torsion-free nilpotent groups, and the PCP over them.

A virtually nilpotent group is given as extension data over a normal
finite-index subgroup K: transversal t_0 = 1, t_1, ..., t_{m-1}, the
automorphisms phi_i(k) = t_i k t_i^-1 of K, and the table
t_i t_j = f(i, j) t_{sigma(i, j)}. Elements are pairs (k, i) meaning k t_i.
Coset indices are 0-based in code.
"""
from __future__ import annotations

from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .decision import (Decision, NpcpInstance, PcpInstance, RevalidationError,
                       decide_npcp_nilpotent, decide_pcp_nilpotent)
from .freegroup import PermAction, Word, evaluate_word, stabilizer_basis, substitute
from .nilpotent import NilElement, NilpotentPresentation
from .subgroups import check_hom, igs_from_generators, whole_group


class ExtensionError(ValueError):
    pass


class VirtualElement(NamedTuple):
    k: NilElement
    coset: int


class VirtualGroup:
    def __init__(self, kernel: NilpotentPresentation, m: int,
                 action: Sequence[Sequence[Sequence[int]]],
                 sigma: Optional[Sequence[Sequence[int]]] = None,
                 factors: Optional[Mapping[Tuple[int, int], Sequence[int]]] = None,
                 generators: Optional[Sequence[VirtualElement]] = None,
                 names: Optional[Sequence[str]] = None):
        K = kernel
        self.K = kernel
        self.m = m
        if m < 1:
            raise ExtensionError("need at least one coset")
        if len(action) != m:
            raise ExtensionError(f"need {m} automorphisms, got {len(action)}")
        self.action = [tuple(K.element(v) for v in a) for a in action]
        if sigma is None:
            sigma = [[(i + j) % m for j in range(m)] for i in range(m)]
        self.sigma = [list(row) for row in sigma]
        self.factors: Dict[Tuple[int, int], NilElement] = {}
        for (i, j), v in (factors or {}).items():
            v = K.element(v)
            if any(v):
                self.factors[(i, j)] = v
        if generators is None:
            generators = [VirtualElement(K.gen(i), 0) for i in range(K.n)] + \
                         [VirtualElement(K.identity(), i) for i in range(1, m)]
        self.generators = [self.element(g) for g in generators]
        self.names = list(names) if names else [f"s{i + 1}" for i in range(len(self.generators))]
        self._inverse_coset = {}
        self._validate()

    # -- group interface used by word evaluation --------------------------
    def element(self, x) -> VirtualElement:
        if isinstance(x, VirtualElement):
            return VirtualElement(self.K.element(x.k), int(x.coset))
        k, i = x
        return VirtualElement(self.K.element(k), int(i))

    def identity(self) -> VirtualElement:
        return VirtualElement(self.K.identity(), 0)

    def factor(self, i: int, j: int) -> NilElement:
        return self.factors.get((i, j), self.K.identity())

    def phi(self, i: int, k: Sequence[int]) -> NilElement:
        if i == 0:
            return tuple(k)
        return self.K.eval_images(self.K, self.action[i], k)

    def phi_inverse(self, i: int, k: Sequence[int]) -> NilElement:
        K = self.K
        j = self._inverse_coset[i]
        f = self.factor(i, j)
        return self.phi(j, K.multiply(K.invert(f), K.multiply(k, f)))

    def multiply(self, x: VirtualElement, y: VirtualElement) -> VirtualElement:
        K = self.K
        k = K.multiply(K.multiply(x.k, self.phi(x.coset, y.k)), self.factor(x.coset, y.coset))
        return VirtualElement(k, self.sigma[x.coset][y.coset])

    def invert(self, x: VirtualElement) -> VirtualElement:
        K = self.K
        i = x.coset
        j = self._inverse_coset[i]
        # t_i^-1 = t_j f(i, j)^-1
        t_inv = VirtualElement(self.phi(j, K.invert(self.factor(i, j))), j)
        return self.multiply(t_inv, VirtualElement(K.invert(x.k), 0))

    def power(self, x: VirtualElement, e: int) -> VirtualElement:
        if e < 0:
            x, e = self.invert(x), -e
        out = self.identity()
        while e:
            if e & 1:
                out = self.multiply(out, x)
            e >>= 1
            if e:
                x = self.multiply(x, x)
        return out

    def in_kernel(self, x: VirtualElement) -> bool:
        return x.coset == 0

    def coset_action(self, elements: Sequence[VirtualElement]) -> PermAction:
        """Right action on the cosets K t_i of the given elements."""
        return PermAction(self.m, tuple(tuple(self.sigma[i][x.coset] for i in range(self.m))
                                        for x in elements))

    # -- validation -------------------------------------------------------
    def _validate(self):
        K, m = self.K, self.m
        if len(self.sigma) != m or any(len(r) != m for r in self.sigma):
            raise ExtensionError("coset table must be m x m")
        for i in range(m):
            if self.sigma[0][i] != i or self.sigma[i][0] != i:
                raise ExtensionError("t_1 must be the identity coset")
            if sorted(self.sigma[i]) != list(range(m)):
                raise ExtensionError(f"row {i + 1} of the coset table is not a permutation")
            if any(self.factor(0, i)) or any(self.factor(i, 0)):
                raise ExtensionError("factors involving t_1 must be trivial")
            inv = [j for j in range(m) if self.sigma[i][j] == 0]
            if len(inv) != 1:
                raise ExtensionError(f"t_{i + 1} has no unique inverse coset")
            self._inverse_coset[i] = inv[0]
        gens = [K.gen(a) for a in range(K.n)]
        if any(a != b for a, b in zip(self.action[0], gens)):
            raise ExtensionError("t_1 must act trivially")
        for i in range(m):
            if len(self.action[i]) != K.n:
                raise ExtensionError(f"action of t_{i + 1} needs {K.n} images")
            try:
                check_hom(K, K, self.action[i])
            except ValueError as e:
                raise ExtensionError(f"action of t_{i + 1} is not an endomorphism: {e}") from None
            for a in gens:
                if self.phi(i, self.phi_inverse(i, a)) != a or self.phi_inverse(i, self.phi(i, a)) != a:
                    raise ExtensionError(f"action of t_{i + 1} is not invertible")
        for i in range(m):
            for j in range(m):
                f = self.factor(i, j)
                s = self.sigma[i][j]
                for a in gens:
                    lhs = self.phi(i, self.phi(j, a))
                    rhs = K.multiply(K.multiply(f, self.phi(s, a)), K.invert(f))
                    if lhs != rhs:
                        raise ExtensionError(f"t_{i + 1} t_{j + 1} does not act as recorded")
        ts = [VirtualElement(K.identity(), i) for i in range(m)]
        for x in ts:
            for y in ts:
                xy = self.multiply(x, y)
                for z in ts:
                    if self.multiply(xy, z) != self.multiply(x, self.multiply(y, z)):
                        raise ExtensionError(
                            f"factor set fails associativity at ({x.coset + 1}, {y.coset + 1}, {z.coset + 1})")
        self._check_generation()

    def _check_generation(self):
        gens = self.generators
        if not gens:
            if self.m == 1 and self.K.n == 0:
                return
            raise ExtensionError("no generators")
        act = self.coset_action(gens)
        if len(act.orbit(0)) != self.m:
            raise ExtensionError("generators do not reach every coset")
        basis, _ = stabilizer_basis(act, len(gens), 0)
        ks = [evaluate_word(self, gens, b).k for b in basis]
        if igs_from_generators(self.K, ks) != whole_group(self.K):
            raise ExtensionError("generators do not generate the kernel")


def v_multiply(G: VirtualGroup, x, y) -> VirtualElement:
    return G.multiply(G.element(x), G.element(y))


def v_invert(G: VirtualGroup, x) -> VirtualElement:
    return G.invert(G.element(x))


def in_kernel(G: VirtualGroup, x) -> bool:
    return G.in_kernel(G.element(x))


def restrict_instance(I: PcpInstance) -> Tuple[List[Word], List[Word], PcpInstance]:
    """Free basis of N = g^-1(K) n h^-1(K), a Schreier transversal, and the instance on N."""
    G: VirtualGroup = I.codomain
    m, r = G.m, I.alphabet_size
    perms = []
    for a in range(r):
        cg, ch = I.g[a].coset, I.h[a].coset
        perms.append(tuple(G.sigma[p // m][cg] * m + G.sigma[p % m][ch] for p in range(m * m)))
    act = PermAction(m * m, tuple(perms))
    basis, reps = stabilizer_basis(act, r, 0)
    gk, hk = [], []
    for b in basis:
        x, y = I.g_of(b), I.h_of(b)
        if x.coset or y.coset:
            raise AssertionError(f"basis word {list(b)} leaves the kernel")
        gk.append(x.k)
        hk.append(y.k)
    return basis, reps, PcpInstance(len(basis), G.K, gk, hk)


def _revalidate(I: PcpInstance, w: Word) -> None:
    G = I.codomain
    x, y = I.g_of(w), I.h_of(w)
    if x != y or (x == G.identity() and y == G.identity()):
        raise RevalidationError(f"witness {list(w)} does not solve the instance")


def decide_pcp_virtual(I: PcpInstance, rep_order: Optional[Sequence[int]] = None) -> Decision:
    """PCP over a finite extension of a torsion-free nilpotent group.

    ``rep_order`` permutes the nontrivial coset representatives; the verdict
    does not depend on it.
    """
    G: VirtualGroup = I.codomain
    basis, reps, sub = restrict_instance(I)
    trace = [f"N has index {len(reps)} and a free basis of {len(basis)} words"]
    if basis:
        d = decide_pcp_nilpotent(sub)
        if d.answer:
            w = substitute(d.witness, basis)
            _revalidate(I, w)
            trace.append("the restricted instance has a solution")
            return Decision(True, w, trace + d.trace)
    trace.append("the restricted instance has no solution")
    candidates: List[Word] = []
    idx = list(range(1, len(reps))) if rep_order is None else list(rep_order)
    for i in idx:
        p = reps[i]
        gp, hp = I.g_of(p), I.h_of(p)
        if gp == hp:
            candidates.append(p)
            trace.append(f"representative {list(p)} is itself in the equalizer")
            continue
        z = G.multiply(G.invert(hp), gp)
        if z.coset != 0 or not basis:
            continue
        npcp = NpcpInstance(len(basis), G.K, sub.g, sub.h, u1=z.k)
        d = decide_npcp_nilpotent(npcp)
        if d.answer:
            x = p * substitute(d.witness, basis)
            if I.g_of(x) != I.h_of(x):
                raise RevalidationError(f"candidate {list(x)} is not in the equalizer")
            candidates.append(x)
            trace.append(f"coset of {list(p)} meets the equalizer at {list(x)}")
    for x in candidates:
        if I.g_of(x) != G.identity() or I.h_of(x) != G.identity():
            _revalidate(I, x)
            return Decision(True, x, trace)
    trace.append("every candidate lies in ker g n ker h")
    return Decision(False, None, trace)


def infinite_dihedral() -> VirtualGroup:
    """Z x| C_2 with r = (1, 0) and s = ((0,), 1)."""
    from .nilpotent import free_abelian
    Z = free_abelian(1)
    return VirtualGroup(Z, 2, [[(1,)], [(-1,)]],
                        generators=[VirtualElement((1,), 0), VirtualElement((0,), 1)], names=["r", "s"])


def z2_swap() -> VirtualGroup:
    """Z^2 x| C_2 where the involution swaps the two coordinates."""
    from .nilpotent import free_abelian
    Z2 = free_abelian(2)
    return VirtualGroup(Z2, 2, [[(1, 0), (0, 1)], [(0, 1), (1, 0)]],
                        generators=[VirtualElement((1, 0), 0), VirtualElement((0, 0), 1)], names=["x", "t"])
