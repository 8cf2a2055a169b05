"""Deciders for the PCP, the non-homogeneous PCP and the verbal PCP over nilpotent groups.

Homomorphisms g, h: F(Sigma) -> K are given by the images of the letters.
Because K has class c, both factor through the free nilpotent group F_c(Sigma),
where equalizers are finitely generated and computable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence

from .freegroup import Word, evaluate_word, left_normed
from .hall import LawWord, is_law
from .nilpotent import NilElement, NilpotentPresentation
from .subgroups import (conjugate_subgroup, equalizer, igs_from_generators, nilpotency_class,
                        product_coset)
from .varieties import FreeNilpotentPresentation, free_nilpotent, verbal_product


class RevalidationError(AssertionError):
    """A witness failed direct re-evaluation; never returned as an answer."""


@dataclass
class PcpInstance:
    alphabet_size: int
    codomain: Any
    g: List[Any]
    h: List[Any]

    def __post_init__(self):
        self.g = [_as_element(self.codomain, x) for x in self.g]
        self.h = [_as_element(self.codomain, x) for x in self.h]
        if len(self.g) != self.alphabet_size or len(self.h) != self.alphabet_size:
            raise ValueError(f"need {self.alphabet_size} images for g and for h")

    def g_of(self, w: Sequence[int]):
        return evaluate_word(self.codomain, self.g, Word(w))

    def h_of(self, w: Sequence[int]):
        return evaluate_word(self.codomain, self.h, Word(w))


@dataclass
class NpcpInstance(PcpInstance):
    u1: Any = None
    u2: Any = None
    v1: Any = None
    v2: Any = None

    def __post_init__(self):
        super().__post_init__()
        for name in ("u1", "u2", "v1", "v2"):
            val = getattr(self, name)
            setattr(self, name, self.codomain.identity() if val is None else _as_element(self.codomain, val))

    def sides(self, w: Sequence[int]):
        K = self.codomain
        left = K.multiply(K.multiply(self.u1, self.g_of(w)), self.u2)
        right = K.multiply(K.multiply(self.v1, self.h_of(w)), self.v2)
        return left, right


@dataclass
class Decision:
    answer: bool
    witness: Optional[Word] = None
    trace: List[str] = field(default_factory=list)

    def verdict_line(self) -> str:
        if not self.answer:
            return "NO"
        if self.witness is None:
            return "YES"
        return f"YES witness={' '.join(str(x) for x in self.witness)}"


def _as_element(K, x):
    return K.element(x) if hasattr(K, "element") else x


def _is_identity(K, x) -> bool:
    return x == K.identity()


def working_class(K: NilpotentPresentation) -> int:
    return max(nilpotency_class(K), 1)


def _extend_images(FN: FreeNilpotentPresentation, K: NilpotentPresentation, letter_images) -> List[NilElement]:
    """Images of every polycyclic generator of F_c from the images of its letters."""
    return [evaluate_word(K, letter_images, w) for w in FN.lift_words]


def equalizer_generators(I: PcpInstance):
    """(F_c(Sigma), IGS of the equalizer of g and h in F_c(Sigma))."""
    K = I.codomain
    c = working_class(K)
    FN = free_nilpotent(I.alphabet_size, c)
    gi = _extend_images(FN, K, I.g)
    hi = _extend_images(FN, K, I.h)
    return FN, equalizer(FN.presentation, K, gi, hi)


def _check_pcp_witness(I: PcpInstance, w: Word) -> None:
    K = I.codomain
    gw, hw = I.g_of(w), I.h_of(w)
    if gw != hw or (_is_identity(K, gw) and _is_identity(K, hw)):
        raise RevalidationError(f"witness {list(w)} does not solve the instance")


def decide_pcp_nilpotent(I: PcpInstance) -> Decision:
    """Is Eq(g, h) larger than ker g n ker h?"""
    K = I.codomain
    FN, E = equalizer_generators(I)
    trace = [f"class {FN.cls}; equalizer in F_{FN.cls}({I.alphabet_size}) has {len(E.rows)} generators"]
    for s in E.rows:
        w = FN.lift(s)
        if not _is_identity(K, I.g_of(w)) or not _is_identity(K, I.h_of(w)):
            _check_pcp_witness(I, w)
            trace.append(f"generator {list(s)} lies outside ker g n ker h")
            return Decision(True, w, trace)
    trace.append("every equalizer generator lies in ker g n ker h")
    return Decision(False, None, trace)


def _check_npcp_witness(I: NpcpInstance, w: Word, allow_empty: bool = False) -> None:
    if not w and not allow_empty:
        raise RevalidationError("empty witness for the non-homogeneous problem")
    left, right = I.sides(w)
    if left != right:
        raise RevalidationError(f"witness {list(w)} does not solve the instance")


def decide_npcp_nilpotent(I: NpcpInstance) -> Decision:
    """Is there x != 1 in F(Sigma) with u1 g(x) u2 = v1 h(x) v2?

    With alpha, omega two new letters, alpha y omega lies in the equalizer P of
    the extended maps iff y solves the equation, and the solutions y form the
    coset q0^-1 C read off from omega alpha in (omega P omega^-1) Q, where Q is
    generated by the letters of Sigma.
    """
    K: NilpotentPresentation = I.codomain
    c = working_class(K)
    r = I.alphabet_size
    trace = [f"class {c}"]
    AW = free_nilpotent(2, c)
    vp = verbal_product(K, AW, c)
    VP = vp.presentation
    emb = lambda x: K.eval_images(VP, vp.embed_a, x)
    alpha, omega = vp.embed_b[0], vp.embed_b[1]
    g2 = [emb(x) for x in I.g] + [VP.multiply(alpha, emb(I.u1)), VP.multiply(emb(I.u2), omega)]
    h2 = [emb(x) for x in I.h] + [VP.multiply(alpha, emb(I.v1)), VP.multiply(emb(I.v2), omega)]
    trace.append(f"verbal product has {VP.n} generators")
    FN = free_nilpotent(r + 2, c)
    F = FN.presentation
    P = equalizer(F, VP, _extend_images(FN, VP, g2), _extend_images(FN, VP, h2))
    Q = igs_from_generators(F, [F.gen(i) for i in range(r)])
    a, w_ = F.gen(r), F.gen(r + 1)
    target = F.multiply(w_, a)
    res = product_coset(conjugate_subgroup(P, w_), Q, target)
    if res is None:
        trace.append("omega alpha is not in (omega P omega^-1) Q")
        return Decision(False, None, trace)
    a0, C = res
    q0 = F.multiply(F.invert(a0), target)
    trace.append(f"omega alpha = p q with q = {list(q0)}; q is unique up to {len(C.rows)} generators")
    if any(q0):
        y = F.invert(q0)
    elif not C.is_trivial():
        y = C.rows[0]
    elif r >= 2:
        y = None
    else:
        trace.append("only the trivial word solves the equation")
        return Decision(False, None, trace)
    if y is None:
        # the coset is {1}; any nontrivial word of weight c+1 maps to 1
        w = left_normed(*([[1], [2]] + [[2]] * (c - 1)))
        trace.append("only elements of weight > c solve; using a long commutator")
    else:
        w = FN.lift(y)
        if any(abs(x) > r for x in w):
            raise RevalidationError("lifted solution involves the auxiliary letters")
    _check_npcp_witness(I, w)
    return Decision(True, w, trace)


def decide_npcp1(I: NpcpInstance) -> Decision:
    """Like the non-homogeneous problem, but x = 1 is allowed."""
    K = I.codomain
    if K.multiply(I.u1, I.u2) == K.multiply(I.v1, I.v2):
        return Decision(True, Word(), ["u1 u2 = v1 v2, so the empty word solves"])
    d = decide_npcp_nilpotent(I)
    return Decision(d.answer, d.witness, ["u1 u2 != v1 v2"] + d.trace)


def is_injective(K, images: Sequence[Any]) -> bool:
    """Injectivity of F(Sigma) -> K for torsion-free nilpotent K."""
    return len(images) == 1 and not _is_identity(K, images[0])


def _pcp_decider(K):
    if isinstance(K, NilpotentPresentation):
        return decide_pcp_nilpotent
    from .virtual import decide_pcp_virtual
    return decide_pcp_virtual


def wp_via_pcp(K, w) -> bool:
    """True iff the element w is trivial, decided through the instance ({a}, K, g, g), g(a) = w."""
    d = _pcp_decider(K)(PcpInstance(1, K, [w], [w]))
    return not d.answer


def conjugacy_via_npcp(K: NilpotentPresentation, u, v) -> Decision:
    """Are u and v conjugate? Solves u x = x v over the polycyclic generators."""
    gens = [K.gen(i) for i in range(K.n)]
    I = NpcpInstance(K.n, K, gens, gens, u1=u, u2=K.identity(), v1=K.identity(), v2=v)
    return decide_npcp1(I)


def law_of_word(w: Sequence[int]) -> LawWord:
    return LawWord.from_signed(list(w))


def decide_verbal_pcp(I: PcpInstance) -> Decision:
    """Is Eq(g, h) larger than the verbal subgroup of the laws of K?"""
    K = I.codomain
    FN, E = equalizer_generators(I)
    c = FN.cls
    probe = LawWord.parse("[" + ",".join(f"X{i}" for i in range(1, c + 2)) + "]")
    if not is_law(K, probe):
        raise AssertionError(f"weight {c + 1} commutators are not laws; class {c} is wrong")
    trace = [f"class {c}; equalizer has {len(E.rows)} generators"]
    for s in E.rows:
        w = FN.lift(s)
        if not is_law(K, law_of_word(w)):
            if I.g_of(w) != I.h_of(w):
                raise RevalidationError(f"witness {list(w)} is not in the equalizer")
            trace.append(f"generator {list(s)} is not a law")
            return Decision(True, w, trace)
    trace.append("every equalizer generator is a law")
    return Decision(False, None, trace)
