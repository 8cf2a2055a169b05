"""Free nilpotent groups, nilpotent quotients and verbal products.

Free nilpotent groups are built from a Hall basis. A basic commutator of
weight >= 2 is a pair (u, v) of earlier basic commutators with u < v, and when
v = (p, q) also p <= u. Within a weight the basis is sorted by (u, v). The
polycyclic generator attached to (u, v) is the element u v u^-1 v^-1.

Relations are read off from the Magnus embedding x_i -> 1 + X_i into
truncated noncommutative power series with integer coefficients: the degree-w
part of a series, after removing lower weights, is an integer combination of
the leading terms of the weight-w basic commutators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .freegroup import Word
from .linalg import smith_normal_form
from .nilpotent import NilElement, NilpotentPresentation
from .subgroups import check_hom, kernel, normal_closure

Series = Dict[Tuple[int, ...], int]


class TorsionError(ValueError):
    """The requested quotient has torsion, which nilpotent presentations cannot hold."""

    def __init__(self, layer: int, divisors: Sequence[int]):
        self.layer = layer
        self.divisors = list(divisors)
        super().__init__(f"torsion in layer {layer}: elementary divisors {self.divisors}")


# -- Hall basis --------------------------------------------------------------

def hall_basis(rank: int, cls: int) -> List[Union[int, Tuple[int, int]]]:
    """Basic commutators as trees: ints are letters, pairs index earlier entries."""
    basis: List[Union[int, Tuple[int, int]]] = list(range(rank))
    weight = [1] * rank
    for w in range(2, cls + 1):
        new = []
        for u in range(len(basis)):
            for v in range(u + 1, len(basis)):
                if weight[u] + weight[v] != w:
                    continue
                tv = basis[v]
                if isinstance(tv, tuple) and tv[0] > u:
                    continue
                new.append((u, v))
        new.sort()
        basis.extend(new)
        weight.extend([w] * len(new))
    return basis


def _basis_weights(basis) -> List[int]:
    wt = []
    for b in basis:
        wt.append(1 if isinstance(b, int) else wt[b[0]] + wt[b[1]])
    return wt


# -- truncated Magnus series ---------------------------------------------------

def _s_mul(p: Series, q: Series, cls: int) -> Series:
    out: Series = {}
    for m1, c1 in p.items():
        room = cls - len(m1)
        for m2, c2 in q.items():
            if len(m2) <= room:
                m = m1 + m2
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
    return out


def _s_pow(p: Series, e: int, cls: int) -> Series:
    """(1 + T)^e by the binomial series; valid for negative e."""
    T = {m: c for m, c in p.items() if m}
    out: Series = {(): 1}
    term: Series = {(): 1}
    for k in range(1, cls + 1):
        term = _s_mul(term, T, cls)
        if not term:
            break
        coeff = comb(e, k) if e >= 0 else (-1) ** k * comb(-e + k - 1, k)
        if coeff:
            for m, c in term.items():
                v = out.get(m, 0) + coeff * c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
    return out


class FreeNilpotentPresentation:
    """The free nilpotent group of given rank and class, with lift words."""

    def __init__(self, rank: int, cls: int):
        if rank < 1 or cls < 1:
            raise ValueError("rank and class must be positive")
        self.rank = rank
        self.cls = cls
        self.basis = hall_basis(rank, cls)
        self.weights = _basis_weights(self.basis)
        self.n = len(self.basis)
        c = cls
        self._series: List[Series] = []
        words: List[Word] = []
        for b in self.basis:
            if isinstance(b, int):
                self._series.append({(): 1, (b,): 1})
                words.append(Word([b + 1]))
            else:
                u, v = b
                su, sv = self._series[u], self._series[v]
                s = _s_mul(_s_mul(su, sv, c), _s_mul(_s_pow(su, -1, c), _s_pow(sv, -1, c), c), c)
                self._series.append(s)
                words.append(words[u] * words[v] * words[u].inverse() * words[v].inverse())
        self.lift_words = words
        self._blocks: Dict[int, List[int]] = {}
        for i, w in enumerate(self.weights):
            self._blocks.setdefault(w, []).append(i)
        self._solvers = {w: self._layer_solver(w) for w in self._blocks}
        rels = {}
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.weights[i] + self.weights[j] > c:
                    continue
                si, sj = self._series[i], self._series[j]
                s = _s_mul(_s_mul(_s_pow(si, -1, c), _s_pow(sj, -1, c), c), _s_mul(si, sj, c), c)
                vec = self.normal_form_of_series(s)
                if any(vec):
                    rels[(i, j)] = vec
        self.presentation = NilpotentPresentation(
            self.n, rels, weights=self.weights, nilpotency_class=cls,
            names=[self._name(k) for k in range(self.n)])

    def _name(self, k: int) -> str:
        b = self.basis[k]
        if isinstance(b, int):
            return _letter_name(b, self.rank)
        return f"[{self._name(b[0])},{self._name(b[1])}]"

    def _layer_solver(self, w: int):
        idx = self._blocks[w]
        leads = [{m: c for m, c in self._series[k].items() if len(m) == w} for k in idx]
        monos = sorted({m for d in leads for m in d})
        # Gaussian elimination over Q on the (monomial x basis) system; keep pivot rows
        A = [[Fraction(d.get(m, 0)) for d in leads] for m in monos]
        ncol = len(idx)
        rows = list(range(len(monos)))
        pivots = []
        M = [r[:] for r in A]
        used = set()
        for col in range(ncol):
            piv = next((r for r in rows if r not in used and M[r][col] != 0), None)
            if piv is None:
                raise AssertionError("basic commutator leading terms are dependent")
            used.add(piv)
            pivots.append(piv)
            pv = M[piv][col]
            for r in rows:
                if r != piv and M[r][col] != 0:
                    f = M[r][col] / pv
                    M[r] = [a - f * b for a, b in zip(M[r], M[piv])]
        sub = [[A[p][c] for c in range(ncol)] for p in pivots]
        inv = _invert_fraction(sub)
        return idx, [monos[p] for p in pivots], inv

    def normal_form_of_series(self, s: Series) -> NilElement:
        """Peel basic commutators off a Magnus series, lowest weight first."""
        c = self.cls
        vec = [0] * self.n
        for w in range(1, c + 1):
            if w not in self._solvers:
                continue
            idx, monos, inv = self._solvers[w]
            rhs = [s.get(m, 0) for m in monos]
            exps = []
            for row in inv:
                v = sum(a * b for a, b in zip(row, rhs))
                if v.denominator != 1:
                    raise AssertionError("series is not in the image of the free group")
                exps.append(int(v))
            peel: Series = {(): 1}
            for k, e in zip(idx, exps):
                if e:
                    vec[k] = e
                    peel = _s_mul(peel, _s_pow(self._series[k], e, c), c)
            if any(exps):
                s = _s_mul(_s_pow(peel, -1, c), s, c)
            if any(len(m) == w for m in s):
                raise AssertionError(f"weight {w} part not spanned by basic commutators")
        if any(m for m in s):
            raise AssertionError("series did not reduce to 1")
        return tuple(vec)

    def project(self, w: Sequence[int]) -> NilElement:
        w = Word(w)
        for x in w:
            if abs(x) > self.rank:
                raise ValueError(f"letter {x} exceeds rank {self.rank}")
        return self.presentation.collect(list(w))

    def lift(self, x: Sequence[int]) -> Word:
        out = Word()
        for k, e in enumerate(x):
            if e:
                out = out * (self.lift_words[k] ** e)
        return out

    def __repr__(self):
        return f"FreeNilpotentPresentation(rank={self.rank}, class={self.cls}, n={self.n})"


def _letter_name(b: int, rank: int) -> str:
    return "abcdefghijklmnopqrstuvwxyz"[b] if rank <= 26 else f"x{b + 1}"


def _invert_fraction(M: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(M)
    A = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [a / pv for a in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


@lru_cache(maxsize=None)
def free_nilpotent(rank: int, cls: int) -> FreeNilpotentPresentation:
    return FreeNilpotentPresentation(rank, cls)


def project(FN: FreeNilpotentPresentation, w: Sequence[int]) -> NilElement:
    return FN.project(w)


def lift(FN: FreeNilpotentPresentation, x: Sequence[int]) -> Word:
    return FN.lift(x)


# -- nilpotent quotients -------------------------------------------------------

@dataclass(frozen=True)
class FinitePresentation:
    rank: int
    relators: Tuple[Word, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(Word(r) for r in self.relators))
        for r in self.relators:
            if r.rank() > self.rank:
                raise ValueError(f"relator {list(r)} uses letters beyond rank {self.rank}")


@dataclass
class QuotientMap:
    """Class-c quotient of a finite presentation: target group and letter images."""
    source: FinitePresentation
    cls: int
    target: NilpotentPresentation
    images: List[NilElement]
    free: FreeNilpotentPresentation
    _layers: list = field(repr=False, default_factory=list)
    _relator_closure: object = field(repr=False, default=None)

    def __call__(self, w: Sequence[int]) -> NilElement:
        return _eval_word(self.target, self.images, w)

    def from_free(self, y: Sequence[int]) -> NilElement:
        """Target coordinates of an element of the free nilpotent group."""
        F = self.free.presentation
        N = self._relator_closure
        y = tuple(y)
        out: List[int] = []
        for idx, V, k, gens in self._layers:
            block = [y[i] for i in idx]
            coords = [sum(b * V[r][col] for r, b in enumerate(block)) for col in range(len(idx))][k:]
            out.extend(coords)
            t = F.identity()
            for g, e in zip(gens, coords):
                if e:
                    t = F.multiply(t, F.power(g, e))
            y = F.multiply(F.invert(t), y)
            lo, hi = idx[0], idx[-1] + 1
            for row in N.rows:
                d = next(i for i, v in enumerate(row) if v)
                if d < lo or d >= hi or not y[d]:
                    continue
                q, r = divmod(y[d], row[d])
                if r:
                    raise AssertionError("layer reduction failed")
                y = F.multiply(F.power(row, -q), y)
            if any(y[lo:hi]):
                raise AssertionError("layer not cleared")
        return tuple(out)


def _eval_word(P: NilpotentPresentation, images: Sequence[NilElement], w: Sequence[int]) -> NilElement:
    out = P.identity()
    for x in Word(w):
        img = images[abs(x) - 1]
        out = P.multiply(out, img if x > 0 else P.invert(img))
    return out


def nilpotent_quotient(fp: FinitePresentation, cls: int) -> QuotientMap:
    """Largest class-``cls`` nilpotent quotient of ``fp``; raises TorsionError if it has torsion."""
    FN = free_nilpotent(fp.rank, cls)
    F = FN.presentation
    gens = [F.gen(i) for i in range(F.n)]
    N = normal_closure(F, [FN.project(r) for r in fp.relators], gens)
    layers = []
    new_gens: List[NilElement] = []
    weights: List[int] = []
    for w in range(1, cls + 1):
        idx = FN._blocks.get(w, [])
        if not idx:
            continue
        lo, hi = idx[0], idx[-1] + 1
        rows = [[r[i] for i in idx] for r in N.rows
                if lo <= next(i for i, v in enumerate(r) if v) < hi]
        if rows:
            S, U, V = smith_normal_form(rows)
            divs = [S[i][i] for i in range(min(len(rows), len(idx))) if S[i][i]]
        else:
            V = [[int(i == j) for j in range(len(idx))] for i in range(len(idx))]
            divs = []
        if any(d != 1 for d in divs):
            raise TorsionError(w, divs)
        k = len(divs)
        Vinv = _unimodular_inverse(V)
        layer_gens = []
        for r in range(k, len(idx)):
            v = [0] * F.n
            for col, i in enumerate(idx):
                v[i] = Vinv[r][col]
            layer_gens.append(tuple(v))
        layers.append((idx, V, k, layer_gens))
        new_gens.extend(layer_gens)
        weights.extend([w] * len(layer_gens))
    qm = QuotientMap(fp, cls, NilpotentPresentation(0), [], FN, layers, N)
    m = len(new_gens)
    rels = {}
    for a in range(m):
        for b in range(a + 1, m):
            if weights[a] + weights[b] > cls:
                continue
            vec = qm.from_free(F.comm(new_gens[a], new_gens[b]))
            if any(vec):
                rels[(a, b)] = vec
    Q = NilpotentPresentation(m, rels, weights=weights, nilpotency_class=cls)
    qm.target = Q
    qm.images = [qm.from_free(F.gen(i)) for i in range(fp.rank)]
    qm.generators = new_gens
    return qm


def _unimodular_inverse(V: List[List[int]]) -> List[List[int]]:
    inv = _invert_fraction([[Fraction(x) for x in row] for row in V])
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise AssertionError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def presentation_relators(P: NilpotentPresentation, offset: int = 0) -> List[Word]:
    """Relators [a_i, a_j] * tail^-1 of P as free words, letters shifted by ``offset``."""
    rels = []
    for i in range(P.n):
        for j in range(i + 1, P.n):
            tail = P.word_of(P.relation(i, j))
            lhs = Word([-(i + 1), -(j + 1), i + 1, j + 1])
            w = lhs * Word(tail).inverse()
            rels.append(Word([(abs(x) + offset) * (1 if x > 0 else -1) for x in w]))
    return rels


@dataclass
class VerbalProduct:
    presentation: NilpotentPresentation
    embed_a: List[NilElement]
    embed_b: List[NilElement]
    projection: List[NilElement]
    quotient: QuotientMap
    b_letters: int

    def __iter__(self):
        return iter((self.presentation, self.embed_a, self.embed_b))


def _as_presentation(X) -> Tuple[NilpotentPresentation, int, List[Word]]:
    if isinstance(X, FreeNilpotentPresentation):
        return X.presentation, X.rank, []
    return X, X.n, presentation_relators(X)


_VP_CACHE: Dict[tuple, VerbalProduct] = {}


def verbal_product(A, B, cls: int) -> VerbalProduct:
    """Class-``cls`` quotient of the free product A * B, with both embeddings.

    A free nilpotent factor contributes only its free letters.
    """
    key = tuple(("free", X.rank, X.cls) if isinstance(X, FreeNilpotentPresentation) else X
                for X in (A, B)) + (cls,)
    if key in _VP_CACHE:
        return _VP_CACHE[key]
    PA, ra, rel_a = _as_presentation(A)
    PB, rb, rel_b = _as_presentation(B)
    if PA.nilpotency_class > cls or PB.nilpotency_class > cls:
        raise ValueError("factor class exceeds the requested class")
    shifted_b = [Word([(abs(x) + ra) * (1 if x > 0 else -1) for x in w]) for w in rel_b]
    fp = FinitePresentation(ra + rb, tuple(rel_a + shifted_b))
    qm = nilpotent_quotient(fp, cls)
    VP = qm.target
    letters = qm.images

    def extend(P, k, imgs):
        # images of all polycyclic generators of a factor, from its letters
        if isinstance(P, FreeNilpotentPresentation):
            return [_eval_word(VP, imgs, w) for w in P.lift_words]
        return imgs

    emb_a = extend(A, ra, letters[:ra])
    emb_b = extend(B, rb, letters[ra:])
    check_hom(PA, VP, emb_a)
    check_hom(PB, VP, emb_b)
    if not kernel(PA, VP, emb_a).is_trivial() or not kernel(PB, VP, emb_b).is_trivial():
        raise AssertionError("verbal product factor does not embed")
    # projection killing A: letters of A -> 1, letters of B -> their generators in B
    if isinstance(B, FreeNilpotentPresentation):
        b_letters = [PB.gen(i) for i in range(rb)]
    else:
        b_letters = [PB.gen(i) for i in range(PB.n)]
    letter_imgs = [PB.identity()] * ra + b_letters
    proj = [_eval_word(PB, letter_imgs, qm.free.lift(g)) for g in qm.generators]
    check_hom(VP, PB, proj)
    vp = VerbalProduct(VP, emb_a, emb_b, proj, qm, rb)
    _VP_CACHE[key] = vp
    return vp
