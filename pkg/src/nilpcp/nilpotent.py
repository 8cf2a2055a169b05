"""Arithmetic in torsion-free nilpotent groups given by nilpotent presentations.

A presentation on generators a_1..a_n has relations

    [a_i, a_j] = a_{j+1}^{c_{i,j,j+1}} ... a_n^{c_{i,j,n}}     (i < j)

with the commutator convention [x, y] = x^-1 y^-1 x y, so that
a_j a_i = a_i a_j [a_j, a_i]. Elements are exponent tuples (x_1..x_n) standing
for the normal form a_1^{x_1} ... a_n^{x_n}. Indices are 0-based in code.

Multiplication is collection from the left: y is absorbed one generator
power at a time, x a_i^e = (x_1..x_{i-1}, x_i + e) * phi_i^e(tail), where
phi_i^e is conjugation by a_i^e restricted to <a_{i+1}, ..., a_n>.
"""
from __future__ import annotations

from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

NilElement = Tuple[int, ...]


class PresentationError(ValueError):
    pass


class NilpotentPresentation:
    """A torsion-free nilpotent presentation.

    ``relations`` maps 0-based pairs ``(i, j)`` with ``i < j`` to the exponent
    vector of [a_i, a_j], given either as the full length-n vector or as the
    tail for generators j+1..n-1. Missing pairs commute. ``weights`` are
    inferred (least weights compatible with the relations) when omitted.
    """

    def __init__(self, n: int, relations: Optional[Mapping[Tuple[int, int], Sequence[int]]] = None,
                 weights: Optional[Sequence[int]] = None, nilpotency_class: Optional[int] = None,
                 names: Optional[Sequence[str]] = None):
        if n < 0:
            raise PresentationError("number of generators must be non-negative")
        self.n = n
        rels: Dict[Tuple[int, int], NilElement] = {}
        for (i, j), vec in (relations or {}).items():
            if not (0 <= i < j < n):
                raise PresentationError(f"relation index ({i}, {j}) must satisfy 0 <= i < j < {n}")
            vec = tuple(int(v) for v in vec)
            if len(vec) == n - 1 - j:
                vec = (0,) * (j + 1) + vec
            if len(vec) != n:
                raise PresentationError(f"relation ({i}, {j}) has {len(vec)} exponents")
            if any(vec[: j + 1]):
                raise PresentationError(
                    f"[a{i + 1}, a{j + 1}] may only involve a{j + 2}..a{n}; got {list(vec)}")
            if any(vec):
                rels[(i, j)] = vec
        self.relations = rels
        self.weights = self._check_weights(weights)
        top = max(self.weights, default=0)
        if nilpotency_class is None:
            nilpotency_class = top
        elif nilpotency_class < top:
            raise PresentationError(f"class {nilpotency_class} is below the largest weight {top}")
        self.nilpotency_class = nilpotency_class
        self.names = tuple(names) if names else tuple(f"a{k + 1}" for k in range(n))
        self._phi_cache: Dict[Tuple[int, int], Tuple[NilElement, ...]] = {}
        self._key = (n, tuple(sorted(rels.items())))

    def _check_weights(self, weights):
        n = self.n
        if weights is None:
            w = [1] * n
            for k in range(n):
                for (i, j), vec in self.relations.items():
                    if vec[k]:
                        w[k] = max(w[k], w[i] + w[j])
            return tuple(w)
        weights = tuple(int(x) for x in weights)
        if len(weights) != n or any(x < 1 for x in weights):
            raise PresentationError("weights must be n positive integers")
        for (i, j), vec in self.relations.items():
            for k, c in enumerate(vec):
                if c and weights[k] < weights[i] + weights[j]:
                    raise PresentationError(
                        f"[a{i + 1}, a{j + 1}] involves a{k + 1} of weight {weights[k]} "
                        f"< {weights[i]} + {weights[j]}")
        return weights

    # -- identity / hashing -------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, NilpotentPresentation) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"NilpotentPresentation(n={self.n}, class={self.nilpotency_class}, relations={len(self.relations)})"

    def relation(self, i: int, j: int) -> NilElement:
        """Exponent vector of [a_i, a_j] for i < j."""
        return self.relations.get((i, j), self.identity())

    # -- elements -----------------------------------------------------------
    def identity(self) -> NilElement:
        return (0,) * self.n

    def gen(self, i: int, e: int = 1) -> NilElement:
        v = [0] * self.n
        v[i] = e
        return tuple(v)

    def element(self, x: Iterable[int]) -> NilElement:
        x = tuple(int(v) for v in x)
        if len(x) != self.n:
            raise PresentationError(f"expected {self.n} exponents, got {len(x)}")
        return x

    def is_identity(self, x: Sequence[int]) -> bool:
        return not any(x)

    # -- arithmetic ---------------------------------------------------------
    def _phi(self, i: int, e: int) -> Tuple[NilElement, ...]:
        """Images of a_{i+1}..a_{n-1} under conjugation by a_i^e (x -> a_i^-e x a_i^e)."""
        key = (i, e)
        hit = self._phi_cache.get(key)
        if hit is not None:
            return hit
        n = self.n
        if e == 0:
            imgs = tuple(self.gen(k) for k in range(i + 1, n))
        elif e == 1:
            out = []
            for k in range(i + 1, n):
                t = list(self.invert(self.relation(i, k)))
                t[k] = 1
                out.append(tuple(t))
            imgs = tuple(out)
        elif e == -1:
            imgs_rev: Dict[int, NilElement] = {}
            # psi(a_k) = a_k * psi([a_i, a_k]), solved from the bottom up
            for k in range(n - 1, i, -1):
                r = self.relation(i, k)
                t = list(self._apply_partial(i, imgs_rev, r))
                t[k] = 1
                imgs_rev[k] = tuple(t)
            imgs = tuple(imgs_rev[k] for k in range(i + 1, n))
        else:
            half = int(e / 2)
            base = self._phi(i, half)
            imgs = self._compose(i, base, base)
            if e - 2 * half:
                imgs = self._compose(i, self._phi(i, e - 2 * half), imgs)
        self._phi_cache[key] = imgs
        return imgs

    def _apply_partial(self, i: int, imgs: Mapping[int, NilElement], v: Sequence[int]) -> NilElement:
        result = self.identity()
        for k in range(i + 1, self.n):
            if v[k]:
                result = self.multiply(result, self.power(imgs[k], v[k]))
        return result

    def _apply(self, i: int, imgs: Sequence[NilElement], v: Sequence[int]) -> NilElement:
        result = self.identity()
        for k in range(i + 1, self.n):
            if v[k]:
                result = self.multiply(result, self.power(imgs[k - i - 1], v[k]))
        return result

    def _compose(self, i: int, outer, inner) -> Tuple[NilElement, ...]:
        return tuple(self._apply(i, outer, img) for img in inner)

    def _rmul_gen(self, r: List[int], i: int, e: int) -> List[int]:
        """In-place right multiplication of the exponent list r by a_i^e."""
        if any(r[i + 1:]):
            tail = self._apply(i, self._phi(i, e), [0] * (i + 1) + r[i + 1:])
            r[i + 1:] = tail[i + 1:]
        r[i] += e
        return r

    def multiply(self, x: Sequence[int], y: Sequence[int]) -> NilElement:
        r = list(x)
        for i, e in enumerate(y):
            if e:
                self._rmul_gen(r, i, e)
        return tuple(r)

    def invert(self, x: Sequence[int]) -> NilElement:
        r = [0] * self.n
        for i in range(self.n - 1, -1, -1):
            if x[i]:
                self._rmul_gen(r, i, -x[i])
        return tuple(r)

    def power(self, x: Sequence[int], k: int) -> NilElement:
        if k < 0:
            x, k = self.invert(x), -k
        x = tuple(x)
        first = next((i for i, v in enumerate(x) if v), None)
        if first is None or k == 0:
            return self.identity()
        if not any(x[first + 1:]):
            return self.gen(first, x[first] * k)
        result = self.identity()
        while k:
            if k & 1:
                result = self.multiply(result, x)
            k >>= 1
            if k:
                x = self.multiply(x, x)
        return result

    def comm(self, x: Sequence[int], y: Sequence[int]) -> NilElement:
        """[x, y] = x^-1 y^-1 x y."""
        return self.multiply(self.invert(self.multiply(y, x)), self.multiply(x, y))

    def conjugate(self, x: Sequence[int], y: Sequence[int]) -> NilElement:
        """x^y = y^-1 x y."""
        return self.multiply(self.invert(y), self.multiply(x, y))

    def collect(self, word: Sequence[int]) -> NilElement:
        """Normal form of a word in signed 1-based polycyclic letters."""
        r = [0] * self.n
        k = 0
        while k < len(word):
            x = word[k]
            if x == 0 or abs(x) > self.n:
                raise PresentationError(f"letter {x} is not a generator of this presentation")
            j = k
            while j < len(word) and word[j] == x:
                j += 1
            self._rmul_gen(r, abs(x) - 1, (j - k) if x > 0 else -(j - k))
            k = j
        return tuple(r)

    def word_of(self, x: Sequence[int]) -> List[int]:
        """A word in polycyclic letters whose collected form is x."""
        out = []
        for i, e in enumerate(x):
            out.extend([(i + 1) if e > 0 else -(i + 1)] * abs(e))
        return out

    # -- homomorphisms ------------------------------------------------------
    def eval_images(self, target: "NilpotentPresentation", images: Sequence[Sequence[int]],
                    x: Sequence[int]) -> NilElement:
        """Image of x under the homomorphism a_k -> images[k] into ``target``."""
        result = target.identity()
        for k, e in enumerate(x):
            if e:
                result = target.multiply(result, target.power(images[k], e))
        return result

    def hom_defect(self, target: "NilpotentPresentation", images: Sequence[Sequence[int]]):
        """First relation (i, j) not respected by the images, or None."""
        if len(images) != self.n:
            return ("rank", len(images))
        for i in range(self.n):
            for j in range(i + 1, self.n):
                lhs = target.comm(images[i], images[j])
                rhs = self.eval_images(target, images, self.relation(i, j))
                if lhs != rhs:
                    return (i, j)
        return None


def check_consistency(P: NilpotentPresentation) -> bool:
    """Check the standard overlaps a_k a_j a_i (k >= j >= i, signed) associate,
    and that collection reproduces every defining relation."""
    n = P.n
    for i in range(n):
        for j in range(i + 1, n):
            if P.comm(P.gen(i), P.gen(j)) != P.relation(i, j):
                return False
    letters = [(k, s) for k in range(n) for s in (1, -1)]
    for (k, sk), (j, sj), (i, si) in product(letters, repeat=3):
        if not (k >= j >= i) or (k == j == i):
            continue
        x, y, z = P.gen(k, sk), P.gen(j, sj), P.gen(i, si)
        if P.multiply(P.multiply(x, y), z) != P.multiply(x, P.multiply(y, z)):
            return False
    for i in range(n):
        x = P.gen(i)
        if P.multiply(x, P.invert(x)) != P.identity():
            return False
    return True


def eval_nil_hom(target: NilpotentPresentation, images: Sequence[Sequence[int]],
                 w: Sequence[int]) -> NilElement:
    """Evaluate a free word under a_i -> images[i-1] in the nilpotent group ``target``."""
    from .freegroup import evaluate_word, MalformedWord
    if any(x == 0 or abs(x) > len(images) for x in w):
        raise MalformedWord(f"word {list(w)} exceeds the {len(images)} available images")
    return evaluate_word(target, [tuple(v) for v in images], w)


def direct_product(G: NilpotentPresentation, Q: NilpotentPresentation) -> NilpotentPresentation:
    """G x Q with G's generators first and commuting cross relations."""
    n = G.n + Q.n
    rels = {}
    for (i, j), v in G.relations.items():
        rels[(i, j)] = tuple(v) + (0,) * Q.n
    for (i, j), v in Q.relations.items():
        rels[(i + G.n, j + G.n)] = (0,) * G.n + tuple(v)
    return NilpotentPresentation(n, rels, weights=G.weights + Q.weights,
                                 nilpotency_class=max(G.nilpotency_class, Q.nilpotency_class),
                                 names=G.names + tuple(f"{s}'" for s in Q.names))


def free_abelian(n: int) -> NilpotentPresentation:
    return NilpotentPresentation(n, {}, nilpotency_class=1 if n else 0)


def heisenberg() -> NilpotentPresentation:
    """H_3 with [a1, a2] = a3."""
    return NilpotentPresentation(3, {(0, 1): (0, 0, 1)})
