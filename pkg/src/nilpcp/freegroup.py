"""Free group words, homomorphism evaluation, Stallings folding and Schreier bases.

Letters are nonzero signed integers: ``i`` is the generator a_i, ``-i`` its inverse.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple


class MalformedWord(ValueError):
    pass


def free_reduce(letters: Iterable[int], rank: Optional[int] = None) -> "Word":
    out: List[int] = []
    for x in letters:
        x = int(x)
        if x == 0 or (rank is not None and abs(x) > rank):
            raise MalformedWord(f"letter {x} is not a generator of a rank-{rank} free group")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple.__new__(Word, out)


class Word(tuple):
    """A freely reduced word. Construction reduces eagerly."""

    def __new__(cls, letters: Iterable[int] = ()):
        return free_reduce(letters)

    def __mul__(self, other: Sequence[int]) -> "Word":
        return free_reduce(tuple(self) + tuple(other))

    def inverse(self) -> "Word":
        return tuple.__new__(Word, [-x for x in reversed(self)])

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return free_reduce(tuple(base) * abs(k))

    def rank(self) -> int:
        return max((abs(x) for x in self), default=0)

    def __repr__(self):
        return f"Word({list(self)})"

    def __str__(self):
        return " ".join(str(x) for x in self)


def commutator(u: Sequence[int], v: Sequence[int]) -> Word:
    """[u, v] = u^-1 v^-1 u v."""
    u, v = Word(u), Word(v)
    return u.inverse() * v.inverse() * u * v


def left_normed(*words: Sequence[int]) -> Word:
    """[w1, w2, ..., wk] = [[w1, w2], ..., wk]."""
    acc = Word(words[0])
    for w in words[1:]:
        acc = commutator(acc, w)
    return acc


def substitute(w: Sequence[int], images: Sequence[Sequence[int]]) -> Word:
    """Image of ``w`` under the free-group endomorphism a_i -> images[i-1]."""
    out: List[int] = []
    for x in w:
        img = images[abs(x) - 1]
        out.extend(img if x > 0 else [-y for y in reversed(img)])
    return free_reduce(out)


class FreeGroupCodomain:
    """Free group arithmetic in the shape the evaluators expect."""

    def __init__(self, rank: int):
        self.rank = rank

    def identity(self) -> Word:
        return Word()

    def multiply(self, x, y) -> Word:
        return Word(x) * y

    def invert(self, x) -> Word:
        return Word(x).inverse()

    def power(self, x, k: int) -> Word:
        return Word(x) ** k


class IntegerGroup:
    """The additive group of integers."""

    def identity(self) -> int:
        return 0

    def multiply(self, x: int, y: int) -> int:
        return x + y

    def invert(self, x: int) -> int:
        return -x

    def power(self, x: int, k: int) -> int:
        return k * x


def evaluate_word(codomain: Any, images: Sequence[Any], w: Sequence[int]) -> Any:
    """Evaluate ``w`` letter by letter, collapsing runs of a repeated letter into powers."""
    result = codomain.identity()
    i = 0
    n = len(w)
    while i < n:
        x = w[i]
        j = i
        while j < n and w[j] == x:
            j += 1
        if abs(x) > len(images) or x == 0:
            raise MalformedWord(f"letter {x} outside the domain of a rank-{len(images)} homomorphism")
        e = (j - i) if x > 0 else -(j - i)
        img = images[abs(x) - 1]
        if hasattr(codomain, "power"):
            factor = codomain.power(img, e)
        else:
            factor = codomain.identity()
            step = img if e > 0 else codomain.invert(img)
            for _ in range(abs(e)):
                factor = codomain.multiply(factor, step)
        result = codomain.multiply(result, factor)
        i = j
    return result


@dataclass(frozen=True)
class FreeHom:
    """A homomorphism F(a_1..a_r) -> codomain given by generator images."""

    images: Tuple[Any, ...]
    codomain: Any

    @property
    def domain_rank(self) -> int:
        return len(self.images)

    def __call__(self, w: Sequence[int]) -> Any:
        return apply_hom(self, w)


def apply_hom(f: FreeHom, w: Sequence[int]) -> Any:
    if any(abs(x) > f.domain_rank for x in w):
        raise MalformedWord(f"word {list(w)} exceeds domain rank {f.domain_rank}")
    return evaluate_word(f.codomain, f.images, w)


# ----------------------------------------------------------------------------
# Stallings folding
# ----------------------------------------------------------------------------

class SubgroupGraph:
    """Folded Stallings graph of a finitely generated subgroup of a free group.

    Vertex 0 is the base point. ``edges[v]`` maps a signed letter to the
    target vertex; folding keeps the labelling deterministic.
    """

    def __init__(self, gens: Iterable[Sequence[int]]):
        self.edges: List[Dict[int, int]] = [dict()]
        self._parent: List[int] = [0]
        for w in gens:
            w = Word(w)
            if not w:
                continue
            v = 0
            for k, x in enumerate(w):
                if k == len(w) - 1:
                    t = 0
                else:
                    t = self._new_vertex()
                self._add_edge(v, x, t)
                v = t
        self._fold()

    def _new_vertex(self) -> int:
        self.edges.append({})
        self._parent.append(len(self._parent))
        return len(self.edges) - 1

    def _find(self, v: int) -> int:
        while self._parent[v] != v:
            self._parent[v] = self._parent[self._parent[v]]
            v = self._parent[v]
        return v

    def _add_edge(self, u: int, x: int, v: int) -> None:
        # pending edges; conflicts are resolved by _fold
        self.edges[u].setdefault(x, [])
        self.edges[v].setdefault(-x, [])
        self.edges[u][x].append(v)
        self.edges[v][-x].append(u)

    def _fold(self) -> None:
        queue = deque(range(len(self.edges)))
        while queue:
            u = self._find(queue.popleft())
            for x in list(self.edges[u]):
                targets = self.edges[u].get(x)
                if targets is None:
                    continue
                targets = list({self._find(t) for t in targets})
                self.edges[u][x] = targets
                if len(targets) > 1:
                    keep = targets[0]
                    for other in targets[1:]:
                        keep = self._merge(keep, other)
                        queue.append(keep)
                    self.edges[u][x] = [keep]
                    queue.append(u)
        # compact: representatives only, single targets
        reps = sorted({self._find(v) for v in range(len(self.edges))}, key=lambda v: (v != self._find(0), v))
        index = {v: i for i, v in enumerate(reps)}
        compact: List[Dict[int, int]] = []
        for v in reps:
            d = {}
            for x, ts in self.edges[v].items():
                ts = {self._find(t) for t in ts}
                assert len(ts) == 1, "folding left a non-deterministic vertex"
                d[x] = index[ts.pop()]
            compact.append(d)
        self.edges = compact
        self._parent = list(range(len(compact)))

    def _merge(self, a: int, b: int) -> int:
        a, b = self._find(a), self._find(b)
        if a == b:
            return a
        if b < a:
            a, b = b, a
        self._parent[b] = a
        for x, ts in self.edges[b].items():
            self.edges[a].setdefault(x, []).extend(ts)
        self.edges[b] = {}
        return a

    @property
    def num_vertices(self) -> int:
        return len(self.edges)

    def read(self, w: Sequence[int]) -> Optional[int]:
        v = 0
        for x in w:
            v = self.edges[v].get(x)
            if v is None:
                return None
        return v

    def contains(self, w: Sequence[int]) -> bool:
        return self.read(Word(w)) == 0

    def spanning_tree(self) -> Dict[int, Word]:
        """Geodesic (BFS) tree paths from the base point, letters tried in a fixed order."""
        paths = {0: Word()}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for x in sorted(self.edges[v], key=lambda y: (abs(y), y < 0)):
                t = self.edges[v][x]
                if t not in paths:
                    paths[t] = free_reduce(tuple(paths[v]) + (x,))
                    queue.append(t)
        return paths

    def basis(self) -> List[Word]:
        paths = self.spanning_tree()
        tree_edges = set()
        for t, p in paths.items():
            if t:
                src = self.read(p[:-1])
                tree_edges.add((src, p[-1]))
                tree_edges.add((t, -p[-1]))
        out = []
        for v in range(self.num_vertices):
            for x, t in self.edges[v].items():
                if x < 0 or (v, x) in tree_edges:
                    continue
                out.append(paths[v] * (x,) * paths[t].inverse())
        return sorted(out, key=lambda w: (len(w), [(abs(y), y < 0) for y in w]))

    def rank(self) -> int:
        e = sum(1 for d in self.edges for x in d if x > 0)
        return e - self.num_vertices + 1


def in_subgroup(gens: Iterable[Sequence[int]], w: Sequence[int]) -> bool:
    return SubgroupGraph(gens).contains(w)


def nielsen_reduce(gens: Iterable[Sequence[int]]) -> List[Word]:
    """A Nielsen-reduced free basis of the subgroup generated by ``gens``."""
    basis = SubgroupGraph(gens).basis()
    # length-decreasing Nielsen moves; a BFS-tree basis is normally already reduced
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            for j in range(len(basis)):
                if i == j:
                    continue
                u, v = basis[i], basis[j]
                for cand in (u * v, u * v.inverse(), v * u, v.inverse() * u):
                    if len(cand) < len(u):
                        basis[i] = cand
                        changed = True
                        break
    return [w for w in basis if w]


# ----------------------------------------------------------------------------
# Permutation actions and Schreier bases
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PermAction:
    """Right action of F(a_1..a_r) on points 0..degree-1.

    ``perms[i][p]`` is the image of point ``p`` under generator a_{i+1}.
    """

    degree: int
    perms: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        for p in self.perms:
            if len(p) != self.degree or sorted(p) != list(range(self.degree)):
                raise ValueError(f"{p} is not a permutation of {self.degree} points")

    @property
    def rank(self) -> int:
        return len(self.perms)

    def inverse_perms(self) -> List[Tuple[int, ...]]:
        out = []
        for p in self.perms:
            inv = [0] * self.degree
            for i, j in enumerate(p):
                inv[j] = i
            out.append(tuple(inv))
        return out

    def act(self, point: int, w: Sequence[int]) -> int:
        inv = self.inverse_perms()
        for x in w:
            point = self.perms[x - 1][point] if x > 0 else inv[-x - 1][point]
        return point

    def orbit(self, point: int) -> List[int]:
        seen = [point]
        known = {point}
        inv = self.inverse_perms()
        queue = deque([point])
        while queue:
            p = queue.popleft()
            for table in list(self.perms) + inv:
                q = table[p]
                if q not in known:
                    known.add(q)
                    seen.append(q)
                    queue.append(q)
        return seen


def stabilizer_basis(act: PermAction, rank: int, point: int) -> Tuple[List[Word], List[Word]]:
    """Free basis of Stab(point) and a Schreier transversal of its orbit.

    The transversal is prefix closed; entry 0 is the empty word.
    """
    if not 0 <= point < act.degree:
        raise ValueError(f"point {point} out of range for degree {act.degree}")
    if act.rank != rank:
        raise ValueError(f"action has {act.rank} generators, expected {rank}")
    inv = act.inverse_perms()
    paths: Dict[int, Word] = {point: Word()}
    order = [point]
    tree_edges = set()
    queue = deque([point])
    letters = [x for i in range(1, rank + 1) for x in (i, -i)]
    while queue:
        p = queue.popleft()
        for x in letters:
            q = act.perms[x - 1][p] if x > 0 else inv[-x - 1][p]
            if q not in paths:
                paths[q] = free_reduce(tuple(paths[p]) + (x,))
                order.append(q)
                tree_edges.add((p, x))
                tree_edges.add((q, -x))
                queue.append(q)
    basis = []
    for p in order:
        for i in range(1, rank + 1):
            if (p, i) in tree_edges:
                continue
            q = act.perms[i - 1][p]
            basis.append(paths[p] * (i,) * paths[q].inverse())
    basis.sort(key=lambda w: (len(w), [(abs(y), y < 0) for y in w]))
    return basis, [paths[p] for p in order]
