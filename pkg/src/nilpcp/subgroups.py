"""Subgroups of torsion-free nilpotent groups via induced generating sequences.

A subgroup is stored as a reduced echelon list of rows: row r has leading index
d_r, positive leading exponent, and entries at the leading indices of later
rows reduced into [0, lead). Every element is uniquely r_1^{e_1} ... r_m^{e_m},
so equal subgroups have equal rows.

Preimages, intersections, kernels and equalizers all go through one routine
that walks down the series G_k = <a_k, ..., a_n>: at each step the condition
"f(a) lies in V G_{k+1}" cuts the current subgroup down to the kernel of a
homomorphism onto a cyclic group.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import solve_diophantine, xgcd
from .nilpotent import NilElement, NilpotentPresentation, direct_product


class IllDefinedHomomorphism(ValueError):
    pass


def _lead(x: Sequence[int]) -> Optional[int]:
    for i, v in enumerate(x):
        if v:
            return i
    return None


class Subgroup:
    """Canonical (reduced) induced generating sequence of a subgroup."""

    def __init__(self, presentation: NilpotentPresentation, rows: Sequence[NilElement]):
        self.presentation = presentation
        self.rows: Tuple[NilElement, ...] = tuple(rows)
        self._by_lead = {_lead(r): r for r in self.rows}

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and self.presentation == other.presentation
                and self.rows == other.rows)

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"Subgroup({[list(r) for r in self.rows]})"

    def __len__(self):
        return len(self.rows)

    @property
    def leads(self) -> List[int]:
        return [_lead(r) for r in self.rows]

    def lead_exponent(self, k: int) -> int:
        r = self._by_lead.get(k)
        return r[k] if r is not None else 0

    def is_trivial(self) -> bool:
        return not self.rows

    def sift(self, x: Sequence[int], stop: Optional[int] = None) -> Tuple[Optional[List[int]], NilElement]:
        """Peel rows off x from the left, handling coordinates below ``stop``.

        Returns ``(exponents, remainder)`` with x = r_1^{e_1}...r_m^{e_m} * remainder,
        or ``(None, x)`` when x is not in this subgroup times G_stop.
        """
        P = self.presentation
        stop = P.n if stop is None else stop
        x = tuple(x)
        exps = []
        for d in range(stop):
            if not x[d]:
                if d in self._by_lead:
                    exps.append(0)
                continue
            r = self._by_lead.get(d)
            if r is None or x[d] % r[d]:
                return None, x
            e = x[d] // r[d]
            exps.append(e)
            x = P.multiply(P.power(r, -e), x)
        exps.extend(0 for r in self.rows if _lead(r) >= stop)
        return exps, x

    def contains(self, x: Sequence[int]) -> bool:
        return membership(self, x)[0]

    def __contains__(self, x):
        return self.contains(x)

    def element(self, exps: Sequence[int]) -> NilElement:
        P = self.presentation
        out = P.identity()
        for r, e in zip(self.rows, exps):
            if e:
                out = P.multiply(out, P.power(r, e))
        return out

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return all(other.contains(r) for r in self.rows)

    def same_as(self, other: "Subgroup") -> bool:
        return self.is_subgroup_of(other) and other.is_subgroup_of(self)


def igs_from_generators(P: NilpotentPresentation, gens: Sequence[Sequence[int]]) -> Subgroup:
    rows: Dict[int, NilElement] = {}
    queue = [tuple(g) for g in gens]

    def push_comms(x):
        queue.extend(P.comm(x, r) for r in rows.values() if r is not x)

    while True:
        while queue:
            x = queue.pop()
            while True:
                d = _lead(x)
                if d is None:
                    break
                if x[d] < 0:
                    x = P.invert(x)
                r = rows.get(d)
                if r is None:
                    rows[d] = x
                    push_comms(x)
                    break
                a, b = x[d], r[d]
                if a % b == 0:
                    x = P.multiply(P.power(r, -(a // b)), x)
                    continue
                g, s, t = xgcd(b, a)
                new = P.multiply(P.power(r, s), P.power(x, t))
                rows[d] = new
                push_comms(new)
                queue.append(r)
                queue.append(x)
                break
        # closure check: commutators of the final rows, and the input generators
        S = Subgroup(P, [rows[d] for d in sorted(rows)])
        pending = [P.comm(a, b) for i, a in enumerate(S.rows) for b in S.rows[i + 1:]]
        pending += [tuple(g) for g in gens]
        for z in pending:
            ok, rem = S.sift(z)
            if ok is None or any(rem):
                queue.append(rem if ok is None else z)
        if not queue:
            break
    return Subgroup(P, _reduce_rows(P, [rows[d] for d in sorted(rows)]))


def _reduce_rows(P: NilpotentPresentation, rows: List[NilElement]) -> List[NilElement]:
    leads = [_lead(r) for r in rows]
    out = list(rows)
    for i in range(len(out)):
        x = out[i]
        for j in range(i + 1, len(out)):
            d = leads[j]
            q = x[d] // out[j][d]
            if q:
                x = P.multiply(x, P.power(out[j], -q))
        out[i] = x
    return out


def whole_group(P: NilpotentPresentation) -> Subgroup:
    return Subgroup(P, [P.gen(i) for i in range(P.n)])


def trivial_subgroup(P: NilpotentPresentation) -> Subgroup:
    return Subgroup(P, [])


def membership(S: Subgroup, x: Sequence[int]) -> Tuple[bool, Optional[List[int]]]:
    """(True, exponents over S.rows) when x is in S, else (False, None)."""
    exps, rem = S.sift(x)
    if exps is None or any(rem):
        return False, None
    return True, exps


def normal_closure(P: NilpotentPresentation, elements: Sequence[Sequence[int]],
                   ambient_gens: Sequence[Sequence[int]]) -> Subgroup:
    """Normal closure of ``elements`` in the subgroup generated by ``ambient_gens``."""
    S = igs_from_generators(P, elements)
    while True:
        extra = [P.comm(r, g) for r in S.rows for g in ambient_gens]
        extra = [z for z in extra if not S.contains(z)]
        if not extra:
            return S
        S = igs_from_generators(P, list(S.rows) + extra)


def _cyclic_kernel(P: NilpotentPresentation, gens: Sequence[NilElement], values: Sequence[int],
                   modulus: int) -> List[NilElement]:
    """Generators of the kernel of the map <gens> -> Z/modulus sending gens[i] to values[i]."""
    if all((v % modulus == 0) if modulus else v == 0 for v in values):
        return list(gens)
    row = list(values) + ([modulus] if modulus else [])
    sol = solve_diophantine([row], [0])
    lattice = [vec[: len(gens)] for vec in sol[1]]
    elems = []
    for vec in lattice:
        z = P.identity()
        for g, e in zip(gens, vec):
            if e:
                z = P.multiply(z, P.power(g, e))
        elems.append(z)
    # the target is abelian, so commutators of the generators lie in the kernel
    elems += [P.comm(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]]
    return list(normal_closure(P, elems, gens).rows)


def _layer_value(V: Subgroup, k: int, y: Sequence[int]) -> int:
    """Coordinate k of y after stripping the part of y lying in V modulo G_k."""
    exps, rem = V.sift(y, stop=k)
    if exps is None or any(rem[:k]):
        raise AssertionError("element escaped V G_k during layered descent")
    return rem[k]


def _images_of(A: NilpotentPresentation, G: NilpotentPresentation, images, x):
    return A.eval_images(G, images, x)


def check_hom(A: NilpotentPresentation, G: NilpotentPresentation, images: Sequence[Sequence[int]]) -> None:
    defect = A.hom_defect(G, [tuple(v) for v in images])
    if defect is not None:
        raise IllDefinedHomomorphism(f"images do not respect relation {defect}")


def preimage(A: NilpotentPresentation, G: NilpotentPresentation, images: Sequence[Sequence[int]],
             V: Subgroup, start: Optional[Subgroup] = None, check: bool = True) -> Subgroup:
    """{a in start : f(a) in V} for the homomorphism f: A -> G given by images."""
    images = [tuple(v) for v in images]
    if check:
        check_hom(A, G, images)
    C = list(start.rows) if start is not None else [A.gen(i) for i in range(A.n)]
    for k in range(G.n):
        if not C:
            break
        m = V.lead_exponent(k)
        values = [_layer_value(V, k, A.eval_images(G, images, c)) for c in C]
        C = _cyclic_kernel(A, C, values, m)
    return igs_from_generators(A, C)


def kernel(A: NilpotentPresentation, G: NilpotentPresentation, images: Sequence[Sequence[int]]) -> Subgroup:
    return preimage(A, G, images, trivial_subgroup(G))


def intersection(S1: Subgroup, S2: Subgroup) -> Subgroup:
    P = S1.presentation
    if S2.presentation != P:
        raise ValueError("subgroups of different presentations")
    ident = [P.gen(i) for i in range(P.n)]
    return preimage(P, P, ident, S2, start=S1, check=False)


def image(A: NilpotentPresentation, G: NilpotentPresentation, images, S: Optional[Subgroup] = None) -> Subgroup:
    rows = S.rows if S is not None else [A.gen(i) for i in range(A.n)]
    return igs_from_generators(G, [A.eval_images(G, images, r) for r in rows])


def equalizer(A: NilpotentPresentation, G: NilpotentPresentation, g_images, h_images,
              check: bool = True) -> Subgroup:
    """{x in A : g(x) = h(x)} as the preimage of the diagonal of G x G."""
    g_images = [tuple(v) for v in g_images]
    h_images = [tuple(v) for v in h_images]
    if check:
        check_hom(A, G, g_images)
        check_hom(A, G, h_images)
    GG = direct_product(G, G)
    pair = [g + h for g, h in zip(g_images, h_images)]
    diag = igs_from_generators(GG, [G.gen(i) + G.gen(i) for i in range(G.n)])
    return preimage(A, GG, pair, diag, check=False)


def _intersection_chain(A: Subgroup, B: Subgroup):
    """Per layer k: generators of A n B G_k, their layer values and B's lead exponent."""
    key = (A, B)
    hit = _CHAIN_CACHE.get(key)
    if hit is not None:
        return hit
    P = A.presentation
    C = list(A.rows)
    chain = []
    for k in range(P.n):
        m = B.lead_exponent(k)
        values = [_layer_value(B, k, c) for c in C]
        chain.append((C, values, m))
        C = _cyclic_kernel(P, C, values, m)
    out = (chain, igs_from_generators(P, C))
    if len(_CHAIN_CACHE) > 4096:
        _CHAIN_CACHE.clear()
    _CHAIN_CACHE[key] = out
    return out


_CHAIN_CACHE: Dict[Tuple[Subgroup, Subgroup], tuple] = {}


def product_coset(A: Subgroup, B: Subgroup, x: Sequence[int]) -> Optional[Tuple[NilElement, Subgroup]]:
    """Solve x = a b with a in A, b in B.

    Returns ``(a0, C)`` where the solutions are exactly a = a0 c with c in
    C = A n B, or ``None`` when x is not in AB.
    """
    P = A.presentation
    x = tuple(x)
    a0 = P.identity()
    chain, inter = _intersection_chain(A, B)
    for k, (C, values, m) in enumerate(chain):
        y = P.multiply(P.invert(a0), x)
        t = _layer_value(B, k, y)
        row = values + ([m] if m else [])
        if not any(row):
            if t:
                return None
            continue
        sol = solve_diophantine([row], [t])
        if sol is None:
            return None
        for c, e in zip(C, sol[0][: len(C)]):
            if e:
                a0 = P.multiply(a0, P.power(c, e))
    return a0, inter


def product_membership(P: NilpotentPresentation, A: Subgroup, B: Subgroup,
                       x: Sequence[int]) -> Tuple[bool, Optional[Tuple[NilElement, NilElement]]]:
    """Whether x is in AB; on success also (a, b) with x = a b."""
    res = product_coset(A, B, x)
    if res is None:
        return False, None
    a = res[0]
    return True, (a, P.multiply(P.invert(a), tuple(x)))


def conjugate_subgroup(S: Subgroup, y: Sequence[int]) -> Subgroup:
    """y S y^-1."""
    P = S.presentation
    yi = P.invert(y)
    return igs_from_generators(P, [P.multiply(y, P.multiply(r, yi)) for r in S.rows])


def lower_central_series(P: NilpotentPresentation) -> List[Subgroup]:
    gens = [P.gen(i) for i in range(P.n)]
    series = [whole_group(P)]
    while not series[-1].is_trivial():
        cur = series[-1]
        comms = [P.comm(r, g) for r in cur.rows for g in gens]
        nxt = normal_closure(P, comms, gens)
        if nxt == cur:
            raise ValueError("lower central series stalled; presentation is not nilpotent")
        series.append(nxt)
    return series


def nilpotency_class(P: NilpotentPresentation) -> int:
    return len(lower_central_series(P)) - 1
