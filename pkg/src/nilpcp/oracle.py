"""Brute-force checks used to test and cross-examine the deciders.

None of these are decision procedures: a search that comes back empty only
says nothing was found within the budget.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Set

from .freegroup import Word
from .linalg import solve_diophantine


class BudgetExhausted(RuntimeError):
    """The wall-clock cap ran out before the search space was covered."""


@dataclass(frozen=True)
class SearchBudget:
    max_length: int = 8
    max_exponent: int = 3
    seconds: Optional[float] = None

    def __post_init__(self):
        if self.max_length < 1 or self.max_exponent < 1:
            raise ValueError("search bounds must be positive")
        if self.seconds is not None and self.seconds <= 0:
            raise ValueError("time cap must be positive")


def letter_order(rank: int) -> List[int]:
    return [x for i in range(1, rank + 1) for x in (i, -i)]


def reduced_words(rank: int, max_length: int) -> Iterator[Word]:
    """Nonempty reduced words in length-lex order (letters ordered 1, -1, 2, -2, ...)."""
    letters = letter_order(rank)
    layer = [()]
    for _ in range(max_length):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                v = w + (x,)
                nxt.append(v)
                yield tuple.__new__(Word, v)
        layer = nxt


def brute_pcp_search(I, budget: SearchBudget) -> Optional[Word]:
    """First word (length-lex) with g(w) = h(w) outside ker g n ker h, within the budget."""
    K = I.codomain
    one = K.identity()
    start = time.monotonic()
    # prefix values are extended letter by letter instead of re-evaluated
    letters = letter_order(I.alphabet_size)
    gimg = {x: (I.g[x - 1] if x > 0 else K.invert(I.g[-x - 1])) for x in letters}
    himg = {x: (I.h[x - 1] if x > 0 else K.invert(I.h[-x - 1])) for x in letters}
    layer = [((), one, one)]
    for _ in range(budget.max_length):
        nxt = []
        for w, gv, hv in layer:
            if budget.seconds is not None and time.monotonic() - start > budget.seconds:
                raise BudgetExhausted(f"no verdict after {budget.seconds} s")
            for x in letters:
                if w and w[-1] == -x:
                    continue
                g2, h2 = K.multiply(gv, gimg[x]), K.multiply(hv, himg[x])
                v = w + (x,)
                if g2 == h2 and (g2 != one or h2 != one):
                    return Word(v)
                nxt.append((v, g2, h2))
        layer = nxt
    return None


def brute_npcp_search(I, budget: SearchBudget, allow_empty: bool = False) -> Optional[Word]:
    """First nonempty word w with u1 g(w) u2 = v1 h(w) v2 (or the empty word if allowed)."""
    if allow_empty:
        left, right = I.sides(Word())
        if left == right:
            return Word()
    start = time.monotonic()
    for w in reduced_words(I.alphabet_size, budget.max_length):
        if budget.seconds is not None and time.monotonic() - start > budget.seconds:
            raise BudgetExhausted(f"no verdict after {budget.seconds} s")
        left, right = I.sides(w)
        if left == right:
            return w
    return None


def bounded_products(P, gens: Sequence[Sequence[int]], budget: SearchBudget) -> Set[tuple]:
    """All products of at most max_length generator powers with exponents up to max_exponent."""
    seen = {P.identity()}
    frontier = {P.identity()}
    powers = [P.power(g, e) for g in gens for e in range(-budget.max_exponent, budget.max_exponent + 1) if e]
    for _ in range(budget.max_length):
        nxt = set()
        for x in frontier:
            for p in powers:
                y = P.multiply(x, p)
                if y not in seen:
                    nxt.add(y)
        seen |= nxt
        frontier = nxt
        if not frontier:
            break
    return seen


def brute_product_membership(P, a_gens, b_gens, x, budget: SearchBudget) -> bool:
    """Is x = a b with a, b bounded products of the given generators? Sound for True only."""
    A = bounded_products(P, a_gens, budget)
    B = bounded_products(P, b_gens, budget)
    x = tuple(x)
    return any(P.multiply(P.invert(a), x) in B for a in A)


def bounded_product_set(P, a_gens, b_gens, budget: SearchBudget) -> Set[tuple]:
    """Every a b with a, b bounded products of the given generators."""
    A = bounded_products(P, a_gens, budget)
    B = bounded_products(P, b_gens, budget)
    return {P.multiply(a, b) for a in A for b in B}


# -- an exact check for products of subgroups of the Heisenberg group -------
#
# Coordinates are those of heisenberg(): (x)(y) = (x1+y1, x2+y2, x3+y3-x2*y1).
# A 2-generated subgroup is {g^i h^j z^(k e)} when the images of g, h in Z^2 are
# independent (e = |[g, h]|), and {a^i z^(k e)} for a single a otherwise. The
# central coordinate of a product of such powers is an integer-valued
# quadratic in the exponents, so modulo e it is periodic with period 2e; when
# every modulus is 0 only one free exponent remains and the quadratic is solved.

def _h3_mul(x, y):
    return (x[0] + y[0], x[1] + y[1], x[2] + y[2] - x[1] * y[0])


def _h3_pow(x, n):
    a, b, c = x
    return (n * a, n * b, n * c - n * (n - 1) // 2 * a * b)


def _h3_inv(x):
    return _h3_pow(x, -1)


def _xgcd(a, b):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, s, t = _xgcd(b, a % b)
    return g, t, s - (a // b) * t


def _h3_shape(gens):
    """(free generators, central modulus) describing the subgroup."""
    gens = [tuple(g) for g in gens if any(g)]
    e = 0
    free = []
    for g in gens:
        if not free:
            free.append(g)
            continue
        if len(free) == 2:
            raise ValueError("at most two generators")
        a = free[0]
        det = a[0] * g[1] - a[1] * g[0]
        if det:
            free.append(g)
            comm = _h3_mul(_h3_mul(_h3_inv(a), _h3_inv(g)), _h3_mul(a, g))
            e = math.gcd(e, comm[2])
            continue
        # parallel images: the subgroup is abelian
        u, v = (a[0], a[1]), (g[0], g[1])
        if u == (0, 0):
            a, g, u, v = g, a, v, u
        if u == (0, 0):
            e = math.gcd(e, a[2], g[2])
            free = []
            continue
        k = 0 if u[0] else 1
        p, q = u[k], v[k]
        d, s_, t_ = _xgcd(p, q)
        free = [_h3_mul(_h3_pow(a, s_), _h3_pow(g, t_))]
        central = _h3_mul(_h3_pow(a, q // d), _h3_pow(g, -(p // d)))
        e = math.gcd(e, central[2])
    if len(free) == 1 and not any(free[0][:2]):
        e = math.gcd(e, free[0][2])
        free = []
    return free, abs(e)


def h3_product_membership(a_gens, b_gens, x) -> bool:
    """Exact test of x in AB for A, B generated by at most two elements of H3 each."""
    fa, ea = _h3_shape(a_gens)
    fb, eb = _h3_shape(b_gens)
    free = fa + fb
    D = math.gcd(ea, eb)
    x = tuple(x)

    def central(s):
        y = (0, 0, 0)
        for g, n in zip(free, s):
            y = _h3_mul(y, _h3_pow(g, n))
        return y[2] - x[2]

    if not free:
        if x[0] or x[1]:
            return False
        return x[2] % D == 0 if D else x[2] == 0
    M = [[g[0] for g in free], [g[1] for g in free]]
    sol = solve_diophantine(M, [x[0], x[1]])
    if sol is None:
        return False
    p, basis = sol
    point = lambda t: [p[i] + sum(c * b[i] for c, b in zip(t, basis)) for i in range(len(free))]
    if D:
        return any(central(point(t)) % D == 0
                   for t in itertools.product(range(2 * D), repeat=len(basis)))
    if not basis:
        return central(p) == 0
    if len(basis) > 1:
        raise AssertionError("two free exponents with no central modulus")
    f0, f1, f2 = (central(point([t])) for t in (0, 1, 2))
    A2 = f2 - 2 * f1 + f0
    B2 = 2 * (f1 - f0) - A2
    C2 = 2 * f0
    if A2 == 0:
        if B2 == 0:
            return C2 == 0
        return C2 % B2 == 0
    disc = B2 * B2 - 4 * A2 * C2
    if disc < 0:
        return False
    r = math.isqrt(disc)
    if r * r != disc:
        return False
    return any(num % (2 * A2) == 0 and central(point([num // (2 * A2)])) == 0 for num in (-B2 + r, -B2 - r))


def grid_zero_test(p, degree_bounds) -> bool:
    """Does p vanish on the grid {0..d_v} for every variable v? Equivalent to p == 0.

    ``degree_bounds`` maps variable names to bounds (a sequence is matched with
    the sorted variables of p).
    """
    variables = p.variables()
    if not isinstance(degree_bounds, dict):
        bounds = list(degree_bounds)
        if len(bounds) < len(variables):
            raise ValueError("one degree bound per variable is required")
        degree_bounds = dict(zip(variables, bounds))
    for v in variables:
        if v not in degree_bounds:
            raise ValueError(f"no degree bound for {v}")
        if degree_bounds[v] < p.degree(v):
            raise ValueError(f"bound {degree_bounds[v]} for {v} is below its degree {p.degree(v)}")
    if not variables:
        return p.is_zero()
    f = p.compile(variables)
    ranges = [range(degree_bounds[v] + 1) for v in variables]
    return all(f(*pt) == 0 for pt in itertools.product(*ranges))
