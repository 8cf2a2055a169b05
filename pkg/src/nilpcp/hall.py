"""Hall polynomials: symbolic collection with polynomial exponents, and law checking.

Everything is exact. For each level j (bottom-up) we build, as polynomials:

* conj_j(t, X): the normal form of a_j^-t X a_j^t for X in <a_{j+1}, ...>,
* mul_j(x, y):  the normal form of x y for x, y in <a_j, ...>,
* pow_j(x, m):  the normal form of x^m.

conj and pow come from recurrences F(s+1) = F(s) + D(s) that are
unitriangular in the coordinates; each increment D(s) is an explicit
polynomial in s, so F(m) = sum_{s<m} D(s) is obtained by rewriting D in the
binomial basis C(s, k) and using sum_{s<m} C(s, k) = C(m, k+1). The identity
holds for every integer m because both sides satisfy the same recurrence.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .nilpotent import NilpotentPresentation

Monomial = Tuple[Tuple[str, int], ...]


class PolyQ:
    """Multivariate polynomial with rational coefficients, kept in canonical form."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Union[int, Fraction]]] = None):
        clean: Dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[m] = clean.get(m, 0) + c
        self.terms = {m: c for m, c in sorted(clean.items()) if c}

    @classmethod
    def const(cls, c) -> "PolyQ":
        return cls({(): c})

    @classmethod
    def var(cls, name: str) -> "PolyQ":
        return cls({((name, 1),): 1})

    @staticmethod
    def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
        if not a:
            return b
        if not b:
            return a
        d = dict(a)
        for v, e in b:
            d[v] = d.get(v, 0) + e
        return tuple(sorted(d.items()))

    def _coerce(self, other) -> "PolyQ":
        return other if isinstance(other, PolyQ) else PolyQ.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return PolyQ(out)

    __radd__ = __add__

    def __neg__(self):
        return PolyQ({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = self._mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return PolyQ(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out, base = PolyQ.const(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, PolyQ):
            other = PolyQ.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> List[str]:
        return sorted({v for m in self.terms for v, _ in m})

    def degree(self, var: Optional[str] = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e for _, e in m) for m in self.terms)
        return max(dict(m).get(var, 0) for m in self.terms)

    def subs(self, mapping: Mapping[str, Union["PolyQ", int, Fraction]]) -> "PolyQ":
        """Simultaneous substitution of variables by polynomials or numbers."""
        mapping = {k: self._coerce(v) for k, v in mapping.items()}
        powcache: Dict[Tuple[str, int], PolyQ] = {}
        out = PolyQ()
        acc: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            term = PolyQ.const(c)
            keep = []
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in powcache:
                        powcache[key] = mapping[v] ** e
                    term = term * powcache[key]
                else:
                    keep.append((v, e))
            if keep:
                term = term * PolyQ({tuple(keep): 1})
            for mm, cc in term.terms.items():
                acc[mm] = acc.get(mm, 0) + cc
        out = PolyQ(acc)
        return out

    def eval(self, values: Mapping[str, int]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t *= values[v] ** e
            total += t
        return total

    def compile(self, names: Sequence[str]):
        """Fast evaluator taking positional integers in the order of ``names``."""
        pos = {v: i for i, v in enumerate(names)}
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // _gcd(den, c.denominator)
        items = [(int(c * den), [(pos[v], e) for v, e in m]) for m, c in self.terms.items()]

        def f(*args):
            s = 0
            for c, mono in items:
                t = c
                for i, e in mono:
                    t *= args[i] ** e
                s += t
            return Fraction(s, den)
        return f

    def __repr__(self):
        return f"PolyQ({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms.items():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def binomial_poly(var: str, k: int) -> PolyQ:
    """C(var, k) as a polynomial in var."""
    t = PolyQ.var(var)
    out = PolyQ.const(1)
    for i in range(k):
        out = out * (t - i)
    return out * Fraction(1, factorial(k))


def indefinite_sum(p: PolyQ, s: str, m: str) -> PolyQ:
    """sum_{s=0}^{m-1} p(s), exact for every integer m."""
    d = max(p.degree(s), 0)
    # Newton forward differences at s = 0, 1, ..., d
    vals = [p.subs({s: i}) for i in range(d + 1)]
    out = PolyQ()
    k = 0
    while vals:
        if not vals[0].is_zero():
            out = out + vals[0] * binomial_poly(m, k + 1)
        vals = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
        k += 1
    return out


class SymbolicCollector:
    """Generic multiplication, power and conjugation polynomials of a presentation."""

    def __init__(self, P: NilpotentPresentation):
        self.P = P
        n = P.n
        self.n = n
        # per level j: mul[j] is a list of polys for coordinates j..n-1 in x_j.., y_j..
        self.mul: List[Optional[List[PolyQ]]] = [None] * (n + 1)
        self.pow: List[Optional[List[PolyQ]]] = [None] * (n + 1)
        self.conj: List[Optional[List[PolyQ]]] = [None] * (n + 1)
        self.mul[n] = []
        self.pow[n] = []
        for j in range(n - 1, -1, -1):
            self._build(j)

    @staticmethod
    def xv(l: int) -> str:
        return f"x{l + 1}"

    @staticmethod
    def yv(l: int) -> str:
        return f"y{l + 1}"

    def multiply(self, j: int, x: Sequence[PolyQ], y: Sequence[PolyQ]) -> List[PolyQ]:
        """Product of two symbolic elements of <a_j, ...> (coordinate lists of length n - j)."""
        if j == self.n:
            return []
        mapping = {}
        for l in range(j, self.n):
            mapping[self.xv(l)] = x[l - j]
            mapping[self.yv(l)] = y[l - j]
        return [p.subs(mapping) for p in self.mul[j]]

    def power(self, j: int, x: Sequence[PolyQ], m) -> List[PolyQ]:
        if j == self.n:
            return []
        mapping = {self.xv(l): x[l - j] for l in range(j, self.n)}
        mapping["m"] = m
        return [p.subs(mapping) for p in self.pow[j]]

    def _phi_generic(self, j: int) -> List[PolyQ]:
        """a_j^-1 X a_j for generic X in <a_{j+1}, ...>, as coordinates j+1..n-1."""
        n = self.n
        imgs = self.P._phi(j, 1)
        acc = [PolyQ() for _ in range(j + 1, n)]
        for k in range(j + 1, n):
            v = [PolyQ.const(c) for c in imgs[k - j - 1][j + 1:]]
            factor = self.power(j + 1, v, PolyQ.var(self.xv(k)))
            acc = self.multiply(j + 1, acc, factor)
        return acc

    def _build(self, j: int):
        n = self.n
        # conjugation by a_j^t on <a_{j+1}, ...>: C(t+1) = phi(C(t)), C(0) = X
        if j + 1 < n:
            phi = self._phi_generic(j)
            conj: List[PolyQ] = []
            for l in range(j + 1, n):
                inc = phi[l - j - 1] - PolyQ.var(self.xv(l))
                sub = {self.xv(q): conj[q - j - 1] for q in range(j + 1, l)}
                inc = inc.subs({k: v.subs({"t": PolyQ.var("s")}) for k, v in sub.items()})
                conj.append(PolyQ.var(self.xv(l)) + indefinite_sum(inc, "s", "t"))
        else:
            conj = []
        self.conj[j] = conj
        # multiplication: x y = a_j^{x_j + y_j} conj(y_j, x_tail) y_tail
        tail_x = [c.subs({"t": PolyQ.var(self.yv(j))}) for c in conj]
        tail_y = [PolyQ.var(self.yv(l)) for l in range(j + 1, n)]
        mul = [PolyQ.var(self.xv(j)) + PolyQ.var(self.yv(j))] + self.multiply(j + 1, tail_x, tail_y)
        self.mul[j] = mul
        # powers: X(s+1) = X(s) x, X(0) = 1
        pw: List[PolyQ] = []
        for l in range(j, n):
            rest = mul[l - j] - PolyQ.var(self.xv(l)) - PolyQ.var(self.yv(l))
            sub = {self.xv(q): pw[q - j].subs({"m": PolyQ.var("s")}) for q in range(j, l)}
            sub.update({self.yv(q): PolyQ.var(self.xv(q)) for q in range(j, n)})
            inc = rest.subs(sub) + PolyQ.var(self.xv(l))
            pw.append(indefinite_sum(inc, "s", "m"))
        self.pow[j] = pw


@lru_cache(maxsize=64)
def symbolic_collector(P: NilpotentPresentation) -> SymbolicCollector:
    return SymbolicCollector(P)


def multiplication_polynomials(P: NilpotentPresentation) -> List[PolyQ]:
    """Polynomials d_1..d_n in x1..xn, y1..yn with a^x a^y = a^(d(x, y))."""
    return list(symbolic_collector(P).mul[0])


def power_polynomials(P: NilpotentPresentation) -> List[PolyQ]:
    """Polynomials in x1..xn and m giving the normal form of (a^x)^m."""
    return list(symbolic_collector(P).pow[0])


# -- law words -----------------------------------------------------------------

class LawWord(tuple):
    """A word in variables X_1, X_2, ...: a tuple of (variable, nonzero exponent)."""

    def __new__(cls, letters: Iterable[Tuple[int, int]] = ()):
        out: List[Tuple[int, int]] = []
        for v, e in letters:
            v, e = int(v), int(e)
            if v < 1:
                raise ValueError(f"variable index {v} must be positive")
            if out and out[-1][0] == v:
                e += out.pop()[1]
            if e:
                out.append((v, e))
        return super().__new__(cls, out)

    def inverse(self) -> "LawWord":
        return LawWord((v, -e) for v, e in reversed(self))

    def __mul__(self, other) -> "LawWord":
        return LawWord(tuple(self) + tuple(other))

    def num_variables(self) -> int:
        return max((v for v, _ in self), default=0)

    @classmethod
    def from_signed(cls, letters: Sequence[int]) -> "LawWord":
        return cls((abs(x), 1 if x > 0 else -1) for x in letters)

    @classmethod
    def commutator(cls, u: "LawWord", v: "LawWord") -> "LawWord":
        return u.inverse() * v.inverse() * u * v

    @classmethod
    def parse(cls, text: str) -> "LawWord":
        return _LawParser(text).parse()

    def __str__(self):
        if not self:
            return "1"
        return " ".join(f"X{v}" if e == 1 else f"X{v}^{e}" for v, e in self)


class _LawParser:
    token_re = re.compile(r"\s*(X\d+|x\d+|\^|-?\d+|\[|\]|,|\(|\)|\*)")

    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, int]] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = self.token_re.match(text, pos)
            if not m:
                raise ValueError(f"unexpected character {text[pos:pos + 1]!r} at column {pos + 1}")
            self.tokens.append((m.group(1), m.start(1)))
            pos = m.end()
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        if self.i >= len(self.tokens):
            raise ValueError(f"unexpected end of law {self.text!r}")
        tok, col = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise ValueError(f"expected {expected!r} at column {col + 1}, got {tok!r}")
        self.i += 1
        return tok

    def parse(self) -> LawWord:
        w = self.product()
        if self.peek() is not None:
            raise ValueError(f"trailing input at column {self.tokens[self.i][1] + 1}")
        return w

    def product(self) -> LawWord:
        w = LawWord()
        while self.peek() not in (None, "]", ",", ")"):
            if self.peek() == "*":
                self.take()
            w = w * self.factor()
        return w

    def factor(self) -> LawWord:
        tok = self.peek()
        if tok == "[":
            self.take()
            parts = [self.product()]
            while self.peek() == ",":
                self.take()
                parts.append(self.product())
            self.take("]")
            if len(parts) < 2:
                raise ValueError("a commutator needs at least two entries")
            base = parts[0]
            for p in parts[1:]:
                base = LawWord.commutator(base, p)
        elif tok == "(":
            self.take()
            base = self.product()
            self.take(")")
        elif tok is not None and tok[0] in "Xx":
            self.take()
            base = LawWord([(int(tok[1:]), 1)])
        else:
            col = self.tokens[self.i][1] + 1 if self.i < len(self.tokens) else len(self.text)
            raise ValueError(f"unexpected token {tok!r} at column {col}")
        if self.peek() == "^":
            self.take()
            e = int(self.take())
            base = _law_power(base, e)
        return base


def _law_power(w: LawWord, e: int) -> LawWord:
    base = w if e >= 0 else w.inverse()
    out = LawWord()
    for _ in range(abs(e)):
        out = out * base
    return out


def value_variable(i: int, l: int) -> str:
    """Name of the l-th exponent (1-based) of the i-th argument."""
    return f"e{i}_{l}"


def word_value_polynomials(P: NilpotentPresentation, w: LawWord, k: Optional[int] = None) -> List[PolyQ]:
    """Normal form of w(a^e1, ..., a^ek) as polynomials in the variables e{i}_{l}."""
    k = w.num_variables() if k is None else k
    if w.num_variables() > k:
        raise ValueError(f"law uses X{w.num_variables()} but only {k} variables were given")
    SC = symbolic_collector(P)
    n = P.n
    args = [[PolyQ.var(value_variable(i, l + 1)) for l in range(n)] for i in range(1, k + 1)]
    inverses: Dict[int, List[PolyQ]] = {}
    value = [PolyQ() for _ in range(n)]
    for v, e in w:
        x = args[v - 1]
        if e < 0:
            if v not in inverses:
                inverses[v] = SC.power(0, x, -1)
            x = inverses[v]
        # square-and-multiply on |e|
        e = abs(e)
        acc: Optional[List[PolyQ]] = None
        base = x
        while e:
            if e & 1:
                acc = base if acc is None else SC.multiply(0, acc, base)
            e >>= 1
            if e:
                base = SC.multiply(0, base, base)
        value = SC.multiply(0, value, acc)
    return value


def is_law(P: NilpotentPresentation, w: LawWord) -> bool:
    """True iff every value of w in the group is trivial (exact zero test)."""
    return all(p.is_zero() for p in word_value_polynomials(P, w))
