"""Command-line front end: ``nilpcp <command> <instance-file>``.

Prints one verdict line on stdout (``YES witness=...``, ``YES`` or ``NO``);
the derivation trace goes to stderr. Exit status 0 means decided, 2 means
the input was rejected.
"""
from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .decision import (Decision, NpcpInstance, PcpInstance, conjugacy_via_npcp, decide_npcp1,
                       decide_npcp_nilpotent, decide_pcp_nilpotent, decide_verbal_pcp, wp_via_pcp)
from .hall import LawWord, is_law
from .nilpotent import NilpotentPresentation, PresentationError, check_consistency
from .virtual import ExtensionError, VirtualElement, VirtualGroup, decide_pcp_virtual

COMMANDS = ("pcp", "verbal-pcp", "npcp", "npcp1", "wp", "conj", "check-law")
CONSTANT_NAMES = ("u1", "u2", "v1", "v2")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        self.line, self.column, self.message = line, column, message
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass
class NilpotentBlock:
    n: int
    cls: Optional[int]
    relations: Dict[Tuple[int, int], Tuple[int, ...]]  # 1-based keys, full vectors

    def build(self) -> NilpotentPresentation:
        rels = {(i - 1, j - 1): v for (i, j), v in self.relations.items()}
        return NilpotentPresentation(self.n, rels, nilpotency_class=self.cls)


@dataclass
class VirtualBlock:
    kernel: NilpotentBlock
    m: int
    action: Dict[Tuple[int, int], Tuple[int, ...]]  # (coset, generator), 1-based
    factors: Dict[Tuple[int, int], Tuple[Optional[int], Tuple[int, ...]]]  # (i, j) -> (sigma, k)
    gens: List[Tuple[str, int, Tuple[int, ...]]]  # name, coset (1-based), k


@dataclass
class InstanceFile:
    group: object
    letters: List[str] = field(default_factory=list)
    g: Dict[str, object] = field(default_factory=dict)
    h: Dict[str, object] = field(default_factory=dict)
    constants: Optional[Dict[str, object]] = None
    elements: Dict[str, object] = field(default_factory=dict)
    law: Optional[str] = None
    problem: Optional[str] = None

    # images are stored as tuples of ints (nilpotent) or ("coset", i, k) /
    # ("word", ((name, exp), ...)) for virtual groups

    def is_virtual(self) -> bool:
        return isinstance(self.group, VirtualBlock)


# -- tokenizing ----------------------------------------------------------------

_TOKEN = re.compile(r"[^\s:=]+|:|=")


def _tokens(line: str) -> List[Tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(line)]


class _Line:
    def __init__(self, lineno: int, text: str):
        self.lineno = lineno
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def error(self, msg: str, col: Optional[int] = None) -> ParseError:
        if col is None:
            col = self.toks[self.i][1] if self.i < len(self.toks) else len(self.text) + 1
        return ParseError(self.lineno, col, msg)

    def peek(self) -> Optional[str]:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, expected: Optional[str] = None) -> str:
        if self.i >= len(self.toks):
            raise self.error(f"expected {expected!r}" if expected else "unexpected end of line")
        tok, col = self.toks[self.i]
        if expected is not None and tok != expected:
            raise self.error(f"expected {expected!r}, got {tok!r}")
        self.i += 1
        return tok

    def take_int(self, positive: bool = False, what: str = "integer") -> int:
        tok = self.peek()
        col = self.toks[self.i][1] if tok is not None else len(self.text) + 1
        try:
            v = int(self.take())
        except (ValueError, ParseError):
            raise ParseError(self.lineno, col, f"expected {what}, got {tok!r}") from None
        if positive and v < 1:
            raise ParseError(self.lineno, col, f"{what} must be at least 1, got {v}")
        return v

    def rest_ints(self) -> Tuple[int, ...]:
        out = []
        while self.peek() is not None:
            out.append(self.take_int())
        return tuple(out)

    def keyvalue(self, key: str) -> int:
        tok = self.peek()
        if tok != key:
            raise self.error(f"expected {key}=")
        self.take()
        self.take("=")
        return self.take_int(positive=True, what=key)

    def done(self):
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek()!r}")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


# -- parsing -------------------------------------------------------------------

def parse_instance(text: str) -> InstanceFile:
    lines = [_Line(k + 1, _strip(raw)) for k, raw in enumerate(text.splitlines())]
    lines = [ln for ln in lines if ln.toks]
    if not lines:
        raise ParseError(1, 1, "empty instance file")
    it = iter(lines)
    first = next(it)
    first.take("GROUP")
    kind = first.peek()
    group_line = first
    section = None
    vblock: Optional[VirtualBlock] = None
    if kind == "nilpotent":
        first.take()
        nblock = _nilpotent_header(first)
        group = nblock
    elif kind == "virtual":
        first.take()
        first.done()
        vblock = VirtualBlock(None, 0, {}, {}, [])
        group = vblock
        nblock = None
    else:
        raise first.error("GROUP must be 'nilpotent' or 'virtual'")
    inst = InstanceFile(group)
    current: Optional[Dict[str, object]] = None
    seen_hom = set()
    for ln in it:
        head = ln.peek()
        if head == "REL":
            ln.take()
            target = nblock if nblock is not None else (vblock.kernel if vblock else None)
            if target is None:
                raise ln.error("REL before the group size is known")
            _parse_rel(ln, target)
            current = None
        elif head == "POWER":
            raise ln.error("power relations (torsion) are not supported")
        elif head == "KERNEL":
            if vblock is None:
                raise ln.error("KERNEL only belongs to virtual groups")
            ln.take()
            ln.take("nilpotent")
            vblock.kernel = _nilpotent_header(ln)
            current = None
        elif head == "COSETS":
            if vblock is None:
                raise ln.error("COSETS only belongs to virtual groups")
            ln.take()
            vblock.m = ln.keyvalue("m")
            ln.done()
            current = None
        elif head == "ACTION":
            _parse_action(ln, vblock)
            current = None
        elif head == "FACTOR":
            _parse_factor(ln, vblock)
            current = None
        elif head == "GEN":
            _parse_gen(ln, vblock)
            current = None
        elif head == "HOM":
            ln.take()
            name = ln.take()
            if name not in ("g", "h"):
                raise ln.error(f"HOM must be g or h, got {name!r}", ln.toks[1][1])
            if name in seen_hom:
                raise ln.error(f"HOM {name} given twice", ln.toks[1][1])
            seen_hom.add(name)
            ln.done()
            current = inst.g if name == "g" else inst.h
            section = name
        elif head == "CONSTANTS":
            ln.take()
            ln.done()
            if inst.constants is not None:
                raise ln.error("CONSTANTS given twice", 1)
            inst.constants = {}
            current = inst.constants
            section = "constants"
        elif head == "ELEMENT":
            ln.take()
            name = ln.take()
            ln.take("->")
            inst.elements[name] = _parse_image(ln, inst)
            current = None
        elif head == "LAW":
            ln.take()
            law_text = ln.text[ln.toks[ln.i][1] - 1:].strip() if ln.peek() else ""
            try:
                LawWord.parse(law_text)
            except ValueError as e:
                raise ln.error(f"bad law: {e}") from None
            inst.law = law_text
            ln.i = len(ln.toks)
            current = None
        elif head == "PROBLEM":
            ln.take()
            p = ln.take()
            if p not in COMMANDS:
                raise ln.error(f"unknown problem {p!r}", ln.toks[1][1])
            ln.done()
            inst.problem = p
            current = None
        elif len(ln.toks) >= 2 and ln.toks[1][0] == "->":
            if current is None:
                raise ln.error("image line outside a HOM or CONSTANTS block", 1)
            name = ln.take()
            ln.take("->")
            if section == "constants":
                if name not in CONSTANT_NAMES:
                    raise ln.error(f"unknown constant {name!r}", 1)
            elif section == "g":
                if name not in inst.letters:
                    inst.letters.append(name)
            elif name not in inst.g:
                raise ln.error(f"letter {name!r} has no image under g", 1)
            if name in current:
                raise ln.error(f"{name!r} given twice", 1)
            current[name] = _parse_image(ln, inst)
        else:
            raise ln.error(f"unknown keyword {head!r}", 1)
    _check_instance(inst, group_line)
    return inst


def _nilpotent_header(ln: _Line) -> NilpotentBlock:
    n = ln.keyvalue("n")
    cls = None
    if ln.peek() == "class":
        cls = ln.keyvalue("class")
    ln.done()
    return NilpotentBlock(n, cls, {})


def _parse_rel(ln: _Line, block: NilpotentBlock):
    i = ln.take_int(positive=True, what="generator index")
    col_j = ln.toks[ln.i][1] if ln.peek() else len(ln.text) + 1
    j = ln.take_int(positive=True, what="generator index")
    if not i < j <= block.n:
        raise ParseError(ln.lineno, col_j, f"need 1 <= i < j <= {block.n}, got {i} {j}")
    ln.take(":")
    vec = ln.rest_ints()
    if len(vec) == block.n - j:
        vec = (0,) * j + vec
    if len(vec) != block.n:
        raise ln.error(f"expected {block.n} or {block.n - j} exponents, got {len(vec)}")
    if (i, j) in block.relations:
        raise ln.error(f"relation {i} {j} given twice", 1)
    block.relations[(i, j)] = vec


def _need_kernel(ln: _Line, vblock: Optional[VirtualBlock]) -> NilpotentBlock:
    if vblock is None:
        raise ln.error(f"{ln.peek()} only belongs to virtual groups", 1)
    if vblock.kernel is None or not vblock.m:
        raise ln.error("KERNEL and COSETS must come first", 1)
    return vblock.kernel


def _coset_index(ln: _Line, m: int, tok: Optional[str] = None) -> int:
    col = ln.toks[ln.i][1] if ln.peek() else len(ln.text) + 1
    raw = ln.take() if tok is None else tok
    s = raw[1:] if raw.startswith("t") else raw
    try:
        v = int(s)
    except ValueError:
        raise ParseError(ln.lineno, col, f"expected a coset index, got {raw!r}") from None
    if not 1 <= v <= m:
        raise ParseError(ln.lineno, col, f"coset index must be in 1..{m}, got {v}")
    return v


def _kvec(ln: _Line, n: int) -> Tuple[int, ...]:
    vec = ln.rest_ints()
    if len(vec) != n:
        raise ln.error(f"expected {n} exponents, got {len(vec)}")
    return vec


def _parse_action(ln: _Line, vblock):
    K = _need_kernel(ln, vblock)
    ln.take()
    t = _coset_index(ln, vblock.m)
    ln.take(":")
    col = ln.toks[ln.i][1] if ln.peek() else len(ln.text) + 1
    a = ln.take_int(positive=True, what="generator index")
    if a > K.n:
        raise ParseError(ln.lineno, col, f"generator index must be in 1..{K.n}, got {a}")
    ln.take("->")
    vblock.action[(t, a)] = _kvec(ln, K.n)


def _parse_factor(ln: _Line, vblock):
    K = _need_kernel(ln, vblock)
    ln.take()
    i = _coset_index(ln, vblock.m)
    j = _coset_index(ln, vblock.m)
    s = None
    if ln.peek() == "->":
        ln.take()
        s = _coset_index(ln, vblock.m)
    ln.take(":")
    vblock.factors[(i, j)] = (s, _kvec(ln, K.n))


def _parse_gen(ln: _Line, vblock):
    K = _need_kernel(ln, vblock)
    ln.take()
    name = ln.take()
    if any(name == g[0] for g in vblock.gens):
        raise ln.error(f"generator {name!r} given twice")
    ln.take("=")
    ln.take("coset")
    i = _coset_index(ln, vblock.m)
    ln.take("k")
    vblock.gens.append((name, i, _kvec(ln, K.n)))


_POWER = re.compile(r"^([A-Za-z_][\w']*)(?:\^(-?\d+))?$")


def _parse_image(ln: _Line, inst: InstanceFile):
    if not inst.is_virtual():
        return _kvec(ln, inst.group.n)
    vblock: VirtualBlock = inst.group
    if ln.peek() == "coset":
        ln.take()
        i = _coset_index(ln, vblock.m)
        ln.take("k")
        return ("coset", i, _kvec(ln, vblock.kernel.n))
    factors = []
    names = {g[0] for g in vblock.gens}
    while ln.peek() is not None:
        col = ln.toks[ln.i][1]
        tok = ln.take()
        if tok == "1":
            continue
        m = _POWER.match(tok)
        if not m or m.group(1) not in names:
            raise ParseError(ln.lineno, col, f"unknown generator {tok!r}")
        factors.append((m.group(1), int(m.group(2) or 1)))
    return ("word", tuple(factors))


def _check_instance(inst: InstanceFile, group_line: _Line):
    if inst.is_virtual():
        v = inst.group
        if v.kernel is None:
            raise ParseError(group_line.lineno, 1, "virtual group without KERNEL")
        if not v.m:
            raise ParseError(group_line.lineno, 1, "virtual group without COSETS")
        if not v.gens:
            raise ParseError(group_line.lineno, 1, "virtual group without GEN lines")
    if set(inst.h) != set(inst.g):
        missing = sorted(set(inst.g) ^ set(inst.h))
        raise ParseError(group_line.lineno, 1, f"g and h disagree on letters {missing}")
    p = inst.problem
    if p in ("npcp", "npcp1") and inst.constants is None:
        raise ParseError(group_line.lineno, 1, f"PROBLEM {p} needs CONSTANTS")
    if p is not None and p not in ("npcp", "npcp1") and inst.constants is not None:
        raise ParseError(group_line.lineno, 1, f"CONSTANTS given for PROBLEM {p}")
    try:
        group = build_group(inst)
    except (PresentationError, ExtensionError) as e:
        raise ParseError(group_line.lineno, 1, f"invalid group: {e}") from None
    K = group.K if isinstance(group, VirtualGroup) else group
    if not check_consistency(K):
        raise ParseError(group_line.lineno, 1, "relations are inconsistent")


# -- building ------------------------------------------------------------------

def build_group(inst: InstanceFile):
    if inst.is_virtual():
        v = inst.group
        K = v.kernel.build()
        m = v.m
        action = []
        for t in range(1, m + 1):
            action.append([v.action.get((t, a), K.gen(a - 1)) for a in range(1, K.n + 1)])
        sigma = [[(i + j) % m for j in range(m)] for i in range(m)]
        factors = {}
        for (i, j), (s, k) in v.factors.items():
            if s is not None:
                sigma[i - 1][j - 1] = s - 1
            factors[(i - 1, j - 1)] = k
        gens = [VirtualElement(k, i - 1) for _, i, k in v.gens]
        return VirtualGroup(K, m, action, sigma, factors, gens, names=[g[0] for g in v.gens])
    return inst.group.build()


def element_of(inst: InstanceFile, G, image):
    if not isinstance(G, VirtualGroup):
        return tuple(image)
    if image[0] == "coset":
        return VirtualElement(tuple(image[2]), image[1] - 1)
    names = [g[0] for g in inst.group.gens]
    out = G.identity()
    for name, e in image[1]:
        out = G.multiply(out, G.power(G.generators[names.index(name)], e))
    return out


def pcp_instance(inst: InstanceFile, G) -> PcpInstance:
    g = [element_of(inst, G, inst.g[a]) for a in inst.letters]
    h = [element_of(inst, G, inst.h[a]) for a in inst.letters]
    return PcpInstance(len(inst.letters), G, g, h)


def npcp_instance(inst: InstanceFile, G) -> NpcpInstance:
    base = pcp_instance(inst, G)
    consts = {k: element_of(inst, G, v) for k, v in (inst.constants or {}).items()}
    return NpcpInstance(base.alphabet_size, G, base.g, base.h, **consts)


# -- serializing ---------------------------------------------------------------

def _ints(v) -> str:
    return " ".join(str(x) for x in v)


def _image_text(image) -> str:
    if isinstance(image, tuple) and image and image[0] == "coset":
        return f"coset {image[1]} k {_ints(image[2])}"
    if isinstance(image, tuple) and image and image[0] == "word":
        if not image[1]:
            return "1"
        return " ".join(name if e == 1 else f"{name}^{e}" for name, e in image[1])
    return _ints(image)


def _nil_lines(block: NilpotentBlock, head: str) -> List[str]:
    cls = f" class={block.cls}" if block.cls is not None else ""
    out = [f"{head} nilpotent n={block.n}{cls}"]
    for (i, j), v in sorted(block.relations.items()):
        out.append(f"REL {i} {j} : {_ints(v)}")
    return out


def serialize_instance(inst: InstanceFile) -> str:
    out: List[str] = []
    if inst.is_virtual():
        v = inst.group
        out.append("GROUP virtual")
        out += _nil_lines(v.kernel, "KERNEL")
        out.append(f"COSETS m={v.m}")
        for (t, a), img in sorted(v.action.items()):
            out.append(f"ACTION t{t}: {a} -> {_ints(img)}")
        for (i, j), (s, k) in sorted(v.factors.items()):
            arrow = f" -> {s}" if s is not None else ""
            out.append(f"FACTOR {i} {j}{arrow} : {_ints(k)}")
        for name, i, k in v.gens:
            out.append(f"GEN {name} = coset {i} k {_ints(k)}")
    else:
        out += _nil_lines(inst.group, "GROUP")
    for name, table in (("g", inst.g), ("h", inst.h)):
        if table:
            out.append(f"HOM {name}")
            for a in inst.letters:
                out.append(f"{a} -> {_image_text(table[a])}")
    if inst.constants is not None:
        out.append("CONSTANTS")
        for k in CONSTANT_NAMES:
            if k in inst.constants:
                out.append(f"{k} -> {_image_text(inst.constants[k])}")
    for name, img in inst.elements.items():
        out.append(f"ELEMENT {name} -> {_image_text(img)}")
    if inst.law is not None:
        out.append(f"LAW {inst.law}")
    if inst.problem is not None:
        out.append(f"PROBLEM {inst.problem}")
    return "\n".join(out) + "\n"


# -- running -------------------------------------------------------------------

class InputError(ValueError):
    pass


def _need(cond: bool, msg: str):
    if not cond:
        raise InputError(msg)


def run_instance(command: str, inst: InstanceFile) -> Tuple[str, List[str]]:
    """Decide ``command`` on a parsed instance; returns (verdict line, trace)."""
    if command not in COMMANDS:
        raise InputError(f"unknown command {command!r}")
    if inst.problem is not None and inst.problem != command:
        raise InputError(f"file declares PROBLEM {inst.problem}, not {command}")
    G = build_group(inst)
    virtual = isinstance(G, VirtualGroup)
    if command in ("pcp", "verbal-pcp", "npcp", "npcp1"):
        _need(bool(inst.letters), "no HOM g / HOM h blocks")
    if command == "pcp":
        I = pcp_instance(inst, G)
        d = decide_pcp_virtual(I) if virtual else decide_pcp_nilpotent(I)
        return d.verdict_line(), d.trace
    _need(not virtual or command == "wp", f"{command} needs a nilpotent group")
    if command == "verbal-pcp":
        d = decide_verbal_pcp(pcp_instance(inst, G))
        return d.verdict_line(), d.trace
    if command in ("npcp", "npcp1"):
        _need(inst.constants is not None, f"{command} needs a CONSTANTS block")
        I = npcp_instance(inst, G)
        d = decide_npcp_nilpotent(I) if command == "npcp" else decide_npcp1(I)
        return _npcp_line(d), d.trace
    if command == "wp":
        _need("w" in inst.elements, "wp needs ELEMENT w")
        w = element_of(inst, G, inst.elements["w"])
        return ("YES" if wp_via_pcp(G, w) else "NO"), []
    if command == "conj":
        _need("u" in inst.elements and "v" in inst.elements, "conj needs ELEMENT u and ELEMENT v")
        d = conjugacy_via_npcp(G, element_of(inst, G, inst.elements["u"]),
                               element_of(inst, G, inst.elements["v"]))
        return _npcp_line(d), d.trace
    _need(inst.law is not None, "check-law needs a LAW line")
    return ("YES" if is_law(G, LawWord.parse(inst.law)) else "NO"), []


def _npcp_line(d: Decision) -> str:
    if d.answer:
        return f"YES witness={' '.join(str(x) for x in d.witness or ())}".rstrip()
    return "NO"


def run(command: str, path: str, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print(f"error: cannot read {path}: {e.strerror}", file=err)
        return 2
    try:
        inst = parse_instance(text)
        verdict, trace = run_instance(command, inst)
    except ParseError as e:
        print(f"error: {path}: {e}", file=err)
        return 2
    except InputError as e:
        print(f"error: {path}: {e}", file=err)
        return 2
    except ValueError as e:
        # ill-defined maps, torsion in a quotient and similar input problems
        print(f"error: {path}: {e}", file=err)
        return 2
    print(verdict, file=out)
    for line in trace:
        print(line, file=err)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="nilpcp", description="Decide PCP-type problems over nilpotent groups.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("file")
    args = parser.parse_args(argv)
    return run(args.command, args.file)


if __name__ == "__main__":
    sys.exit(main())
