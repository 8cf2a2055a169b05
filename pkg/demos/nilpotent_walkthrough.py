"""Walk through the deciders on the Heisenberg group H3 = <a1, a2 | [a1, a2] = a3 central>.

Run with:  python demos/nilpotent_walkthrough.py
"""
from nilpcp.decision import (NpcpInstance, PcpInstance, conjugacy_via_npcp, decide_npcp_nilpotent,
                             decide_pcp_nilpotent, decide_verbal_pcp, equalizer_generators, wp_via_pcp)
from nilpcp.hall import LawWord, is_law, multiplication_polynomials
from nilpcp.nilpotent import free_abelian, heisenberg

H = heisenberg()
Z = free_abelian(1)

print("Collection in H3")
print("  a2 a1 collects to", H.collect([2, 1]))
print("  (a1 a2)^2 collects to", H.power((1, 1, 0), 2))
print("  multiplication polynomials:", [str(p) for p in multiplication_polynomials(H)])
print()

print("PCP over Z with g = (2, 3), h = (3, 2)")
I = PcpInstance(2, Z, [(2,), (3,)], [(3,), (2,)])
FN, E = equalizer_generators(I)
print("  equalizer in Z^2 is generated by", [list(r) for r in E.rows])
print("  verdict:", decide_pcp_nilpotent(I).verdict_line())
print()

print("PCP over H3 with g = (a1, 1), h = (1, a2)")
I = PcpInstance(2, H, [(1, 0, 0), (0, 0, 0)], [(0, 0, 0), (0, 1, 0)])
FN, E = equalizer_generators(I)
print("  equalizer in F_2(a, b) is generated by", [str(FN.lift(r)) for r in E.rows])
d = decide_pcp_nilpotent(I)
print("  kernel-based verdict:", d.verdict_line())
for line in d.trace:
    print("    ", line)
v = decide_verbal_pcp(I)
print("  verbal verdict:", v.verdict_line(), "since [X1, X2] is a law:", is_law(H, LawWord.parse("[X1,X2]")))
print()

print("Non-homogeneous problem over Z: 2 + 3n = 5n")
d = decide_npcp_nilpotent(NpcpInstance(1, Z, [(3,)], [(5,)], u1=(2,)))
print("  verdict:", d.verdict_line())
print()

print("Word and conjugacy problems through the deciders")
print("  a3 trivial?", wp_via_pcp(H, (0, 0, 1)))
print("  [a1, a2] a3^-1 trivial?", wp_via_pcp(H, H.multiply(H.comm((1, 0, 0), (0, 1, 0)), (0, 0, -1))))
print("  a1 ~ a1 a3?", conjugacy_via_npcp(H, (1, 0, 0), (1, 0, 1)).verdict_line())
print("  a3 ~ a3^2?", conjugacy_via_npcp(H, (0, 0, 1), (0, 0, 2)).verdict_line())
