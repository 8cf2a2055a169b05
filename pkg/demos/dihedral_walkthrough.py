"""PCP over the infinite dihedral group, a finite extension of Z.

D = Z x| C2 with r generating Z and s the reflection; elements are pairs (k, i) meaning r^k s^i.

Run with:  python demos/dihedral_walkthrough.py
"""
from nilpcp.decision import PcpInstance
from nilpcp.oracle import SearchBudget, brute_pcp_search
from nilpcp.virtual import decide_pcp_virtual, infinite_dihedral, restrict_instance, v_invert, v_multiply

D = infinite_dihedral()
r, s = D.generators
print("s r =", v_multiply(D, s, r), " (that is r^-1 s)")
print()

cases = {
    "g(a) = r, h(a) = r^-1": PcpInstance(1, D, [r], [v_invert(D, r)]),
    "g(a) = h(a) = s": PcpInstance(1, D, [s], [s]),
    "g(a) = rs, h(a) = sr": PcpInstance(1, D, [v_multiply(D, r, s)], [v_multiply(D, s, r)]),
    "g = (s, r), h = (s, r^-1)": PcpInstance(2, D, [s, r], [s, v_invert(D, r)]),
}
for name, I in cases.items():
    basis, reps, _ = restrict_instance(I)
    d = decide_pcp_virtual(I)
    found = brute_pcp_search(I, SearchBudget(max_length=8))
    print(name)
    print("  N has index", len(reps), "with free basis", [str(b) for b in basis])
    print("  verdict:", d.verdict_line(), "| length-8 search:", "none" if found is None else str(found))
