"""Symbolic Bhattacharyya functions of a punctured code and a few order checks."""

from polar_po.bec_engine import path_polynomial, polarize_vector, initial_vector
from polar_po.path_algebra import all_paths
from polar_po.po_core import bmsc_po, dominates
from polar_po.polynomial import format_power

SPEC = "punc:1/4"

print("butterfly on (1, x, x, x):")
for k, z in enumerate(polarize_vector(initial_vector(SPEC, 4)), 1):
    print(f"  position {k}: {format_power(z)}")

print("\nlength-3 paths:")
for a in all_paths(3):
    print(f"  {a}: {format_power(path_polynomial(SPEC, a))}")

for a, b in [("01", "10"), ("011", "101"), ("0011", "0101"), ("0111", "1000")]:
    bec = dominates(SPEC, a, b)
    sym = bmsc_po(SPEC, a, b)
    print(f"\n{a} vs {b}: erasure channel {bec.status} ({bec.evidence}); all symmetric channels {sym.status}")
