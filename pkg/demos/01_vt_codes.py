"""Residue classes of weighted sums, and why they make good sabotage targets.

Run: python3 demos/01_vt_codes.py
"""

from oiglab import BitVector
from oiglab.vt_code import VtParams, check_unique_neighborhoods, count_by_residue, covered_by_residue, residue

# A vector's residue is the sum of the positions of its ones, modulo length + 1.
for bits in ("1010", "1100", "0110"):
    print(f"residue({bits}) = {residue(BitVector.from_str(bits))}")

# Within one weight layer the residues split the layer almost evenly.
m, k = 12, 5
profile = count_by_residue(m, k)
print(f"\nweight-{k} layer of length {m}: {profile.total} vectors")
print("counts by residue:", profile.counts)
print("largest classes first:", profile.order[:5])

# Dropping a single 1 from s changes the residue by the dropped position,
# so no two of the vectors s covers share a residue class.
s = BitVector.from_str("111010010000")
for a, covered in sorted(covered_by_residue(s).items()):
    print(f"  residue {a:2d}: {covered[0]}")
report = check_unique_neighborhoods(m)
print(f"\nno vector of length {m} covers two members of one class: {report['ok']}")

# Members of the same class are therefore far apart: they never differ in just two places.
code = VtParams(8, 3)
members = [v for v in (BitVector(8, x) for x in range(256)) if v.ones_count() == 3 and residue(v) == code.a]
print(f"{len(members)} weight-3 members of class {code.a} (length 8), e.g. {members[:4]}")
