"""Cylinder intervals and a Cantor cover of the golden-mean subshift.

Run: python demos/02_cylinders_and_covers.py
"""
from gmpy2 import mpq

from betashift import Beta, SftSpec, build_cover, distance_to_cover
from betashift.beta_core import cylinder_interval, root_cylinder, shift_constant

phi = Beta.golden_ratio()
print("golden-base cylinders of generation 4:")
layer = [root_cylinder(phi)]
for _ in range(4):
    layer = [ch for c in layer for ch in c.children()]
for c in layer:
    tag = "full" if c.is_full else "    "
    print(f"  {''.join(map(str, c.word))}  {tag}  [{float(c.left_exact):.5f}, {float(c.right_exact):.5f})")
print("lower length constant C(golden) =", float(shift_constant(phi)))

b = Beta("1.9")
sft = SftSpec(1, [(1, 1)])
for g in (4, 8, 12):
    cover = build_cover(sft, b, g)
    print(f"\ngeneration {g}: {len(cover)} intervals, total length {float(cover.total_length().hi):.5f}")

cover = build_cover(sft, b, 10)
x = cylinder_interval((1, 1), b).left_exact
print("point starting with 11:", float(x), "distance to the cover >=", float(distance_to_cover(x, cover).lo))
print("distance of 1/3:", float(distance_to_cover(mpq(1, 3), cover).lo))
