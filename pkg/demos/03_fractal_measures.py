#!/usr/bin/env python3
"""Dyadic Cantor models: counting, gauge content, largeness, log dimension.

Two contrasting test sets: the middle-thirds set (positive box dimension,
so infinite logarithmic dimension) and a sparse set keeping 2^k cells at
scales 2^-2^k (zero box dimension, logarithmic dimension 1).
"""

from fractions import Fraction

from nullcover import (
    GaugeFunction,
    covering_number,
    generate_cantor,
    hausdorff_content_dyadic,
    hausdorff_distance,
    log_dimension_estimate,
    packing_number_greedy,
    uniform_large_subset,
)

# --- generators and counting -------------------------------------------------

thirds = generate_cantor({"kind": "digits", "base": 3, "digits": [0, 2]}, depth=6)
print(f"middle thirds, depth 6: {thirds.size} raster cells at 2^-{thirds.k}")
print(f"covering number at 1/9 (exact, base-3 grid): {covering_number(thirds, Fraction(1, 9))}")

sparse = generate_cantor(
    {"kind": "sparse", "schedule": [(2**k, 2**k) for k in range(1, 5)], "d": 1}, depth=4
)
print(f"sparse set: {sparse.size} cells at 2^-{sparse.k} "
      f"(2^k cells at scale 2^-2^k)")

pts = [(Fraction(0),), (Fraction(1, 4),), (Fraction(1, 2),), (Fraction(3, 4),), (Fraction(1),)]
print(f"greedy packing of 5 points at delta=1/4: {packing_number_greedy(pts, Fraction(1, 4))}")

# --- gauge content on the cube tree -------------------------------------------

phi = GaugeFunction.power(0.7)
for delta in (Fraction(1), Fraction(1, 8), Fraction(1, 64)):
    c = hausdorff_content_dyadic(thirds, phi, delta)
    print(f"content of middle thirds against x^0.7 with covers below {delta}: {c:.4f}")

print(f"Hausdorff distance {{0,1}} vs {{1/2}}: "
      f"{hausdorff_distance([(0,), (1,)], [(Fraction(1, 2),)])}")

# --- uniform largeness certificate --------------------------------------------

deep = generate_cantor({"kind": "digits", "base": 3, "digits": [0, 2]}, depth=8)
sched = [Fraction(1, 1 << g) for g in (1, 7, 13)]
pruned, n_values, cert = uniform_large_subset(deep, phi, eta=0.3, delta_schedule=sched)
print(f"\nlargeness pruning kept {pruned.size}/{deep.size} cells; certificate passed: {cert.passed}")
for lvl, dk, nk in cert.schedule:
    counts = [c for _, c in cert.per_cube_counts[lvl]]
    print(f"  level {lvl}: need N_k = {nk:.2f} cells at {dk}, worst cube has {min(counts)}")

# --- logarithmic dimension -----------------------------------------------------

for name, cube in (("middle thirds", thirds), ("sparse", sparse)):
    est = log_dimension_estimate(cube)
    value = "infinite" if est["infinite"] else f"{est['value']:.2f}"
    print(f"log-dimension estimate for {name}: {value} (scales {est['scales']})")
