"""Dyadic-resolution fractal models: covering/packing counts, gauge content,
largeness certificates, and a logarithmic-dimension estimator.

A `DyadicCubeSet` is the level-k rasterization of a compact set in [0,1]^d:
the integer cells of side 2^-k meeting it.  Generators (digit rules, sparse
scale schedules) keep their exact rational boxes as metadata so covering
numbers against non-dyadic grids (e.g. base-3) can be counted exactly.

Grid conventions: covering numbers count aligned grid cells overlapping the
set with positive measure (not mere boundary contact); this differs from the
minimal ball-covering number only by dimensional constants, which every
downstream threshold absorbs explicitly (the certificates repeat the 5^d
constant they rely on).  The gauge content is the exact optimum over covers
by dyadic cubes, computed bottom-up on the occupied cube tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from nullcover.elementary import frac


class FractalError(ValueError):
    pass


@dataclass
class DyadicCubeSet:
    """Occupied cells of the level-k dyadic grid on [0,1]^d."""

    d: int
    k: int
    cells: np.ndarray  # (n, d) int64, deduplicated, lexicographically sorted
    generator: Optional[dict] = None

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int64).reshape(-1, self.d)
        if cells.size:
            if cells.min() < 0 or cells.max() >= (1 << self.k):
                raise FractalError("cells outside [0, 2^k)^d")
            cells = np.unique(cells, axis=0)
        self.cells = cells

    @property
    def size(self) -> int:
        return int(self.cells.shape[0])

    def cells_at_level(self, j: int) -> np.ndarray:
        """Occupied cells of D_j (j <= k): unique prefixes."""
        if j > self.k:
            raise FractalError(f"level {j} below resolution {self.k}")
        return np.unique(self.cells >> (self.k - j), axis=0)

    def exact_boxes(self) -> Optional[list]:
        if self.generator and "boxes" in self.generator:
            return [
                tuple((Fraction(lo), Fraction(hi)) for lo, hi in box)
                for box in self.generator["boxes"]
            ]
        return None

    def to_json_dict(self) -> dict:
        out = {"d": self.d, "k": self.k, "cells": self.cells.tolist()}
        if self.generator is not None:
            out["generator"] = self.generator
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "DyadicCubeSet":
        return cls(
            d=int(data["d"]), k=int(data["k"]), cells=np.array(data["cells"], dtype=np.int64),
            generator=data.get("generator"),
        )


@dataclass(frozen=True)
class GaugeFunction:
    """Gauge phi on (0, 1]: power x^alpha, log-power log^-s(1/x), or tabulated.

    Tabulated gauges are right-continuous nondecreasing step functions given
    by breakpoints [(x_i, v_i)] with phi(x) = v_i for x in [x_i, x_{i+1}).
    Log-power gauges are only defined for x <= 1/2 (phi blows up at 1);
    evaluating one on a larger scale raises, which callers surface as the
    "gauge invalid on needed scales" error.
    """

    kind: str  # "power" | "log_power" | "tabulated"
    alpha: Optional[float] = None
    s: Optional[float] = None
    table: Optional[tuple] = None

    def __post_init__(self):
        if self.kind == "power":
            if self.alpha is None or self.alpha <= 0:
                raise FractalError("power gauge needs alpha > 0")
        elif self.kind == "log_power":
            if self.s is None or self.s <= 0:
                raise FractalError("log-power gauge needs s > 0")
        elif self.kind == "tabulated":
            if not self.table:
                raise FractalError("tabulated gauge needs breakpoints")
            xs = [frac(x) for x, _ in self.table]
            vs = [float(v) for _, v in self.table]
            if any(b <= a for a, b in zip(xs, xs[1:])) or any(v2 < v1 for v1, v2 in zip(vs, vs[1:])):
                raise FractalError("tabulated gauge must be increasing")
            if min(vs) <= 0:
                raise FractalError("gauge must be positive on (0, 1]")
        else:
            raise FractalError(f"unknown gauge kind {self.kind}")

    @classmethod
    def power(cls, alpha) -> "GaugeFunction":
        return cls(kind="power", alpha=float(alpha))

    @classmethod
    def log_power(cls, s) -> "GaugeFunction":
        return cls(kind="log_power", s=float(s))

    def __call__(self, x) -> float:
        x = float(x)
        if x <= 0:
            return 0.0
        if self.kind == "power":
            return x**self.alpha
        if self.kind == "log_power":
            if x > 0.5:
                raise FractalError(f"log-power gauge undefined at scale {x} > 1/2")
            return math.log(1.0 / x) ** (-self.s)
        v = None
        for xi, vi in self.table:
            if x >= float(frac(xi)):
                v = float(vi)
            else:
                break
        if v is None:
            v = float(self.table[0][1])  # below the first breakpoint: smallest value
        return v

    def precedes(self, other: "GaugeFunction", scales: Iterable[float]) -> bool:
        """Sampled check of self < other in the gauge order: other/self -> 0."""
        ratios = [other(x) / self(x) for x in scales]
        return all(b < a for a, b in zip(ratios, ratios[1:])) and ratios[-1] < ratios[0] / 4

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha, "s": self.s, "table": self.table}


@dataclass
class LargenessProfile:
    """Named N(delta) together with the finite (N_k, delta_k) schedule."""

    name: str
    n_of_delta: object  # callable delta -> float
    schedule: list  # [(N_k, delta_k)] with delta_k strictly decreasing
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        deltas = [frac(dk) for _, dk in self.schedule]
        if any(b >= a for a, b in zip(deltas, deltas[1:])):
            raise FractalError("delta_k must decrease strictly")
        ns = [float(nk) for nk, _ in self.schedule]
        if any(b < a for a, b in zip(ns, ns[1:])):
            raise FractalError("N_k must be nondecreasing")

    def admissible(self, min_n: float):
        """Largest delta_k whose N_k reaches min_n, or None."""
        for nk, dk in self.schedule:
            if nk >= min_n:
                return frac(dk), float(nk)
        return None


# ---------------------------------------------------------------------------
# generators


def _digit_boxes(base: int, digits_per_axis: Sequence[Sequence[int]], depth: int):
    """Exact level-`depth` boxes of a base-b digit restriction."""
    d = len(digits_per_axis)
    axis_intervals = []
    for digits in digits_per_axis:
        ivs = [(Fraction(0), Fraction(1))]
        for _ in range(depth):
            nxt = []
            for lo, hi in ivs:
                w = (hi - lo) / base
                for dig in digits:
                    nxt.append((lo + dig * w, lo + (dig + 1) * w))
            ivs = nxt
        axis_intervals.append(ivs)
    boxes = [()]
    for ivs in axis_intervals:
        boxes = [b + (iv,) for b in boxes for iv in ivs]
    return boxes


def _rasterize_boxes(boxes, d: int, k: int) -> np.ndarray:
    """Dyadic level-k cells overlapping any box with positive measure."""
    w = Fraction(1, 1 << k)
    out = set()
    for box in boxes:
        ranges = []
        for lo, hi in box:
            j0 = math.floor(lo / w)
            j1 = math.ceil(hi / w) - 1  # cells j with j*w < hi and (j+1)*w > lo
            ranges.append(range(max(j0, 0), min(j1 + 1, 1 << k)))
        stack = [()]
        for r in ranges:
            stack = [s + (j,) for s in stack for j in r]
        out.update(stack)
    return np.array(sorted(out), dtype=np.int64).reshape(-1, d)


def generate_cantor(rule: dict, depth: int, max_cells: int = 1 << 22) -> DyadicCubeSet:
    """Deterministic Cantor-like test sets.

    rule = {"kind": "digits", "base": b, "digits": [per-axis digit lists]} keeps
    the base-b cells with the allowed digits for `depth` levels and rasterizes
    to the finest dyadic grid at least as fine as b^-depth.

    rule = {"kind": "sparse", "schedule": [(N_k, g_k)]} keeps N_k cells in
    total at resolution 2^-g_k, evenly strided within the kept cells of the
    previous scale (`depth` caps how many schedule entries are used).
    """
    if rule.get("kind") == "digits":
        base = int(rule["base"])
        digits = rule["digits"]
        if len(digits) == 0:
            raise FractalError("empty digit set")
        if isinstance(digits[0], int):
            digits = [digits]
        if any(len(ds) == 0 for ds in digits):
            raise FractalError("empty digit set")
        d = len(digits)
        n_boxes = 1
        for ds in digits:
            n_boxes *= len(ds) ** depth
        if n_boxes > max_cells:
            raise FractalError("depth cap exceeded")
        boxes = _digit_boxes(base, digits, depth)
        if base == 2 or (base & (base - 1)) == 0:
            k = depth * int(math.log2(base))
        else:
            k = 1
            while Fraction(1, 1 << k) > Fraction(1, base**depth):
                k += 1
        cells = _rasterize_boxes(boxes, d, k)
        gen = {
            "kind": "digits",
            "base": base,
            "digits": [list(ds) for ds in digits],
            "depth": depth,
            "boxes": [[[str(lo), str(hi)] for lo, hi in box] for box in boxes],
        }
        return DyadicCubeSet(d=d, k=k, cells=cells, generator=gen)
    if rule.get("kind") == "sparse":
        sched = rule["schedule"][:depth]
        d = int(rule.get("d", 1))
        cells = np.zeros((1, d), dtype=np.int64)
        g_prev = 0
        for n_keep, g in sched:
            n_keep, g = int(n_keep), int(g)
            if g <= g_prev:
                raise FractalError("schedule resolutions must increase")
            factor = 1 << (g - g_prev)
            # refine every kept cell, then stride-select n_keep cells in total
            sub = np.array(
                np.meshgrid(*([range(factor)] * d), indexing="ij"), dtype=np.int64
            ).reshape(d, -1).T
            all_fine = (cells[:, None, :] * factor + sub[None, :, :]).reshape(-1, d)
            total = all_fine.shape[0]
            if n_keep > total:
                raise FractalError(f"cannot keep {n_keep} of {total} cells")
            order = np.lexsort(all_fine.T[::-1])
            all_fine = all_fine[order]
            pick = (np.arange(n_keep, dtype=np.int64) * total) // n_keep
            cells = all_fine[pick]
            g_prev = g
        gen = {"kind": "sparse", "schedule": [[int(n), int(g)] for n, g in sched], "d": d}
        return DyadicCubeSet(d=d, k=g_prev, cells=cells, generator=gen)
    raise FractalError(f"unknown rule kind {rule.get('kind')}")


# ---------------------------------------------------------------------------
# counting


def covering_number(A: DyadicCubeSet, delta) -> int:
    """Number of side-delta aligned grid cells overlapping A (positive measure).

    Uses the generator's exact rational boxes when available (so base-3 grids
    are counted exactly); otherwise counts against the raster cells.
    """
    delta = frac(delta)
    if delta < Fraction(1, 1 << A.k):
        raise FractalError(f"delta {delta} below the set resolution 2^-{A.k}")
    if A.size == 0:
        return 0
    boxes = A.exact_boxes()
    if boxes is None:
        w = Fraction(1, 1 << A.k)
        boxes = [tuple((c * w, (c + 1) * w) for c in row) for row in A.cells.tolist()]
    hit = set()
    for box in boxes:
        ranges = []
        for lo, hi in box:
            # cells j with j*delta < hi and (j+1)*delta > lo
            j_start = math.floor(lo / delta)
            j_end = math.ceil(hi / delta) - 1
            ranges.append(range(j_start, j_end + 1))
        stack = [()]
        for r in ranges:
            stack = [s + (j,) for s in stack for j in r]
        hit.update(stack)
    return len(hit)


def packing_number_greedy(points, delta) -> int:
    """Greedy maximal packing count: radius-delta sup-norm balls centered in
    the point set, scanned in lexicographic order; balls must be disjoint
    (centers strictly more than 2*delta apart)."""
    pts = [tuple(frac(x) for x in p) for p in points]
    pts.sort()
    delta = frac(delta)
    accepted = []
    for p in pts:
        ok = True
        for q in accepted:
            if max(abs(a - b) for a, b in zip(p, q)) <= 2 * delta:
                ok = False
                break
        if ok:
            accepted.append(p)
    return len(accepted)


def packing_number_exhaustive(points, delta) -> int:
    """Maximum packing by brute force (oracle for small instances)."""
    pts = [tuple(frac(x) for x in p) for p in points]
    delta = frac(delta)
    n = len(pts)
    if n > 20:
        raise FractalError("exhaustive packing limited to 20 points")
    best = 0
    for mask in range(1 << n):
        sel = [pts[i] for i in range(n) if mask >> i & 1]
        ok = all(
            max(abs(a - b) for a, b in zip(p, q)) > 2 * delta
            for i, p in enumerate(sel)
            for q in sel[i + 1 :]
        )
        if ok:
            best = max(best, len(sel))
    return best


# ---------------------------------------------------------------------------
# gauge content on the cube tree


def hausdorff_content_dyadic(A: DyadicCubeSet, phi: GaugeFunction, delta) -> float:
    """Exact optimum of sum phi(side) over dyadic covers with side <= delta.

    Bottom-up on the occupied tree: cost(Q at level j) = min(phi(2^-j),
    sum of children costs), with the top-level min only over cubes of side
    <= delta; cells at the raster resolution cost phi(2^-k).
    """
    delta = frac(delta)
    if A.size == 0:
        return 0.0
    j_top = 0
    while Fraction(1, 1 << j_top) > delta:
        j_top += 1
    if j_top > A.k:
        raise FractalError(f"delta {delta} below resolution 2^-{A.k}")
    phi_at = {j: phi(Fraction(1, 1 << j)) for j in range(j_top, A.k + 1)}

    cells = A.cells
    k = A.k

    def cost(rows: np.ndarray, level: int) -> float:
        if level == k:
            return phi_at[k] * rows.shape[0] if rows.ndim == 2 else phi_at[k]
        prefix = rows >> (k - level - 1)
        # group children by prefix at level+1
        order = np.lexsort(prefix.T[::-1])
        rows = rows[order]
        prefix = prefix[order]
        change = np.any(np.diff(prefix, axis=0) != 0, axis=1)
        bounds = np.concatenate(([0], np.flatnonzero(change) + 1, [rows.shape[0]]))
        total = 0.0
        for i in range(len(bounds) - 1):
            total += cost_node(rows[bounds[i] : bounds[i + 1]], level + 1)
        return total

    def cost_node(rows: np.ndarray, level: int) -> float:
        if level == k:
            return phi_at[k]
        children = cost(rows, level)
        return min(phi_at[level], children)

    # split the whole set into its level-j_top nodes and sum their node costs
    if j_top == 0:
        # a single (virtual) root cube of side 1
        return cost_node(cells, 0)
    prefix = cells >> (k - j_top)
    order = np.lexsort(prefix.T[::-1])
    cells_sorted = cells[order]
    prefix = prefix[order]
    change = np.any(np.diff(prefix, axis=0) != 0, axis=1) if prefix.shape[0] > 1 else np.array([], bool)
    bounds = np.concatenate(([0], np.flatnonzero(change) + 1, [cells_sorted.shape[0]]))
    return float(sum(cost_node(cells_sorted[bounds[i] : bounds[i + 1]], j_top) for i in range(len(bounds) - 1)))


# ---------------------------------------------------------------------------
# Hausdorff distance (exact: point sets any d, interval unions in d = 1)


def hausdorff_distance(K1, K2):
    """Exact sup-norm Hausdorff distance between nonempty point sets, or
    between 1-d interval unions given as [(lo, hi), ...]."""
    if len(K1) == 0 or len(K2) == 0:
        raise FractalError("Hausdorff distance needs nonempty sets")
    if _is_interval_list(K1) and _is_interval_list(K2):
        return max(_directed_h_intervals(K1, K2), _directed_h_intervals(K2, K1))
    P1 = [tuple(frac(x) for x in (p if isinstance(p, (tuple, list, np.ndarray)) else (p,))) for p in K1]
    P2 = [tuple(frac(x) for x in (p if isinstance(p, (tuple, list, np.ndarray)) else (p,))) for p in K2]

    def directed(A, B):
        worst = Fraction(0)
        for a in A:
            best = None
            for b in B:
                dist = max(abs(x - y) for x, y in zip(a, b))
                if best is None or dist < best:
                    best = dist
            worst = max(worst, best)
        return worst

    return max(directed(P1, P2), directed(P2, P1))


def _is_interval_list(K) -> bool:
    try:
        return all(len(item) == 2 and not isinstance(item[0], (tuple, list)) for item in K) and getattr(
            K, "interval_semantics", False
        )
    except TypeError:
        return False


class IntervalUnion(list):
    """Marker list of (lo, hi) pairs treated as a 1-d set union."""

    interval_semantics = True


def _directed_h_intervals(U, V) -> Fraction:
    """sup over x in U of dist(x, V); candidates are endpoints of U and the
    gap midpoints of V clipped into U."""
    U = [(frac(a), frac(b)) for a, b in sorted(U)]
    V = [(frac(a), frac(b)) for a, b in sorted(V)]

    def dist_to_v(x):
        best = None
        for a, b in V:
            dd = Fraction(0) if a <= x <= b else min(abs(x - a), abs(x - b))
            if best is None or dd < best:
                best = dd
        return best

    candidates = []
    for a, b in U:
        candidates.extend([a, b])
    for (a1, b1), (a2, b2) in zip(V, V[1:]):
        mid = (b1 + a2) / 2
        for a, b in U:
            if a <= mid <= b:
                candidates.append(mid)
    # also V may end before U starts etc.; endpoints already cover that
    return max(dist_to_v(x) for x in candidates)


# ---------------------------------------------------------------------------
# uniform largeness certificates


@dataclass
class LargenessCertificate:
    eta: float
    phi: dict
    schedule: list  # [(k, delta_k, N_k)]
    per_cube_counts: dict  # level -> list of (cube tuple, count)
    pruned_levels: int
    passed: bool
    notes: str

    def to_json_dict(self) -> dict:
        return {
            "schema": "nullcover/1",
            "kind": "largeness",
            "eta": self.eta,
            "phi": self.phi,
            "schedule": [[k, str(dk), nk] for k, dk, nk in self.schedule],
            "per_cube_counts": {
                str(k): [[list(c), n] for c, n in v] for k, v in self.per_cube_counts.items()
            },
            "pruned_levels": self.pruned_levels,
            "passed": self.passed,
            "notes": self.notes,
        }


def uniform_large_subset(
    A: DyadicCubeSet, phi: GaugeFunction, eta: float, delta_schedule: Sequence
) -> tuple[DyadicCubeSet, list, LargenessCertificate]:
    """Iterative pruning: keep level-(k+1) cubes whose restricted content
    exceeds eta_{k+1} = 2^{-3(k+1)d} eta; certify |A' cap Q|_{delta_k} >= N_k
    with N_k = eta / (2^{3kd+1} phi(delta_k)) for all retained cubes.

    delta_schedule[k] is delta_k for pruning level k (index 0 = level 1's
    parent counts at level 0); entries below the raster resolution are
    rejected.  The decay hypothesis (2^{3kd+1} phi(delta_k) decreasing toward
    zero) is checked on the finite schedule.
    """
    d = A.d
    deltas = [frac(x) for x in delta_schedule]
    for dk in deltas:
        if dk < Fraction(1, 1 << A.k):
            raise FractalError(f"schedule scale {dk} below resolution 2^-{A.k}")
    hyp = [2.0 ** (3 * k * d + 1) * phi(deltas[k]) for k in range(len(deltas))]
    bad = [k for k in range(1, len(hyp)) if hyp[k] >= hyp[k - 1]]
    if bad:
        raise FractalError(f"decay hypothesis fails at schedule indices {bad}: "
                           f"2^(3kd+1) phi(delta_k) must decrease")
    total = hausdorff_content_dyadic(A, phi, Fraction(1))
    if total < eta:
        raise FractalError(f"content below eta: {total} < {eta}")
    levels = len(deltas)
    if levels > A.k:
        raise FractalError("schedule deeper than the raster resolution")
    # iterative pruning
    current = A.cells
    for lvl in range(1, levels):
        eta_l = 2.0 ** (-3 * lvl * d) * eta
        keep_rows = []
        prefixes = current >> (A.k - lvl)
        uniq = np.unique(prefixes, axis=0)
        for q in uniq:
            sel = np.all(prefixes == q, axis=1)
            sub = DyadicCubeSet(d=d, k=A.k, cells=current[sel])
            c = hausdorff_content_dyadic(sub, phi, Fraction(1, 1 << lvl))
            if c > eta_l:
                keep_rows.append(current[sel])
        if not keep_rows:
            raise FractalError(f"all level-{lvl} cubes pruned (content below eta_{lvl})")
        current = np.concatenate(keep_rows, axis=0)
    pruned = DyadicCubeSet(d=d, k=A.k, cells=current, generator=A.generator)
    # certificates
    n_values = []
    per_cube = {}
    passed = True
    for lvl in range(levels):
        dk = deltas[lvl]
        nk = eta / (2.0 ** (3 * lvl * d + 1) * phi(dk))
        n_values.append(nk)
        counts = []
        for q in np.unique(pruned.cells >> (A.k - lvl), axis=0) if lvl > 0 else [np.zeros(d, np.int64)]:
            if lvl > 0:
                sel = np.all(pruned.cells >> (A.k - lvl) == q, axis=1)
                sub_cells = pruned.cells[sel]
            else:
                sub_cells = pruned.cells
            cnt = _grid_count_cells(sub_cells, A.k, dk, d)
            counts.append((tuple(int(x) for x in q), cnt))
            if cnt < nk:
                passed = False
        per_cube[lvl] = counts
    cert = LargenessCertificate(
        eta=eta,
        phi=phi.to_json_dict(),
        schedule=[(lvl, deltas[lvl], n_values[lvl]) for lvl in range(levels)],
        per_cube_counts=per_cube,
        pruned_levels=levels,
        passed=passed,
        notes="grid covering counts; N_k = eta/(2^(3kd+1) phi(delta_k)); "
        "content restricted to dyadic covers",
    )
    return pruned, n_values, cert


def _grid_count_cells(cells: np.ndarray, k: int, delta: Fraction, d: int) -> int:
    """Count of side-delta grid cells overlapping the raster cells (positive measure)."""
    if cells.shape[0] == 0:
        return 0
    if delta.numerator == 1 and (delta.denominator & (delta.denominator - 1)) == 0:
        g = delta.denominator.bit_length() - 1
        if g <= k:
            return int(np.unique(cells >> (k - g), axis=0).shape[0])
    sub = DyadicCubeSet(d=d, k=k, cells=cells)
    return covering_number(sub, delta)


# ---------------------------------------------------------------------------
# logarithmic dimension estimate


def log_dimension_estimate(A: DyadicCubeSet, variant: str = "H") -> dict:
    """Heuristic slope estimator for the logarithmic dimension.

    Counts come from the generator schedule when present (the informative
    scales), else from every dyadic level.  If the box-count slope against
    log(1/delta) does not decay across the scale range, the ordinary
    dimension is positive and the logarithmic dimension is infinite; else
    the least-squares slope of log(count) against log log(1/delta) is
    returned.  Certificates carry the scales used.
    """
    if variant not in ("H", "P"):
        raise FractalError("variant must be 'H' or 'P'")
    scales = []
    if A.generator and A.generator.get("kind") == "sparse":
        for n, g in A.generator["schedule"]:
            scales.append(g)
    else:
        scales = list(range(1, A.k + 1))
    scales = [g for g in scales if g <= A.k]
    if len(scales) < 3:
        raise FractalError("need at least 3 usable scales")
    counts = [A.cells_at_level(g).shape[0] for g in scales]
    if max(counts) == 1:
        return {"variant": variant, "value": 0.0, "infinite": False, "scales": scales, "counts": counts}
    ln_counts = [math.log(c) for c in counts]
    ln_inv = [g * math.log(2.0) for g in scales]
    # aggregate box-count slopes over the first and second halves of the
    # scale range; a non-decaying positive slope means positive box dimension
    mid = len(scales) // 2
    slope_a = (ln_counts[mid] - ln_counts[0]) / (ln_inv[mid] - ln_inv[0])
    slope_b = (ln_counts[-1] - ln_counts[mid]) / (ln_inv[-1] - ln_inv[mid])
    box_slopes = [slope_a, slope_b]
    decaying = slope_b < 0.6 * slope_a if slope_a > 0 else True
    if not decaying and slope_b > 0.05:
        return {
            "variant": variant, "value": None, "infinite": True,
            "scales": scales, "counts": counts, "box_slopes": box_slopes,
        }
    ln_ln = [math.log(v) for v in ln_inv]
    n = len(ln_ln)
    mx = sum(ln_ln) / n
    my = sum(ln_counts) / n
    denom = sum((x - mx) ** 2 for x in ln_ln)
    slope = sum((x - mx) * (y - my) for x, y in zip(ln_ln, ln_counts)) / denom if denom else 0.0
    return {
        "variant": variant, "value": slope, "infinite": False,
        "scales": scales, "counts": counts, "box_slopes": box_slopes,
    }
