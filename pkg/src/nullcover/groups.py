"""Discrete Fourier analysis on finite abelian groups Z_{m1} x ... x Z_{mr}.

Conventions (fixed once, used everywhere):

* Elements are coordinate tuples (x_1,...,x_r) with 0 <= x_j < m_j, indexed
  lexicographically; a flat numpy array of length |G| in C order over the
  shape (m_1,...,m_r) realizes exactly that order.
* Forward transform carries the 1/|G| factor:
      fhat(xi) = |G|^{-1} sum_x f(x) exp(-2 pi i xi.x),   xi.x = sum x_j xi_j / m_j.
  The inverse is the bare conjugate character sum (no extra factor), so
  Plancherel reads |G| * ||fhat||_2^2 = ||f||_2^2.
* Convolution is normalized the same way: (f*g)(x) = |G|^{-1} sum_y f(y) g(x-y),
  hence dft(f*g) = dft(f) * dft(g) pointwise.
* For elementary abelian 2-groups (all moduli 2) every computation is done in
  exact integer arithmetic via the Walsh-Hadamard transform; bias values on
  that path are exact `Fraction`s.  The general path is float with error well
  below 1e-9 * |G| at desk sizes.

Sumsets are always recomputed in exact integer/boolean arithmetic; the
floating convolution support is only a cross-check (threshold |v| < 1e-6/|G|).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

SUPPORT_EPS_FACTOR = 1e-6  # zero threshold for float convolution support: |v| < 1e-6 / |G|


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z_{m1} x ... x Z_{mr} with lexicographic element indexing."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        if len(self.moduli) == 0:
            raise GroupError("group needs at least one cyclic factor")
        if any(int(m) < 1 for m in self.moduli):
            raise GroupError(f"moduli must be >= 1, got {self.moduli}")
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))

    @property
    def order(self) -> int:
        n = 1
        for m in self.moduli:
            n *= m
        return n

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def is_elementary_2(self) -> bool:
        return all(m == 2 for m in self.moduli)

    def elements(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(m) for m in self.moduli))

    def index(self, element: Sequence[int]) -> int:
        idx = 0
        for x, m in zip(element, self.moduli):
            idx = idx * m + (x % m)
        return idx

    def element(self, index: int) -> tuple[int, ...]:
        out = []
        for m in reversed(self.moduli):
            out.append(index % m)
            index //= m
        return tuple(reversed(out))

    def __str__(self):
        return " x ".join(f"Z{m}" for m in self.moduli)


class GroupFunction:
    """Complex-valued function on a finite abelian group (flat value array)."""

    def __init__(self, group: FiniteAbelianGroup, values):
        values = np.asarray(values, dtype=complex).reshape(-1)
        if values.size != group.order:
            raise GroupError(f"expected {group.order} values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise GroupError("values must be finite")
        self.group = group
        self.values = values

    @classmethod
    def indicator(cls, subset: "GroupSubset") -> "GroupFunction":
        return cls(subset.group, subset.mask.astype(float))

    def __eq__(self, other):
        return (
            isinstance(other, GroupFunction)
            and self.group == other.group
            and np.array_equal(self.values, other.values)
        )

    def allclose(self, other: "GroupFunction", tol: float = 1e-9) -> bool:
        return self.group == other.group and np.allclose(self.values, other.values, atol=tol)


class GroupSubset:
    """Subset of a finite abelian group stored as a boolean mask."""

    def __init__(self, group: FiniteAbelianGroup, mask):
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        if mask.size != group.order:
            raise GroupError(f"expected {group.order} mask entries, got {mask.size}")
        self.group = group
        self.mask = mask

    @classmethod
    def from_members(cls, group: FiniteAbelianGroup, members: Iterable[Sequence[int]]) -> "GroupSubset":
        mask = np.zeros(group.order, dtype=bool)
        for mem in members:
            mask[group.index(mem)] = True
        return cls(group, mask)

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    def members(self) -> list[tuple[int, ...]]:
        """Members as coordinate tuples in lexicographic order."""
        return [self.group.element(int(i)) for i in np.flatnonzero(self.mask)]

    def to_json_dict(self) -> dict:
        return {"moduli": list(self.group.moduli), "members": [list(m) for m in self.members()]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "GroupSubset":
        group = FiniteAbelianGroup(tuple(data["moduli"]))
        return cls.from_members(group, data["members"])

    def __contains__(self, element) -> bool:
        return bool(self.mask[self.group.index(element)])

    def __eq__(self, other):
        return (
            isinstance(other, GroupSubset)
            and self.group == other.group
            and np.array_equal(self.mask, other.mask)
        )


def _check_same_group(a, b):
    if a.group != b.group:
        raise GroupError(f"group mismatch: {a.group} vs {b.group}")


def wht_int(values: np.ndarray, moduli: tuple[int, ...]) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform over (Z_2)^r, exact in int64.

    Input length 2^r; output W(xi) = sum_x f(x) (-1)^(x.xi).
    """
    if any(m != 2 for m in moduli):
        raise GroupError("wht_int requires all moduli equal to 2")
    a = np.asarray(values, dtype=np.int64).reshape((2,) * len(moduli))
    for ax in range(a.ndim):
        lo = a.take(0, axis=ax)
        hi = a.take(1, axis=ax)
        a = np.stack((lo + hi, lo - hi), axis=ax)
    return a.reshape(-1)


def dft(f: GroupFunction) -> GroupFunction:
    """Forward transform with the 1/|G| normalization.

    On elementary abelian 2-groups with integer-valued input, the result comes
    from the exact integer Walsh-Hadamard transform (int / 2^r is exact in
    float64), so the output is bit-reproducible.
    """
    g = f.group
    if g.order == 0:
        raise GroupError("invalid group of order 0")
    shape = g.moduli
    if g.is_elementary_2 and np.all(f.values.imag == 0):
        re = f.values.real
        ints = np.rint(re)
        if np.array_equal(ints, re):
            w = wht_int(ints.astype(np.int64), shape)
            return GroupFunction(g, w.astype(complex) / g.order)
    out = np.fft.fftn(f.values.reshape(shape)).reshape(-1) / g.order
    return GroupFunction(g, out)


def idft(fhat: GroupFunction) -> GroupFunction:
    """Inverse transform: bare conjugate character sum, no normalization factor."""
    g = fhat.group
    out = np.fft.ifftn(fhat.values.reshape(g.moduli)).reshape(-1) * g.order
    return GroupFunction(g, out)


def convolve(f: GroupFunction, g: GroupFunction) -> GroupFunction:
    """(f*g)(x) = |G|^{-1} sum_y f(y) g(x-y); exact integer path on 2-groups."""
    _check_same_group(f, g)
    G = f.group
    n = G.order
    if G.is_elementary_2 and np.all(f.values.imag == 0) and np.all(g.values.imag == 0):
        fi, gi = np.rint(f.values.real), np.rint(g.values.real)
        if np.array_equal(fi, f.values.real) and np.array_equal(gi, g.values.real):
            wf = wht_int(fi.astype(np.int64), G.moduli)
            wg = wht_int(gi.astype(np.int64), G.moduli)
            circ = wht_int(wf * wg, G.moduli)  # = n * (plain circular convolution)
            # plain conv values are integers, so circ is divisible by n; n*n
            # division keeps everything exact in float64 (ints / power of two
            # only when n is 2^r, which it is here).
            return GroupFunction(G, circ.astype(complex) / (n * n))
    F = np.fft.fftn(f.values.reshape(G.moduli))
    H = np.fft.fftn(g.values.reshape(G.moduli))
    circ = np.fft.ifftn(F * H).reshape(-1)
    return GroupFunction(G, circ / n)


def linear_bias(B: GroupSubset):
    """max_{xi != 0} |1B^(xi)|: exact Fraction on 2-groups, float otherwise."""
    G = B.group
    if G.order == 1:
        raise GroupError("linear bias undefined on the trivial group (no nonzero frequency)")
    if G.is_elementary_2:
        w = wht_int(B.mask.astype(np.int64), G.moduli)
        return Fraction(int(np.abs(w[1:]).max()), G.order)
    vals = np.fft.fftn(B.mask.astype(float).reshape(G.moduli)).reshape(-1)
    return float(np.abs(vals[1:]).max() / G.order)


def sumset(A: GroupSubset, B: GroupSubset) -> GroupSubset:
    """A+B computed exactly by boolean accumulation of rolled masks."""
    _check_same_group(A, B)
    G = A.group
    small, big = (A, B) if A.size <= B.size else (B, A)
    big_nd = big.mask.reshape(G.moduli)
    out = np.zeros(G.moduli, dtype=bool)
    axes = tuple(range(G.rank))
    for idx in np.argwhere(small.mask.reshape(G.moduli)):
        out |= np.roll(big_nd, shift=tuple(idx), axis=axes)
    return GroupSubset(G, out.reshape(-1))


def sumset_via_convolution_support(A: GroupSubset, B: GroupSubset) -> GroupSubset:
    """Support of 1A * 1B above the floating zero threshold (cross-check path)."""
    _check_same_group(A, B)
    conv = convolve(GroupFunction.indicator(A), GroupFunction.indicator(B))
    thresh = SUPPORT_EPS_FACTOR / A.group.order
    return GroupSubset(A.group, np.abs(conv.values) >= thresh)


@dataclass
class SumsetCoverReport:
    """Certificate for the bias-to-sumset inequality on one pair (A, B)."""

    group_moduli: tuple[int, ...]
    size_a: int
    size_b: int
    sumset_size: int
    ratio: Fraction
    bias: object  # Fraction (exact path) or float
    bound: object  # 1 + bias^2 |G|^3 / (|A| |B|^2), same type as bias arithmetic
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "schema": "nullcover/1",
            "kind": "sumset_cover_report",
            "moduli": list(self.group_moduli),
            "size_a": self.size_a,
            "size_b": self.size_b,
            "sumset_size": self.sumset_size,
            "ratio": float(self.ratio),
            "bias": float(self.bias),
            "bound": float(self.bound),
            "bias_exact": isinstance(self.bias, Fraction),
            "passed": self.passed,
        }


def sumset_cover_report(A: GroupSubset, B: GroupSubset) -> SumsetCoverReport:
    """Exact sumset size vs. the bound 1 + ||B||_u^2 |G|^3 / (|A| |B|^2).

    The sumset is computed twice (integer masks and convolution support) and
    the two must agree; the integer path is authoritative.
    """
    _check_same_group(A, B)
    if A.size == 0 or B.size == 0:
        raise GroupError("bias-to-sumset bound undefined for empty A or B")
    G = A.group
    S = sumset(A, B)
    S2 = sumset_via_convolution_support(A, B)
    if S != S2:
        raise GroupError("sumset support mismatch between exact and convolution paths")
    bias = linear_bias(B)
    n = G.order
    ratio = Fraction(n, S.size)
    if isinstance(bias, Fraction):
        bound = 1 + bias**2 * n**3 / Fraction(A.size * B.size**2)
        passed = ratio <= bound
    else:
        bound = 1.0 + bias**2 * n**3 / (A.size * B.size**2)
        passed = float(ratio) <= bound * (1 + 1e-12) + 1e-12
    return SumsetCoverReport(
        group_moduli=G.moduli,
        size_a=A.size,
        size_b=B.size,
        sumset_size=S.size,
        ratio=ratio,
        bias=bias,
        bound=bound,
        passed=passed,
    )
