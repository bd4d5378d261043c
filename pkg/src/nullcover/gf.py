"""GF(p^n) with an explicit irreducible modulus, and k-th power sets.

Elements are polynomial-basis coefficient vectors (c_0,...,c_{n-1}) over Z_p,
equivalently the integer code c_0 + c_1 p + ... + c_{n-1} p^{n-1}.  The
modulus is the lexicographically smallest monic irreducible of degree n:
candidates are scanned in increasing code order of their lower coefficients,
so e.g. GF(16) gets x^4 + x + 1 and every prime field gets modulus x.

Scalar arithmetic lives on `FieldElement`; the bulk numpy routines
(`bulk_mul`, `bulk_pow`, `kth_power_codes`) act on whole coefficient arrays
at once, which is what makes the q <= 2^16 bias sweeps cheap.  Construction
of power sets is discrete-log free: plain exponentiation of every element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

DEFAULT_FIELD_CAP = 1 << 24


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors by trial division (fine for n <= 2^24)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense polynomial arithmetic over Z_p, low coefficient first


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymulmod(a, b, f, p):
    """a*b mod (f, p); f monic."""
    n = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce by monic f
    for deg in range(len(prod) - 1, n - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for i in range(n):
                prod[deg - n + i] = (prod[deg - n + i] - c * f[i]) % p
    return _trim(prod[:max(len(prod), 0)])


def _polypowmod(base, e, f, p):
    result = [1]
    b = list(base)
    while e:
        if e & 1:
            result = _polymulmod(result, b, f, p)
        b = _polymulmod(b, b, f, p)
        e >>= 1
    return result


def _polysub(a, b, p):
    m = max(len(a), len(b))
    a = list(a) + [0] * (m - len(a))
    b = list(b) + [0] * (m - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _polygcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        r = list(a)
        inv_lead = pow(b[-1], p - 2, p)
        while len(r) >= len(b):
            c = (r[-1] * inv_lead) % p
            off = len(r) - len(b)
            for i, bc in enumerate(b):
                r[off + i] = (r[off + i] - c * bc) % p
            _trim(r)
        a, b = b, r
    return a


def is_irreducible(coeffs: list[int], p: int) -> bool:
    """Monic polynomial irreducibility over Z_p (x^{p^n} = x test + gcd steps)."""
    f = list(coeffs)
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        raise FieldError("modulus must be monic of degree >= 1")
    if n == 1:
        return True
    if f[0] == 0:  # divisible by x
        return False
    x = [0, 1]
    # x^{p^{n/r}} - x must be coprime with f for every prime r | n
    for r in prime_factors(n):
        h = _polypowmod(x, p ** (n // r), f, p)
        g = _polygcd(f, _polysub(h, x, p), p)
        if len(g) != 1:
            return False
    # and x^{p^n} = x mod f
    h = _polypowmod(x, p**n, f, p)
    return h == x


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^n) with explicit monic irreducible modulus (coefficients c_0..c_n)."""

    p: int
    n: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.n

    def to_json_dict(self) -> dict:
        return {"p": self.p, "n": self.n, "modulus": list(self.modulus)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "FieldSpec":
        spec = cls(int(data["p"]), int(data["n"]), tuple(int(c) for c in data["modulus"]))
        if not is_irreducible(list(spec.modulus), spec.p):
            raise FieldError("modulus is not irreducible")
        return spec

    def element(self, coeffs) -> "FieldElement":
        return FieldElement(self, tuple(int(c) % self.p for c in coeffs))

    def from_code(self, code: int) -> "FieldElement":
        coeffs = []
        for _ in range(self.n):
            coeffs.append(code % self.p)
            code //= self.p
        return FieldElement(self, tuple(coeffs))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, (0,) * self.n)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, (1,) + (0,) * (self.n - 1))


def make_field(p: int, n: int, cap: int = DEFAULT_FIELD_CAP) -> FieldSpec:
    """Field with the lex-smallest monic irreducible modulus of degree n."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if n < 1:
        raise FieldError("degree must be >= 1")
    if p**n > cap:
        raise FieldError(f"q = {p}**{n} exceeds cap {cap}")
    for code in range(p**n):
        coeffs = []
        c = code
        for _ in range(n):
            coeffs.append(c % p)
            c //= p
        candidate = coeffs + [1]
        if is_irreducible(candidate, p):
            return FieldSpec(p, n, tuple(candidate))
    raise FieldError("no irreducible polynomial found")  # unreachable


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.spec.n:
            raise FieldError("coefficient vector has wrong length")
        if any(not (0 <= c < self.spec.p) for c in self.coeffs):
            raise FieldError("coefficients not reduced mod p")

    @property
    def code(self) -> int:
        c = 0
        for digit in reversed(self.coeffs):
            c = c * self.spec.p + digit
        return c

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "FieldElement") -> "FieldElement":
        p = self.spec.p
        return FieldElement(self.spec, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        p = self.spec.p
        return FieldElement(self.spec, tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "FieldElement":
        p = self.spec.p
        return FieldElement(self.spec, tuple((-a) % p for a in self.coeffs))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        p = self.spec.p
        prod = _polymulmod(list(self.coeffs), list(other.coeffs), list(self.spec.modulus), p)
        prod = prod + [0] * (self.spec.n - len(prod))
        return FieldElement(self.spec, tuple(prod))

    def __pow__(self, e: int) -> "FieldElement":
        if e < 0:
            return self.inverse() ** (-e)
        p = self.spec.p
        r = _polypowmod(list(self.coeffs), e, list(self.spec.modulus), p)
        r = r + [0] * (self.spec.n - len(r))
        return FieldElement(self.spec, tuple(r))

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise FieldError("zero has no inverse")
        return self ** (self.spec.q - 2)

    def __str__(self):
        return str(self.coeffs)


def to_coordinates(x: FieldElement) -> tuple[int, ...]:
    """Additive-group isomorphism GF(p^n) -> (Z_p)^n via polynomial basis."""
    return x.coeffs


# ---------------------------------------------------------------------------
# bulk numpy arithmetic on arrays of coefficient vectors


def all_coords(spec: FieldSpec) -> np.ndarray:
    """(q, n) int64 array of all coefficient vectors in code order."""
    q, n, p = spec.q, spec.n, spec.p
    codes = np.arange(q, dtype=np.int64)
    out = np.empty((q, n), dtype=np.int64)
    for i in range(n):
        out[:, i] = codes % p
        codes //= p
    return out


def _reduction_matrix(spec: FieldSpec) -> np.ndarray:
    """Row j = coefficients of x^{n+j} mod modulus, j = 0..n-2."""
    n, p = spec.n, spec.p
    f = list(spec.modulus)
    rows = []
    cur = [(-c) % p for c in f[:n]]  # x^n mod f
    rows.append(list(cur))
    for _ in range(n - 2):
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(n):
                cur[i] = (cur[i] - top * f[i]) % p
        rows.append(list(cur))
    if n == 1:
        return np.zeros((0, 1), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def bulk_mul(spec: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rowwise field product of two (N, n) coefficient arrays."""
    n, p = spec.n, spec.p
    N = a.shape[0]
    prod = np.zeros((N, 2 * n - 1), dtype=np.int64)
    for i in range(n):
        ai = a[:, i]
        for j in range(n):
            prod[:, i + j] += ai * b[:, j]
    prod %= p
    if n == 1:
        return prod % p
    red = _reduction_matrix(spec)
    out = (prod[:, :n] + prod[:, n:] @ red) % p
    return out


def bulk_pow(spec: FieldSpec, a: np.ndarray, e: int) -> np.ndarray:
    """Rowwise e-th powers of an (N, n) coefficient array."""
    N = a.shape[0]
    result = np.zeros((N, spec.n), dtype=np.int64)
    result[:, 0] = 1
    base = a.astype(np.int64) % spec.p
    while e:
        if e & 1:
            result = bulk_mul(spec, result, base)
        base = bulk_mul(spec, base, base)
        e >>= 1
    return result


def coords_to_codes(spec: FieldSpec, coords: np.ndarray) -> np.ndarray:
    weights = spec.p ** np.arange(spec.n, dtype=np.int64)
    return coords @ weights


def kth_power_codes(spec: FieldSpec, k: int, include_zero: bool = False) -> np.ndarray:
    """Sorted unique codes of {x^k : x in F_q^*} (optionally with 0)."""
    if k < 1 or (spec.q - 1) % k != 0:
        raise FieldError(f"k = {k} does not divide q - 1 = {spec.q - 1}")
    coords = all_coords(spec)[1:]  # skip zero
    powers = bulk_pow(spec, coords, k)
    codes = np.unique(coords_to_codes(spec, powers))
    if include_zero:
        codes = np.concatenate(([0], codes))
    return codes


def kth_power_set(spec: FieldSpec, k: int, include_zero: bool = False) -> list[FieldElement]:
    """B* = {x^k : x in F_q^*} as elements sorted by code; |B*| = (q-1)/k."""
    codes = kth_power_codes(spec, k, include_zero)
    out = [spec.from_code(int(c)) for c in codes]
    expected = (spec.q - 1) // k + (1 if include_zero else 0)
    if len(out) != expected:
        raise FieldError(f"power set size {len(out)} != expected {expected}")
    return out


def coordinate_subset(spec: FieldSpec, codes: Iterable[int]):
    """Coordinate image of field elements as a GroupSubset of (Z_p)^n.

    Group coordinates are the polynomial coefficients (c_0,...,c_{n-1}),
    indexed lexicographically with c_0 most significant.
    """
    from nullcover.groups import FiniteAbelianGroup, GroupSubset

    group = FiniteAbelianGroup((spec.p,) * spec.n)
    codes = np.asarray(list(codes), dtype=np.int64)
    mask = np.zeros(spec.q, dtype=bool)
    # field code is little-endian in p; group index is big-endian in p
    idx = np.zeros(codes.shape, dtype=np.int64)
    c = codes.copy()
    for _ in range(spec.n):
        idx = idx * spec.p + (c % spec.p)
        c //= spec.p
    mask[idx] = True
    return GroupSubset(group, mask)


def find_generator(spec: FieldSpec) -> FieldElement:
    """Smallest-code generator of the multiplicative group."""
    q = spec.q
    factors = prime_factors(q - 1)
    for code in range(1, q):
        g = spec.from_code(code)
        if all((g ** ((q - 1) // r)) != spec.one for r in factors):
            return g
    raise FieldError("no generator found")  # unreachable for a field
