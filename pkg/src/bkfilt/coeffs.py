"""Finite fields GF(p^m), the residue subfield k = GF(p^f), and k (x) F as a product of copies of F.

Field elements are encoded as integers ``0 <= a < p**m`` whose base-p digits are the
coefficients of a polynomial in the generator ``x`` modulo a fixed primitive polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Lexicographically first primitive polynomials, coefficients low -> high, monic.
PRIMITIVE_POLYNOMIALS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 0, 1, 1),
    (2, 4): (1, 0, 0, 1, 1),
    (2, 5): (1, 0, 0, 1, 0, 1),
    (2, 6): (1, 0, 0, 0, 0, 1, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 1, 1),
    (3, 3): (1, 0, 2, 1),
    (3, 4): (2, 0, 0, 1, 1),
    (3, 5): (1, 0, 0, 0, 2, 1),
    (3, 6): (2, 0, 0, 0, 0, 1, 1),
    (5, 1): (2, 1),
    (5, 2): (2, 1, 1),
    (5, 3): (2, 0, 1, 1),
    (5, 4): (2, 0, 2, 1, 1),
    (5, 5): (2, 0, 0, 0, 3, 1),
    (5, 6): (2, 0, 0, 0, 0, 1, 1),
    (7, 1): (2, 1),
    (7, 2): (3, 1, 1),
    (7, 3): (2, 1, 1, 1),
    (7, 4): (3, 0, 1, 1, 1),
    (7, 5): (2, 0, 0, 0, 2, 1),
    (7, 6): (3, 0, 0, 0, 1, 1, 1),
}

_TABLE_LIMIT = 729


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class GF:
    """The field with p**m elements.

    Scalar methods work on Python ints; the ``v*`` methods work elementwise on
    integer numpy arrays.
    """

    def __init__(self, p: int, m: int):
        if (p, m) not in PRIMITIVE_POLYNOMIALS:
            raise ValueError(f"no built-in modulus for p={p}, m={m}")
        self.p, self.m = p, m
        self.q = p**m
        self.modulus = PRIMITIVE_POLYNOMIALS[(p, m)]
        self._build()

    def _build(self) -> None:
        p, m, q = self.p, self.m, self.q
        self.pw = np.array([p**i for i in range(m)], dtype=np.int64)
        exp = np.zeros(2 * q, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        # x is a generator because the modulus is primitive
        cur = [1] + [0] * (m - 1)
        low = [(-c) % p for c in self.modulus[:m]]
        for n in range(q - 1):
            code = sum(c * p**i for i, c in enumerate(cur))
            exp[n] = code
            log[code] = n
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [(a + top * b) % p for a, b in zip(cur, low)]
        exp[q - 1: 2 * (q - 1)] = exp[: q - 1]
        self.exp, self.log = exp, log
        d = (np.arange(q)[:, None] // self.pw[None, :]) % p
        self.digits = d
        self.negt = (((-d) % p) * self.pw).sum(axis=1)
        self.tables = q <= _TABLE_LIMIT
        if self.tables:
            a = np.arange(q)
            self.addt = self._vadd_digits(a[:, None], a[None, :])
            self.mult = self._vmul_log(a[:, None], a[None, :])

    # scalar ops
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return int(self.vadd(np.int64(a), np.int64(b)))

    def neg(self, a: int) -> int:
        return int(self.negt[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF")
        return int(self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)])

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            return 0
        return int(self.exp[(self.log[a] * n) % (self.q - 1)])

    def frob(self, a: int) -> int:
        return self.pow(a, self.p)

    def from_int(self, n: int) -> int:
        return int(n) % self.p

    # vector ops
    def _vadd_digits(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for i in range(self.m):
            w = int(self.pw[i])
            out += ((a // w + b // w) % self.p) * w
        return out

    def _vmul_log(self, a, b):
        a, b = np.broadcast_arrays(a, b)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vadd(self, a, b):
        if self.tables:
            return self.addt[a, b]
        return self._vadd_digits(a, b)

    def vneg(self, a):
        return self.negt[a]

    def vsub(self, a, b):
        return self.vadd(a, self.negt[b])

    def vmul(self, a, b):
        if self.tables:
            return self.mult[a, b]
        return self._vmul_log(np.asarray(a), np.asarray(b))

    def vfrob(self, a, times: int = 1):
        a = np.asarray(a)
        n = pow(self.p, times, self.q - 1) if self.q > 2 else 1
        out = self.exp[(self.log[a] * n) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    # text encoding: coefficient vector over the prime field
    def to_str(self, a: int) -> str:
        return ",".join(str(int(c)) for c in self.digits[a])

    def from_str(self, s: str) -> int:
        parts = [int(t) for t in str(s).split(",") if t.strip() != ""]
        if len(parts) > self.m:
            raise ValueError(f"field element {s!r} has too many coordinates")
        return sum((c % self.p) * self.p**i for i, c in enumerate(parts))

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self) -> int:
        return hash((self.p, self.m))

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.m})"


@lru_cache(maxsize=None)
def field(p: int, m: int) -> GF:
    return GF(p, m)


@dataclass(frozen=True)
class CoefficientRing:
    """Context (p, f, m, e): F = GF(p^m), k = GF(p^f) inside F, ramification e."""

    p: int
    f: int
    m: int
    e: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.f < 1 or self.m < 1 or self.e < 1:
            raise ValueError("f, m, e must be positive")
        if self.m % self.f:
            raise ValueError(f"f={self.f} does not divide m={self.m}")

    @property
    def F(self) -> GF:
        return field(self.p, self.m)

    @property
    def N(self) -> int:
        """The exponent e + p - 1 killing every cokernel of Frobenius."""
        return self.e + self.p - 1

    def with_e(self, e: int) -> "CoefficientRing":
        return CoefficientRing(self.p, self.f, self.m, e)

    def zero(self) -> "ProductElement":
        return ProductElement(self, (0,) * self.f)

    def one(self) -> "ProductElement":
        return ProductElement(self, (1,) * self.f)

    def in_k(self, a: int) -> bool:
        F = self.F
        return F.pow(a, self.p**self.f) == a if a else True

    def to_json(self) -> dict:
        return {"p": self.p, "f": self.f, "m": self.m, "e": self.e}

    @classmethod
    def from_json(cls, d: dict) -> "CoefficientRing":
        return cls(int(d["p"]), int(d["f"]), int(d["m"]), int(d.get("e", 1)))


@dataclass(frozen=True)
class ProductElement:
    """An element (x_1, ..., x_f) of k (x) F = F x ... x F."""

    ring: CoefficientRing
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.ring.f:
            raise ValueError("wrong number of components")

    def _zip(self, other, op):
        if other.ring != self.ring:
            raise ValueError("ring mismatch")
        return ProductElement(self.ring, tuple(op(a, b) for a, b in zip(self.components, other.components)))

    def __add__(self, other):
        return self._zip(other, self.ring.F.add)

    def __sub__(self, other):
        return self._zip(other, self.ring.F.sub)

    def __mul__(self, other):
        return self._zip(other, self.ring.F.mul)

    def __neg__(self):
        return ProductElement(self.ring, tuple(self.ring.F.neg(a) for a in self.components))

    def is_zero(self) -> bool:
        return not any(self.components)

    def scale(self, c: int) -> "ProductElement":
        return ProductElement(self.ring, tuple(self.ring.F.mul(c, a) for a in self.components))


def frobenius_shift(x: ProductElement) -> ProductElement:
    """(x_1, ..., x_f) -> (x_2, ..., x_f, x_1)."""
    c = x.components
    return ProductElement(x.ring, tuple(c[1:]) + (c[0],))


def embed_k(ring: CoefficientRing, a: int) -> ProductElement:
    """Image of a in k under a (x) 1, i.e. the orbit (a, a^p, ..., a^(p^(f-1)))."""
    F = ring.F
    if not ring.in_k(a):
        raise ValueError(f"{F.to_str(a)} is not fixed by the p^{ring.f}-power map")
    comps = []
    cur = a
    for _ in range(ring.f):
        comps.append(cur)
        cur = F.frob(cur)
    return ProductElement(ring, tuple(comps))


def k_elements(ring: CoefficientRing) -> list[int]:
    return [a for a in range(ring.F.q) if ring.in_k(a)]
