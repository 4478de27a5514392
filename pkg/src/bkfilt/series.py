"""Truncated Laurent series over k (x) F with the Frobenius u -> u^p plus component shift."""
from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .coeffs import CoefficientRing, ProductElement, frobenius_shift


class NotInImage(Exception):
    """The series is not a Frobenius image at the tracked precision."""


@dataclass(frozen=True)
class Infinity:
    """Valuation of a series that vanishes below its precision."""

    prec: int

    def __repr__(self) -> str:
        return f"Infinity(precision-limited at {self.prec})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Infinity)

    def __hash__(self) -> int:
        return hash("inf")

    def __lt__(self, other) -> bool:
        return False

    def __gt__(self, other) -> bool:
        return not isinstance(other, Infinity)

    def __le__(self, other) -> bool:
        return isinstance(other, Infinity)

    def __ge__(self, other) -> bool:
        return True


def default_precision(ring: CoefficientRing) -> int:
    return 4 * (ring.e + ring.p)


@dataclass(frozen=True)
class SeriesVector:
    """sum_n coeffs[n] u^n, exact for exponents below ``prec``."""

    ring: CoefficientRing
    low: int
    prec: int
    coeffs: dict = dfield(default_factory=dict)

    def __post_init__(self):
        if self.low > self.prec:
            raise ValueError("low must not exceed prec")
        clean = {}
        for n, c in self.coeffs.items():
            if not isinstance(c, ProductElement):
                c = ProductElement(self.ring, tuple(c))
            if not (self.low <= n < self.prec):
                if n >= self.prec:
                    continue
                raise ValueError(f"exponent {n} below low={self.low}")
            if not c.is_zero():
                clean[int(n)] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def monomial(cls, ring, c, n: int, prec: int) -> "SeriesVector":
        if not isinstance(c, ProductElement):
            c = ProductElement(ring, tuple(c))
        return cls(ring, min(n, 0), prec, {n: c})

    @classmethod
    def constant(cls, ring, c, prec: int) -> "SeriesVector":
        return cls.monomial(ring, c, 0, prec)

    def coeff(self, n: int) -> ProductElement:
        return self.coeffs.get(n, self.ring.zero())

    def __add__(self, other: "SeriesVector") -> "SeriesVector":
        prec = min(self.prec, other.prec)
        low = min(self.low, other.low)
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out[n] + c if n in out else c
        return SeriesVector(self.ring, low, prec, {n: c for n, c in out.items() if n < prec})

    def __neg__(self) -> "SeriesVector":
        return SeriesVector(self.ring, self.low, self.prec, {n: -c for n, c in self.coeffs.items()})

    def __sub__(self, other: "SeriesVector") -> "SeriesVector":
        return self + (-other)

    def _val_int(self) -> int:
        v = self.valuation()
        return self.prec if isinstance(v, Infinity) else v

    def __mul__(self, other: "SeriesVector") -> "SeriesVector":
        prec = min(self.prec + other._val_int(), other.prec + self._val_int())
        out: dict = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                n = a + b
                if n >= prec:
                    continue
                t = x * y
                out[n] = out[n] + t if n in out else t
        low = min(self.low + other.low, prec)
        return SeriesVector(self.ring, low, prec, out)

    def valuation(self):
        if not self.coeffs:
            return Infinity(self.prec)
        return min(self.coeffs)

    def component_valuations(self) -> list:
        vals = []
        for i in range(self.ring.f):
            ns = [n for n, c in self.coeffs.items() if c.components[i]]
            vals.append(min(ns) if ns else Infinity(self.prec))
        return vals

    def truncate(self, prec: int) -> "SeriesVector":
        return SeriesVector(self.ring, min(self.low, prec), min(prec, self.prec), self.coeffs)

    def to_json(self) -> dict:
        F = self.ring.F
        return {
            "low": self.low,
            "prec": self.prec,
            "coeffs": [[n, [F.to_str(a) for a in self.coeffs[n].components]] for n in sorted(self.coeffs)],
        }

    @classmethod
    def from_json(cls, ring: CoefficientRing, d: dict) -> "SeriesVector":
        F = ring.F
        coeffs = {int(n): ProductElement(ring, tuple(F.from_str(s) for s in cs)) for n, cs in d["coeffs"]}
        return cls(ring, int(d["low"]), int(d["prec"]), coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesVector):
            return NotImplemented
        prec = min(self.prec, other.prec)
        a = {n: c for n, c in self.coeffs.items() if n < prec}
        b = {n: c for n, c in other.coeffs.items() if n < prec}
        return a == b

    def __hash__(self) -> int:
        return hash(tuple(sorted((n, c.components) for n, c in self.coeffs.items())))


def phi(s: SeriesVector) -> SeriesVector:
    """u -> u^p on exponents, frobenius_shift on coefficients."""
    p = s.ring.p
    return SeriesVector(
        s.ring,
        p * s.low if s.low < 0 else s.low,
        p * s.prec,
        {p * n: frobenius_shift(c) for n, c in s.coeffs.items()},
    )


def _unshift(c: ProductElement) -> ProductElement:
    t = c.components
    return ProductElement(c.ring, (t[-1],) + tuple(t[:-1]))


def phi_inverse(s: SeriesVector) -> SeriesVector:
    p = s.ring.p
    bad = [n for n in s.coeffs if n % p]
    if bad:
        raise NotInImage(f"exponent {min(bad)} is not divisible by {p}")
    prec = s.prec // p
    low = -((-s.low) // p) if s.low < 0 else min(s.low, prec)
    low = min(low, prec)
    coeffs = {n // p: _unshift(c) for n, c in s.coeffs.items() if n // p < prec}
    return SeriesVector(s.ring, low, prec, coeffs)


def valuation(s: SeriesVector):
    """(per-component valuations, global valuation)."""
    return s.component_valuations(), s.valuation()


@dataclass(frozen=True)
class LaurentMatrix:
    """A rows x cols matrix of series sharing one ring."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        ents = tuple(tuple(r) for r in self.entries)
        if len(ents) != self.rows or any(len(r) != self.cols for r in ents):
            raise ValueError("entry grid does not match shape")
        rings = {e.ring for r in ents for e in r}
        if len(rings) > 1:
            raise ValueError("entries must share one ring")
        object.__setattr__(self, "entries", ents)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = self[i, 0] * other[0, j]
                for k in range(1, self.cols):
                    acc = acc + self[i, k] * other[k, j]
                row.append(acc)
            out.append(row)
        return LaurentMatrix(self.rows, other.cols, out)

    def phi(self) -> "LaurentMatrix":
        return LaurentMatrix(self.rows, self.cols, [[phi(e) for e in r] for r in self.entries])

    def valuation(self):
        vals = [e.valuation() for r in self.entries for e in r]
        ints = [v for v in vals if not isinstance(v, Infinity)]
        return min(ints) if ints else Infinity(min(e.prec for r in self.entries for e in r))


# array bridge: an element of (k (x) F)[[u]] truncated to degrees [0, K) is an
# int array of shape (f, K); a matrix is an array of shape (f, rows, cols, K).

def series_to_array(s: SeriesVector, K: int, low: int = 0) -> np.ndarray:
    out = np.zeros((s.ring.f, K), dtype=np.int64)
    for n, c in s.coeffs.items():
        if low <= n < low + K:
            out[:, n - low] = c.components
        elif n < low:
            raise ValueError("series has terms below the array window")
    return out


def array_to_series(ring: CoefficientRing, a: np.ndarray, prec: int | None = None, low: int = 0) -> SeriesVector:
    K = a.shape[-1]
    coeffs = {}
    for n in range(K):
        col = a[:, n]
        if col.any():
            coeffs[low + n] = ProductElement(ring, tuple(int(x) for x in col))
    return SeriesVector(ring, min(low, 0), low + K if prec is None else prec, coeffs)
