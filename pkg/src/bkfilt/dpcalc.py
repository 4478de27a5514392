"""Exact divided-power calculus: the ring S, the operator N = -u d/du, and the x^(i) recursion.

Everything here is exact rational arithmetic (fractions.Fraction).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dfield
from fractions import Fraction
from math import comb, factorial

CONVENTIONS = {"derived": (1, -1), "lift-line": (-1, -1)}


def legendre_valuation(n: int, p: int) -> int:
    """v_p(n!) = (n - s_p(n)) / (p - 1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    s, m = 0, n
    while m:
        s += m % p
        m //= p
    return (n - s) // (p - 1)


def vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("v_p(0) is infinite")
    n, v = abs(n), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def e_floor(i: int, e: int) -> int:
    return i // e


@dataclass(frozen=True)
class DPSeries:
    """sum_i a_i u^i / e(i)! truncated below prec."""
    e: int
    p: int
    coeffs: dict
    prec: int

    def __post_init__(self):
        clean = {int(i): Fraction(a) for i, a in self.coeffs.items() if a != 0 and 0 <= i < self.prec}
        object.__setattr__(self, "coeffs", clean)

    def plain(self) -> dict:
        """Coefficients of the ordinary power series."""
        return {i: a / factorial(e_floor(i, self.e)) for i, a in self.coeffs.items()}

    @classmethod
    def from_plain(cls, e: int, p: int, plain: dict, prec: int) -> "DPSeries":
        return cls(e, p, {i: c * factorial(e_floor(i, e)) for i, c in plain.items()}, prec)

    def __add__(self, other: "DPSeries") -> "DPSeries":
        keys = set(self.coeffs) | set(other.coeffs)
        return DPSeries(self.e, self.p, {i: self.coeffs.get(i, 0) + other.coeffs.get(i, 0) for i in keys},
                        min(self.prec, other.prec))

    def scale(self, c) -> "DPSeries":
        return DPSeries(self.e, self.p, {i: c * a for i, a in self.coeffs.items()}, self.prec)

    def __mul__(self, other: "DPSeries") -> "DPSeries":
        prec = min(self.prec, other.prec)
        a, b = self.plain(), other.plain()
        out: dict = {}
        for i, x in a.items():
            for j, y in b.items():
                if i + j < prec:
                    out[i + j] = out.get(i + j, 0) + x * y
        return DPSeries.from_plain(self.e, self.p, out, prec)

    def min_p_valuation(self) -> int | None:
        """least v_p of a stored coefficient (None for zero)."""
        vals = [vp(a.numerator, self.p) - vp(a.denominator, self.p) for a in self.coeffs.values()]
        return min(vals) if vals else None


def dp_derive(s: DPSeries) -> DPSeries:
    """-u d/du; u^i / e(i)! is an eigenvector with eigenvalue -i."""
    return DPSeries(s.e, s.p, {i: -i * a for i, a in s.coeffs.items()}, s.prec)


def gls_valuation_check(p: int, e: int, j_max: int) -> dict:
    """Valuation claims for pi^(pj) / e(pj)! and the binomial terms, normalised v(p) = 1."""
    bad = []
    for j in range(j_max + 1):
        lhs, rhs = p * j, e * legendre_valuation(e_floor(p * j, e), p)
        if lhs < rhs:
            bad.append({"kind": "integrality", "j": j, "lhs": lhs, "rhs": rhs})
        for l in range(p):
            n = p * (j + 1)
            if n < l:
                continue
            v = Fraction(vp(comb(n, l), p)) + Fraction(n - l, e) - legendre_valuation(e_floor(p * j, e), p)
            if v < Fraction(p - l, e):
                bad.append({"kind": "binomial", "j": j, "l": l, "value": str(v), "target": str(Fraction(p - l, e))})
    return {"p": p, "e": e, "j_max": j_max, "counterexamples": bad, "ok": not bad}


# symbolic algebra in H and X_b

Poly = dict  # degree -> Fraction


def _padd(a: Poly, b: Poly, c=1) -> Poly:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v != 0}


def _pmul_monomial(a: Poly, deg: int, c) -> Poly:
    return {k + deg: v * c for k, v in a.items() if v * c != 0}


def poly_derive(q: Poly, c0, c1) -> Poly:
    """d(H^a) = a H^(a-1) (c0 + c1 H)."""
    out: Poly = {}
    for a, v in q.items():
        if a == 0:
            continue
        out = _padd(out, {a - 1: a * v * c0, a: a * v * c1})
    return out


@dataclass(frozen=True)
class DPExpression:
    terms: dict  # b -> Poly in H
    constants: tuple = (1, -1)

    def __post_init__(self):
        clean = {}
        for b, q in self.terms.items():
            q = {int(k): Fraction(v) for k, v in q.items() if v != 0}
            if q:
                clean[int(b)] = q
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "constants", tuple(Fraction(c) for c in self.constants))

    @classmethod
    def x(cls, b: int = 0, constants=(1, -1)) -> "DPExpression":
        return cls({b: {0: 1}}, constants)

    def __add__(self, other: "DPExpression") -> "DPExpression":
        out = dict(self.terms)
        for b, q in other.terms.items():
            out[b] = _padd(out.get(b, {}), q)
        return DPExpression(out, self.constants)

    def __sub__(self, other: "DPExpression") -> "DPExpression":
        out = dict(self.terms)
        for b, q in other.terms.items():
            out[b] = _padd(out.get(b, {}), q, -1)
        return DPExpression(out, self.constants)

    def times_monomial(self, deg: int, c) -> "DPExpression":
        return DPExpression({b: _pmul_monomial(q, deg, c) for b, q in self.terms.items()}, self.constants)

    def derive(self) -> "DPExpression":
        """D(q X_b) = (dq) X_b + q X_(b+1)."""
        c0, c1 = self.constants
        out: dict = {}
        for b, q in self.terms.items():
            out[b] = _padd(out.get(b, {}), poly_derive(q, c0, c1))
            out[b + 1] = _padd(out.get(b + 1, {}), q)
        return DPExpression(out, self.constants)

    def negate_H(self) -> "DPExpression":
        """H -> -H together with (c0, c1) -> (-c0, c1)."""
        c0, c1 = self.constants
        return DPExpression({b: {a: v * (-1) ** a for a, v in q.items()} for b, q in self.terms.items()},
                            (-c0, c1))

    def coefficient(self, b: int, a: int) -> Fraction:
        return self.terms.get(b, {}).get(a, Fraction(0))

    def to_json(self) -> dict:
        return {"constants": [str(c) for c in self.constants],
                "terms": {str(b): {str(a): str(v) for a, v in sorted(q.items())} for b, q in sorted(self.terms.items())}}

    def __str__(self) -> str:
        parts = []
        for b, q in sorted(self.terms.items()):
            poly = " + ".join(f"({v})H^{a}" for a, v in sorted(q.items()))
            parts.append(f"[{poly}]X_{b}")
        return " + ".join(parts) if parts else "0"


def x_iterate(i: int, constants=(1, -1)) -> DPExpression:
    """x^(0) = X_0 and x^(i) = sum_{l<i} H^l / l! D^l(x^(i-1))."""
    x = DPExpression.x(0, constants)
    for depth in range(1, i + 1):
        acc = DPExpression({}, constants)
        term = x
        for l in range(depth):
            acc = acc + term.times_monomial(l, Fraction(1, factorial(l)))
            term = term.derive()
        x = acc
    return x


def _lattice_test(q: Poly, max_deg: int | None = None) -> tuple[bool, list]:
    """Constant term zero and a! [H^a] q integral for a >= 1."""
    issues = []
    if q.get(0, 0) != 0:
        issues.append({"degree": 0, "coefficient": str(q[0])})
    for a, v in sorted(q.items()):
        if a == 0:
            continue
        if max_deg is not None and a > max_deg:
            issues.append({"degree": a, "coefficient": str(v), "reason": "degree too large"})
        elif (v * factorial(a)).denominator != 1:
            issues.append({"degree": a, "coefficient": str(v)})
    return not issues, issues


def z_span_audit(expr: DPExpression) -> dict:
    per_b = {}
    q0 = expr.terms.get(0, {})
    q0_ok = not q0
    for b in sorted(expr.terms):
        if b == 0:
            continue
        ok, issues = _lattice_test(expr.terms[b])
        per_b[b] = {"pass": ok, "issues": issues}
    return {"q0_zero": q0_ok, "per_b": per_b, "pass": q0_ok and all(v["pass"] for v in per_b.values())}


def partial_calculus_audit(a_max: int, k_max: int, constants=(1, -1)) -> dict:
    c0, c1 = (Fraction(c) for c in constants)
    out = {}
    for a in range(1, a_max + 1):
        q: Poly = {a: Fraction(1, factorial(a))}
        for k in range(k_max + 1):
            ok, issues = _lattice_test(q, a)
            out[(a, k)] = {"pass": ok, "poly": {str(d): str(v) for d, v in sorted(q.items())}, "issues": issues}
            q = poly_derive(q, c0, c1)
    return {"constants": [str(c0), str(c1)], "verdicts": out}
