"""Multivariate complex polynomials, coefficient expression trees, and monic
pseudopolynomials (polynomials in a fiber variable t with function coefficients).

Polynomials use a dense term list in graded-lexicographic order; the zero
polynomial has degree -1 so that degree arithmetic needs no special cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Polynomial",
    "Expr",
    "Const",
    "Coord",
    "Add",
    "Mul",
    "Neg",
    "Exp",
    "Sin",
    "Cos",
    "Inv",
    "Pseudopolynomial",
    "CoefficientFunction",
    "eval_poly",
    "eval_coefficient",
    "eval_fiber_poly",
    "vieta_from_roots",
    "assembled_degree_bound",
    "expr_from_json",
    "expr_to_json",
]

_POLE_FLOOR = 1e-13


def _as_points(x, m: int) -> np.ndarray:
    """Coerce a single point or an (N, m) batch to a complex (N, m) array."""
    pts = np.atleast_1d(np.asarray(x, dtype=complex))
    if pts.ndim == 1:
        if m == 1 and pts.shape[0] != 1:
            # a 1-d array of scalars is a batch of points in C^1
            pts = pts.reshape(-1, 1)
        else:
            pts = pts.reshape(1, -1)
    if pts.shape[1] != m:
        raise ValueError(
            f"point dimension {pts.shape[1]} does not match num_vars={m}"
        )
    return pts


@dataclass(frozen=True)
class Polynomial:
    """Dense multivariate polynomial with complex coefficients.

    terms: tuple of (exponent tuple, coefficient), graded-lex sorted,
    no duplicate exponents, no stored zero coefficients.
    """

    num_vars: int
    terms: tuple = ()

    @staticmethod
    def from_terms(num_vars: int, terms: Iterable) -> "Polynomial":
        acc: dict = {}
        for exps, coeff in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars:
                raise ValueError("exponent length does not match num_vars")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            acc[exps] = acc.get(exps, 0.0 + 0.0j) + complex(coeff)
        cleaned = [(e, c) for e, c in acc.items() if c != 0]
        cleaned.sort(key=lambda t: (sum(t[0]), t[0]))
        return Polynomial(num_vars, tuple(cleaned))

    @staticmethod
    def zero(num_vars: int) -> "Polynomial":
        return Polynomial(num_vars, ())

    @staticmethod
    def constant(num_vars: int, value: complex) -> "Polynomial":
        return Polynomial.from_terms(num_vars, [((0,) * num_vars, value)])

    @staticmethod
    def coordinate(num_vars: int, index: int) -> "Polynomial":
        if not 0 <= index < num_vars:
            raise ValueError(f"coordinate index {index} out of range")
        exps = [0] * num_vars
        exps[index] = 1
        return Polynomial.from_terms(num_vars, [(tuple(exps), 1.0)])

    @staticmethod
    def from_coeffs_1d(coeffs: Sequence[complex]) -> "Polynomial":
        """Univariate polynomial from coefficients ordered low to high degree."""
        return Polynomial.from_terms(1, [((k,), c) for k, c in enumerate(coeffs)])

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e, _ in self.terms)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if self.num_vars != other.num_vars:
            raise ValueError("num_vars mismatch")
        return Polynomial.from_terms(self.num_vars, list(self.terms) + list(other.terms))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.num_vars != other.num_vars:
            raise ValueError("num_vars mismatch")
        prods = []
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                prods.append((tuple(x + y for x, y in zip(ea, eb)), ca * cb))
        return Polynomial.from_terms(self.num_vars, prods)

    def scale(self, factor: complex) -> "Polynomial":
        return Polynomial.from_terms(
            self.num_vars, [(e, c * factor) for e, c in self.terms]
        )

    def __neg__(self) -> "Polynomial":
        return self.scale(-1.0)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.num_vars, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def evaluate(self, x) -> complex:
        return complex(self.evaluate_many(_as_points(x, self.num_vars))[0])

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at an (N, m) array of points; returns (N,) complex."""
        pts = _as_points(pts, self.num_vars)
        n = pts.shape[0]
        if not self.terms:
            return np.zeros(n, dtype=complex)
        max_deg = [0] * self.num_vars
        for exps, _ in self.terms:
            for i, e in enumerate(exps):
                max_deg[i] = max(max_deg[i], e)
        # power tables per variable, shape (max_deg+1, N)
        pows = []
        for i in range(self.num_vars):
            table = np.empty((max_deg[i] + 1, n), dtype=complex)
            table[0] = 1.0
            for k in range(1, max_deg[i] + 1):
                table[k] = table[k - 1] * pts[:, i]
            pows.append(table)
        out = np.zeros(n, dtype=complex)
        for exps, coeff in self.terms:
            mono = np.full(n, coeff, dtype=complex)
            for i, e in enumerate(exps):
                if e:
                    mono = mono * pows[i][e]
            out += mono
        return out

    def to_json(self) -> dict:
        return {
            "m": self.num_vars,
            "terms": [[list(e), [c.real, c.imag]] for e, c in self.terms],
        }

    @staticmethod
    def from_json(data: dict) -> "Polynomial":
        return Polynomial.from_terms(
            int(data["m"]),
            [(tuple(e), complex(c[0], c[1])) for e, c in data["terms"]],
        )


def eval_poly(p: Polynomial, x) -> complex:
    """Value of p at a point of C^m.  Raises on dimension mismatch."""
    return p.evaluate(x)


# ---------------------------------------------------------------------------
# coefficient expression trees


class Expr:
    """Base class for coefficient expressions C^m -> C.

    The supported operations are constants, coordinates, sums, products,
    negation, exp, sin, cos and reciprocals (the caller guarantees the
    reciprocal's argument has no zero on the evaluation domain).
    """

    op = ""

    def eval_many(self, pts: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def evaluate(self, x, m: int | None = None) -> complex:
        pts = np.atleast_2d(np.asarray(x, dtype=complex))
        return complex(self.eval_many(pts)[0])

    def to_json(self) -> dict:  # pragma: no cover
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Expr):
    value: complex
    op = "const"

    def eval_many(self, pts):
        return np.full(pts.shape[0], complex(self.value), dtype=complex)

    def to_json(self):
        v = complex(self.value)
        return {"op": "const", "args": [v.real, v.imag]}


@dataclass(frozen=True)
class Coord(Expr):
    index: int
    op = "coord"

    def eval_many(self, pts):
        if self.index >= pts.shape[1]:
            raise ValueError(f"coordinate {self.index} out of range for m={pts.shape[1]}")
        return np.asarray(pts[:, self.index], dtype=complex)

    def to_json(self):
        return {"op": "coord", "args": [self.index]}


@dataclass(frozen=True)
class Add(Expr):
    args: tuple
    op = "add"

    def eval_many(self, pts):
        out = np.zeros(pts.shape[0], dtype=complex)
        for a in self.args:
            out = out + a.eval_many(pts)
        return out

    def to_json(self):
        return {"op": "add", "args": [a.to_json() for a in self.args]}


@dataclass(frozen=True)
class Mul(Expr):
    args: tuple
    op = "mul"

    def eval_many(self, pts):
        out = np.ones(pts.shape[0], dtype=complex)
        for a in self.args:
            out = out * a.eval_many(pts)
        return out

    def to_json(self):
        return {"op": "mul", "args": [a.to_json() for a in self.args]}


def _unary(name):
    fn = {"exp": np.exp, "sin": np.sin, "cos": np.cos}[name]

    @dataclass(frozen=True)
    class _U(Expr):
        arg: Expr
        op = name

        def eval_many(self, pts):
            return fn(self.arg.eval_many(pts))

        def to_json(self):
            return {"op": name, "args": [self.arg.to_json()]}

    _U.__name__ = name.capitalize()
    return _U


Exp = _unary("exp")
Sin = _unary("sin")
Cos = _unary("cos")


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr
    op = "neg"

    def eval_many(self, pts):
        return -self.arg.eval_many(pts)

    def to_json(self):
        return {"op": "neg", "args": [self.arg.to_json()]}


@dataclass(frozen=True)
class Inv(Expr):
    """Reciprocal of a subexpression; the domain must stay clear of its zeros."""

    arg: Expr
    op = "inv"

    def eval_many(self, pts):
        den = self.arg.eval_many(pts)
        bad = np.abs(den) < _POLE_FLOOR
        if np.any(bad):
            idx = int(np.argmax(bad))
            raise ValueError(
                f"reciprocal hit a pole: |denominator|={abs(den[idx]):.3e} at point index {idx}"
            )
        return 1.0 / den

    def to_json(self):
        return {"op": "inv", "args": [self.arg.to_json()]}


@dataclass(frozen=True)
class PolyExpr(Expr):
    poly: Polynomial
    op = "poly"

    def eval_many(self, pts):
        return self.poly.evaluate_many(pts)

    def to_json(self):
        return {"op": "poly", "args": [self.poly.to_json()]}


CoefficientFunction = Union[Expr, Polynomial]


def eval_coefficient(fn: CoefficientFunction, pts: np.ndarray) -> np.ndarray:
    if isinstance(fn, Polynomial):
        return fn.evaluate_many(pts)
    return fn.eval_many(np.atleast_2d(np.asarray(pts, dtype=complex)))


def expr_to_json(fn: CoefficientFunction) -> dict:
    if isinstance(fn, Polynomial):
        return PolyExpr(fn).to_json()
    return fn.to_json()


def expr_from_json(data: dict) -> Expr:
    if not isinstance(data, dict) or "op" not in data:
        raise ValueError("expression node must be an object with an 'op' field")
    op = data["op"]
    args = data.get("args", [])
    if op == "const":
        if len(args) == 1:
            return Const(complex(args[0]))
        return Const(complex(args[0], args[1]))
    if op == "coord":
        return Coord(int(args[0]))
    if op == "add":
        return Add(tuple(expr_from_json(a) for a in args))
    if op == "mul":
        return Mul(tuple(expr_from_json(a) for a in args))
    if op == "neg":
        return Neg(expr_from_json(args[0]))
    if op == "exp":
        return Exp(expr_from_json(args[0]))
    if op == "sin":
        return Sin(expr_from_json(args[0]))
    if op == "cos":
        return Cos(expr_from_json(args[0]))
    if op == "inv":
        return Inv(expr_from_json(args[0]))
    if op == "poly":
        return PolyExpr(Polynomial.from_json(args[0]))
    raise ValueError(f"unknown expression op {op!r}")


# ---------------------------------------------------------------------------
# pseudopolynomials


@dataclass(frozen=True)
class Pseudopolynomial:
    """Monic polynomial in the fiber variable t of degree n with coefficient
    functions a_1..a_n on the base: t^n + a_1(x) t^(n-1) + ... + a_n(x).

    The leading coefficient 1 is implicit and never stored.
    """

    n: int
    coeffs: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("fiber degree n must be >= 1")
        if len(self.coeffs) != self.n:
            raise ValueError(f"expected {self.n} coefficient functions, got {len(self.coeffs)}")

    def coefficients_at(self, pts: np.ndarray) -> np.ndarray:
        """Coefficient matrix (N, n): row i is (a_1(x_i), ..., a_n(x_i))."""
        pts = np.atleast_2d(np.asarray(pts, dtype=complex))
        out = np.empty((pts.shape[0], self.n), dtype=complex)
        for j, fn in enumerate(self.coeffs):
            try:
                out[:, j] = eval_coefficient(fn, pts)
            except Exception as exc:
                raise ValueError(f"coefficient a_{j + 1} failed to evaluate: {exc}") from exc
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": [expr_to_json(c) for c in self.coeffs]}

    @staticmethod
    def from_json(data: dict) -> "Pseudopolynomial":
        coeffs = []
        for node in data["coeffs"]:
            e = expr_from_json(node)
            coeffs.append(e.poly if isinstance(e, PolyExpr) else e)
        return Pseudopolynomial(int(data["n"]), tuple(coeffs))


def eval_fiber_poly(F: Pseudopolynomial, x) -> np.ndarray:
    """Coefficient vector (a_1(x), ..., a_n(x)); prepending 1 gives F(x, .).

    Evaluation failures report the offending coefficient index (1-based).
    """
    pts = np.atleast_2d(np.asarray(x, dtype=complex))
    return F.coefficients_at(pts)[0]


def vieta_from_roots(roots: Sequence[complex]) -> np.ndarray:
    """Coefficients (a_1, ..., a_n) of the monic polynomial with the given roots.

    Built by multiplying linear factors in a canonical root order, so the
    output is exactly permutation-invariant.
    """
    rs = sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))
    coeffs = np.zeros(0, dtype=complex)
    for r in rs:
        nxt = np.empty(coeffs.shape[0] + 1, dtype=complex)
        shifted = np.concatenate(([1.0 + 0.0j], coeffs[:-1])) if coeffs.size else np.array([1.0 + 0.0j])
        nxt[: coeffs.size] = coeffs - r * shifted[: coeffs.size]
        nxt[-1] = -r * (coeffs[-1] if coeffs.size else 1.0)
        coeffs = nxt
    return coeffs


def assembled_degree_bound(d: int, n: int) -> int:
    """Degree bound max(n, d + n - 1) of t^n + a_1 t^(n-1) + ... + a_n with
    deg a_j <= d; at most 2d - 1 whenever d >= n."""
    if d < 0 or n < 1:
        raise ValueError("need d >= 0 and n >= 1")
    return max(n, d + n - 1)
