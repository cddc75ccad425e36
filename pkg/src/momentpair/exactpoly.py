"""Exact multivariate polynomial arithmetic over the rationals.

Polynomials in the spatial variables q1..qn (n <= 3) are the coefficient
ring for every symbolic tensor in this package.  Coefficients are
`fractions.Fraction`, so all algebraic identity tests downstream can assert
residual == 0 instead of residual ~ 0.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

MAX_DIM = 3

# Rational coefficients: arbitrary precision, always in lowest terms with a
# positive denominator.  The stdlib Fraction guarantees all three invariants.
Rational = Fraction


def _coerce(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"exact coefficient expected (int or Fraction), got {type(value).__name__}")


class Poly:
    """Polynomial in q1..qn with Fraction coefficients.

    Terms are kept in a dict mapping exponent multi-indices (length-n tuples
    of non-negative ints) to nonzero Fractions.  Instances are treated as
    immutable: every operation returns a new Poly.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict[tuple[int, ...], Fraction] | None = None):
        if not 1 <= dim <= MAX_DIM:
            raise ValueError(f"dim must be in 1..{MAX_DIM}, got {dim}")
        self.dim = dim
        clean: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in (terms or {}).items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != dim or any(e < 0 for e in expo):
                raise ValueError(f"bad exponent multi-index {expo} for dim {dim}")
            coeff = _coerce(coeff)
            if coeff != 0:
                clean[expo] = clean.get(expo, Fraction(0)) + coeff
                if clean[expo] == 0:
                    del clean[expo]
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, value) -> "Poly":
        return cls(dim, {(0,) * dim: _coerce(value)})

    @classmethod
    def variable(cls, dim: int, axis: int) -> "Poly":
        """The coordinate function q<axis>, axis in 1..dim."""
        if not 1 <= axis <= dim:
            raise ValueError(f"axis {axis} out of range 1..{dim}")
        expo = tuple(1 if i == axis - 1 else 0 for i in range(dim))
        return cls(dim, {expo: Fraction(1)})

    @classmethod
    def monomial(cls, dim: int, expo: tuple[int, ...], coeff=1) -> "Poly":
        return cls(dim, {tuple(expo): _coerce(coeff)})

    # -- ring operations ----------------------------------------------------

    def _check_dim(self, other: "Poly"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.dim, other)
        self._check_dim(other)
        terms = dict(self.terms)
        for expo, coeff in other.terms.items():
            acc = terms.get(expo, Fraction(0)) + coeff
            if acc == 0:
                terms.pop(expo, None)
            else:
                terms[expo] = acc
        out = Poly.__new__(Poly)
        out.dim, out.terms = self.dim, terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Poly.__new__(Poly)
        out.dim = self.dim
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _coerce(other)
            out = Poly.__new__(Poly)
            out.dim = self.dim
            out.terms = {} if c == 0 else {e: c * v for e, v in self.terms.items()}
            return out
        self._check_dim(other)
        terms: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                expo = tuple(x + y for x, y in zip(ea, eb))
                acc = terms.get(expo, Fraction(0)) + ca * cb
                if acc == 0:
                    terms.pop(expo, None)
                else:
                    terms[expo] = acc
        out = Poly.__new__(Poly)
        out.dim, out.terms = self.dim, terms
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Poly.constant(self.dim, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.dim, other)
        return isinstance(other, Poly) and self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    # -- calculus and evaluation --------------------------------------------

    def diff(self, axis: int) -> "Poly":
        """Exact formal partial derivative with respect to q<axis> (1-based)."""
        if not 1 <= axis <= self.dim:
            raise ValueError(f"axis {axis} out of range 1..{self.dim}")
        i = axis - 1
        terms: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in self.terms.items():
            if expo[i] == 0:
                continue
            new = list(expo)
            new[i] -= 1
            terms[tuple(new)] = coeff * expo[i]
        return Poly(self.dim, terms)

    def eval_at(self, point):
        """Evaluate at a point (length-dim sequence).

        Fraction/int inputs give an exact Fraction; float inputs give a float.
        """
        if len(point) != self.dim:
            raise ValueError(f"point length {len(point)} != dim {self.dim}")
        exact = all(isinstance(x, (int, Fraction)) for x in point)
        total = Fraction(0) if exact else 0.0
        for expo, coeff in self.terms.items():
            term = coeff if exact else float(coeff)
            for x, e in zip(point, expo):
                if e:
                    term = term * x**e
            total = total + term
        return total

    __call__ = eval_at

    def eval_grid(self, axes):
        """Float evaluation on numpy coordinate arrays (one per variable)."""
        import numpy as np

        if len(axes) != self.dim:
            raise ValueError(f"{len(axes)} coordinate arrays for dim {self.dim}")
        total = np.zeros(np.broadcast(*axes).shape) if self.dim > 1 else np.zeros_like(axes[0], dtype=float)
        for expo, coeff in self.terms.items():
            term = float(coeff)
            for x, e in zip(axes, expo):
                if e:
                    term = term * x**e
            total = total + term
        return total

    # -- queries and serialization ------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self):
        """Terms in graded lexicographic order (canonical, deterministic)."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def to_text(self) -> str:
        """Canonical text form, e.g. '2 + -1/3 * q1^2 q2'."""
        if not self.terms:
            return "0"
        chunks = []
        for expo, coeff in self.sorted_terms():
            factors = " ".join(
                f"q{i + 1}" if e == 1 else f"q{i + 1}^{e}" for i, e in enumerate(expo) if e
            )
            chunks.append(f"{coeff} * {factors}" if factors else str(coeff))
        return " + ".join(chunks)

    def __repr__(self):
        return f"Poly({self.dim}, {self.to_text()})"


def poly_add(a: Poly, b: Poly) -> Poly:
    return a + b


def poly_mul(a: Poly, b: Poly) -> Poly:
    return a * b


def poly_partial(a: Poly, axis: int) -> Poly:
    return a.diff(axis)


def poly_eval(a: Poly, point):
    return a.eval_at(point)


def all_monomials(dim: int, max_degree: int):
    """All exponent multi-indices with total degree <= max_degree."""
    return [e for e in product(range(max_degree + 1), repeat=dim) if sum(e) <= max_degree]
