"""Fiberwise-polynomial functions on phase space and Hamiltonian vector fields.

A PhasePoly represents sum_k X^{i1..ik}(q) p_{i1}..p_{ik} with exact
polynomial q-coefficients.  The map kappa identifies graded symmetric
tensor fields with these functions and turns the Schouten bracket into
(minus) the canonical Poisson bracket; the p-degree split mirrors the
s |><| n decomposition; hamiltonian_field and the generalized complete
cotangent lift produce the associated Hamiltonian vector fields.
"""

from __future__ import annotations

from math import factorial

from .exactpoly import Fraction, Poly
from .schouten import GradedTensor, SymTensor


def _mult(key: tuple[int, ...]) -> int:
    """Number of distinct arrangements of the index multiset `key`."""
    n = factorial(len(key))
    for i in set(key):
        n //= factorial(key.count(i))
    return n


class PhasePoly:
    """Polynomial in p1..pn with Poly coefficients in q1..qn.

    terms maps sorted p-index multisets (tuples over {1..n}) to nonzero Poly
    coefficients; the key () holds the p-independent part.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict[tuple[int, ...], Poly] | None = None):
        self.dim = dim
        clean: dict[tuple[int, ...], Poly] = {}
        for key, poly in (terms or {}).items():
            key = tuple(key)
            if tuple(sorted(key)) != key or any(not 1 <= i <= dim for i in key):
                raise ValueError(f"bad p-index multiset {key}")
            if poly.dim != dim:
                raise ValueError("coefficient dim mismatch")
            if not poly.is_zero():
                clean[key] = clean[key] + poly if key in clean else poly
                if clean[key].is_zero():
                    del clean[key]
        self.terms = clean

    @classmethod
    def zero(cls, dim: int) -> "PhasePoly":
        return cls(dim, {})

    @classmethod
    def from_q(cls, poly: Poly) -> "PhasePoly":
        return cls(poly.dim, {(): poly})

    def coefficient(self, key: tuple[int, ...]) -> Poly:
        return self.terms.get(tuple(sorted(key)), Poly.zero(self.dim))

    def p_degree(self) -> int:
        """Maximal p-degree; -1 for zero."""
        return max((len(k) for k in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PhasePoly") -> "PhasePoly":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        terms = dict(self.terms)
        for key, poly in other.terms.items():
            acc = terms.get(key, Poly.zero(self.dim)) + poly
            if acc.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = acc
        out = PhasePoly.__new__(PhasePoly)
        out.dim, out.terms = self.dim, terms
        return out

    def __neg__(self) -> "PhasePoly":
        out = PhasePoly.__new__(PhasePoly)
        out.dim = self.dim
        out.terms = {k: -p for k, p in self.terms.items()}
        return out

    def __sub__(self, other: "PhasePoly") -> "PhasePoly":
        return self + (-other)

    def __mul__(self, other) -> "PhasePoly":
        if isinstance(other, (int, Fraction)):
            return PhasePoly(self.dim, {k: p * other for k, p in self.terms.items()})
        if isinstance(other, Poly):
            return PhasePoly(self.dim, {k: p * other for k, p in self.terms.items()})
        if not isinstance(other, PhasePoly):
            return NotImplemented
        terms: dict[tuple[int, ...], Poly] = {}
        for ka, pa in self.terms.items():
            for kb, pb in other.terms.items():
                key = tuple(sorted(ka + kb))
                prod = pa * pb
                acc = terms.get(key, Poly.zero(self.dim)) + prod
                if acc.is_zero():
                    terms.pop(key, None)
                else:
                    terms[key] = acc
        return PhasePoly(self.dim, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PhasePoly) and self.dim == other.dim and self.terms == other.terms

    def diff_q(self, axis: int) -> "PhasePoly":
        return PhasePoly(self.dim, {k: p.diff(axis) for k, p in self.terms.items()})

    def diff_p(self, axis: int) -> "PhasePoly":
        """Partial derivative with respect to p_axis (1-based)."""
        terms: dict[tuple[int, ...], Poly] = {}
        for key, poly in self.terms.items():
            count = key.count(axis)
            if count == 0:
                continue
            reduced = list(key)
            reduced.remove(axis)
            reduced = tuple(reduced)
            acc = terms.get(reduced, Poly.zero(self.dim)) + poly * count
            if acc.is_zero():
                terms.pop(reduced, None)
            else:
                terms[reduced] = acc
        return PhasePoly(self.dim, terms)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for key in sorted(self.terms, key=lambda k: (len(k), k)):
            factors = " ".join(
                f"p{i}" if key.count(i) == 1 else f"p{i}^{key.count(i)}" for i in sorted(set(key))
            )
            coeff = self.terms[key].to_text()
            chunks.append(f"({coeff}) * {factors}" if factors else f"({coeff})")
        return " + ".join(chunks)

    def __repr__(self):
        return f"PhasePoly({self.to_text()})"


def kappa(X: GradedTensor | SymTensor) -> PhasePoly:
    """X^{i1..ik}(q) dq_{i1} x..x dq_{ik} |-> X^{i1..ik}(q) p_{i1}..p_{ik}.

    The sum over all index arrangements collapses onto sorted multisets with
    a multiplicity factor, which makes kappa a bijection onto PhasePoly.
    """
    if isinstance(X, SymTensor):
        X = GradedTensor.from_tensor(X)
    terms: dict[tuple[int, ...], Poly] = {}
    for tensor in X.parts.values():
        for key, poly in tensor.components.items():
            contrib = poly * _mult(key)
            acc = terms.get(key, Poly.zero(X.dim)) + contrib
            if not acc.is_zero():
                terms[key] = acc
            else:
                terms.pop(key, None)
    return PhasePoly(X.dim, terms)


def kappa_inv(h: PhasePoly) -> GradedTensor:
    """Exact inverse of kappa."""
    parts: dict[int, dict[tuple[int, ...], Poly]] = {}
    for key, poly in h.terms.items():
        parts.setdefault(len(key), {})[key] = poly * Fraction(1, _mult(key))
    return GradedTensor(
        h.dim, {k: SymTensor(h.dim, k, comps) for k, comps in parts.items()}
    )


def canonical_bracket(h: PhasePoly, g: PhasePoly) -> PhasePoly:
    """Canonical Poisson bracket {h, g} = dh/dq^l dg/dp_l - dg/dq^l dh/dp_l.

    The Lie bracket carried by this algebra is the opposite, -{., .}.
    """
    if h.dim != g.dim:
        raise ValueError("dimension mismatch")
    out = PhasePoly.zero(h.dim)
    for ell in range(1, h.dim + 1):
        out = out + h.diff_q(ell) * g.diff_p(ell) - g.diff_q(ell) * h.diff_p(ell)
    return out


def lie_bracket(h: PhasePoly, g: PhasePoly) -> PhasePoly:
    """The Lie algebra bracket on phase functions: -{h, g}."""
    return -canonical_bracket(h, g)


def decompose_phase(h: PhasePoly) -> tuple[PhasePoly, PhasePoly]:
    """Split by p-degree: (degree <= 1 part, degree >= 2 part)."""
    s_terms = {k: p for k, p in h.terms.items() if len(k) <= 1}
    n_terms = {k: p for k, p in h.terms.items() if len(k) >= 2}
    return PhasePoly(h.dim, s_terms), PhasePoly(h.dim, n_terms)


def _require_degrees(Xhat: PhasePoly, sHat: PhasePoly):
    if any(len(k) < 2 for k in Xhat.terms):
        raise ValueError("first argument must have p-degree >= 2 throughout")
    if any(len(k) > 1 for k in sHat.terms):
        raise ValueError("second argument must have p-degree <= 1")


def act_left_phase(Xhat: PhasePoly, sHat: PhasePoly) -> PhasePoly:
    """Left action of the degree->=2 block on the degree-<=1 block.

    Only the degree-2 part of Xhat and the p-independent part of sHat
    produce degree-<=1 output:  2 sigma_{,l}(q) X^{il}(q) p_i.
    Implemented as the degree-<=1 projection of -{Xhat, sHat}, which equals
    that displayed formula identically.
    """
    _require_degrees(Xhat, sHat)
    s_part, _ = decompose_phase(lie_bracket(Xhat, sHat))
    return s_part


def act_right_phase(Xhat: PhasePoly, sHat: PhasePoly) -> PhasePoly:
    """Right action: the degree->=2 projection of -{Xhat, sHat}.

    Componentwise this is
        sum_{k>=2} ( -X^{i1..ik}_{,l} Y^l + k X^{i1..i_{k-1}l} Y^{ik}_{,l}
                     + (k+1) sigma_{,l} X^{i1..ik l} ) p_{i1}..p_{ik}.
    """
    _require_degrees(Xhat, sHat)
    _, n_part = decompose_phase(lie_bracket(Xhat, sHat))
    return n_part


class HamField:
    """Vector field a^l d/dq^l + b_l d/dp_l with PhasePoly components."""

    __slots__ = ("dim", "qcomp", "pcomp")

    def __init__(self, qcomp: list[PhasePoly], pcomp: list[PhasePoly]):
        if not qcomp or len(qcomp) != len(pcomp):
            raise ValueError("need matching component lists")
        self.dim = len(qcomp)
        if any(c.dim != self.dim for c in qcomp + pcomp):
            raise ValueError("component dim mismatch")
        self.qcomp = list(qcomp)
        self.pcomp = list(pcomp)

    @classmethod
    def zero(cls, dim: int) -> "HamField":
        return cls([PhasePoly.zero(dim)] * dim, [PhasePoly.zero(dim)] * dim)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.qcomp + self.pcomp)

    def __add__(self, other: "HamField") -> "HamField":
        return HamField(
            [a + b for a, b in zip(self.qcomp, other.qcomp)],
            [a + b for a, b in zip(self.pcomp, other.pcomp)],
        )

    def __neg__(self) -> "HamField":
        return HamField([-c for c in self.qcomp], [-c for c in self.pcomp])

    def __sub__(self, other: "HamField") -> "HamField":
        return self + (-other)

    def __eq__(self, other):
        return (
            isinstance(other, HamField)
            and self.qcomp == other.qcomp
            and self.pcomp == other.pcomp
        )

    def apply(self, g: PhasePoly) -> PhasePoly:
        """Directional derivative of g along this field."""
        out = PhasePoly.zero(self.dim)
        for ell in range(1, self.dim + 1):
            out = out + self.qcomp[ell - 1] * g.diff_q(ell) + self.pcomp[ell - 1] * g.diff_p(ell)
        return out

    def __repr__(self):
        qs = ", ".join(c.to_text() for c in self.qcomp)
        ps = ", ".join(c.to_text() for c in self.pcomp)
        return f"HamField(dq: [{qs}] | dp: [{ps}])"


def hamiltonian_field(h: PhasePoly) -> HamField:
    """phi(h) = -X_h = -dh/dp_l d/dq^l + dh/dq^l d/dp_l.

    A Lie algebra epimorphism from (PhasePoly, -{.,.}) onto the Hamiltonian
    fields with the opposite Jacobi-Lie bracket; its kernel is the constants.
    """
    qcomp = [-h.diff_p(ell) for ell in range(1, h.dim + 1)]
    pcomp = [h.diff_q(ell) for ell in range(1, h.dim + 1)]
    return HamField(qcomp, pcomp)


def gccl(X: GradedTensor | SymTensor) -> HamField:
    """Generalized complete cotangent lift of a symmetric tensor field.

    For an order-k field,
        qcomp^l = -k X^{i1..i_{k-1} l} p_{i1}..p_{i_{k-1}},
        pcomp_l = X^{i1..ik}_{,l} p_{i1}..p_{ik}.
    Built directly from the tensor components (with arrangement
    multiplicities), independently of hamiltonian_field(kappa(X)); the two
    routes agree, which the tests exercise.
    """
    if isinstance(X, SymTensor):
        X = GradedTensor.from_tensor(X)
    dim = X.dim
    qterms: list[dict[tuple[int, ...], Poly]] = [dict() for _ in range(dim)]
    pterms: list[dict[tuple[int, ...], Poly]] = [dict() for _ in range(dim)]
    for k, tensor in X.parts.items():
        for key, poly in tensor.components.items():
            # p-derivative slot: remove one copy of each distinct index.
            for ell in set(key):
                reduced = list(key)
                reduced.remove(ell)
                reduced = tuple(reduced)
                contrib = poly * (-k * _mult(reduced))
                slot = qterms[ell - 1]
                acc = slot.get(reduced, Poly.zero(dim)) + contrib
                if acc.is_zero():
                    slot.pop(reduced, None)
                else:
                    slot[reduced] = acc
            for ell in range(1, dim + 1):
                d = poly.diff(ell)
                if d.is_zero():
                    continue
                slot = pterms[ell - 1]
                acc = slot.get(key, Poly.zero(dim)) + d * _mult(key)
                if acc.is_zero():
                    slot.pop(key, None)
                else:
                    slot[key] = acc
    return HamField(
        [PhasePoly(dim, t) for t in qterms], [PhasePoly(dim, t) for t in pterms]
    )


def jacobi_lie_bracket(a: HamField, b: HamField) -> HamField:
    """Plain Jacobi-Lie bracket [a, b] (callers negate for the Lie structure)."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    qcomp = [a.apply(b.qcomp[i]) - b.apply(a.qcomp[i]) for i in range(a.dim)]
    pcomp = [a.apply(b.pcomp[i]) - b.apply(a.pcomp[i]) for i in range(a.dim)]
    return HamField(qcomp, pcomp)
