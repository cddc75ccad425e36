"""Symmetric contravariant tensor fields and their graded Lie bracket.

A order-k field is stored through its components on sorted index multisets
over {1..n}; symmetry of the coefficient functions is therefore structural.
The bracket on these fields (the symmetric Schouten concomitant) takes an
order-k and an order-m field to one of order k+m-1.  Orders {0,1} form the
subalgebra s of function/vector-field pairs, orders >= 2 form the subalgebra
n, and the whole algebra is the double cross sum s |><| n; the mutual
actions and their compatibility conditions are implemented and checked here
with exact rational arithmetic.
"""

from __future__ import annotations

from itertools import product
from math import factorial

from .exactpoly import Fraction, Poly

DEFAULT_ORDER_CAP = 8


class OrderCapError(Exception):
    """A graded bracket produced an order above the configured cap."""


def _check_key(key: tuple[int, ...], order: int, dim: int):
    if len(key) != order:
        raise ValueError(f"index tuple {key} has length {len(key)}, expected {order}")
    if any(not 1 <= i <= dim for i in key):
        raise ValueError(f"index out of range 1..{dim} in {key}")
    if tuple(sorted(key)) != key:
        raise ValueError(f"index tuple {key} is not sorted (canonical form required)")


class SymTensor:
    """Symmetric contravariant tensor field of a fixed order.

    components maps sorted length-`order` index tuples to Poly coefficients;
    the stored value is the coefficient of each individual arrangement of
    that index multiset (the tensor being symmetric).  Order 0 is a single
    scalar Poly stored under the empty tuple.
    """

    __slots__ = ("dim", "order", "components")

    def __init__(self, dim: int, order: int, components: dict[tuple[int, ...], Poly] | None = None):
        if order < 0:
            raise ValueError("order must be >= 0")
        self.dim = dim
        self.order = order
        comps: dict[tuple[int, ...], Poly] = {}
        for key, poly in (components or {}).items():
            key = tuple(key)
            _check_key(key, order, dim)
            if poly.dim != dim:
                raise ValueError("component Poly dim differs from tensor dim")
            if not poly.is_zero():
                comps[key] = comps[key] + poly if key in comps else poly
                if comps[key].is_zero():
                    del comps[key]
        self.components = comps

    @classmethod
    def zero(cls, dim: int, order: int) -> "SymTensor":
        return cls(dim, order, {})

    @classmethod
    def from_function(cls, sigma: Poly) -> "SymTensor":
        return cls(sigma.dim, 0, {(): sigma})

    def component(self, key: tuple[int, ...]) -> Poly:
        return self.components.get(tuple(sorted(key)), Poly.zero(self.dim))

    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, other: "SymTensor") -> "SymTensor":
        if (self.dim, self.order) != (other.dim, other.order):
            raise ValueError("dim/order mismatch in tensor sum")
        comps = dict(self.components)
        for key, poly in other.components.items():
            acc = comps.get(key, Poly.zero(self.dim)) + poly
            if acc.is_zero():
                comps.pop(key, None)
            else:
                comps[key] = acc
        out = SymTensor.__new__(SymTensor)
        out.dim, out.order, out.components = self.dim, self.order, comps
        return out

    def __neg__(self) -> "SymTensor":
        out = SymTensor.__new__(SymTensor)
        out.dim, out.order = self.dim, self.order
        out.components = {k: -p for k, p in self.components.items()}
        return out

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        return self + (-other)

    def scale(self, c) -> "SymTensor":
        return SymTensor(self.dim, self.order, {k: p * c for k, p in self.components.items()})

    def __eq__(self, other):
        return (
            isinstance(other, SymTensor)
            and (self.dim, self.order) == (other.dim, other.order)
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.dim, self.order, frozenset(self.components.items())))

    def to_text(self) -> str:
        if self.is_zero():
            return f"order {self.order}: 0"
        body = ", ".join(
            f"{''.join(map(str, key)) or '-'}: {poly.to_text()}"
            for key, poly in sorted(self.components.items())
        )
        return f"order {self.order}: {{{body}}}"

    def __repr__(self):
        return f"SymTensor({self.to_text()})"


def _sorted_keys(dim: int, order: int):
    """All sorted index multisets of the given size over {1..dim}."""
    if order == 0:
        return [()]
    return [k for k in product(range(1, dim + 1), repeat=order) if tuple(sorted(k)) == k]


def _counts(key: tuple[int, ...], dim: int) -> tuple[int, ...]:
    return tuple(key.count(i) for i in range(1, dim + 1))


def _key_of(counts: tuple[int, ...]) -> tuple[int, ...]:
    out: list[int] = []
    for i, c in enumerate(counts, start=1):
        out.extend([i] * c)
    return tuple(out)


def _arrangements(counts: tuple[int, ...]) -> int:
    """Multinomial count of distinct arrangements of a multiset."""
    n = factorial(sum(counts))
    for c in counts:
        n //= factorial(c)
    return n


def _sub_counts(counts: tuple[int, ...], total: int):
    """All count vectors a with 0 <= a_i <= counts_i and sum(a) == total."""
    for a in product(*[range(c + 1) for c in counts]):
        if sum(a) == total:
            yield a


def schouten_bracket(X: SymTensor, Y: SymTensor) -> SymTensor:
    """Symmetric Schouten concomitant [X, Y] of orders k, m -> k+m-1.

    Componentwise, for free indices (i_1..i_{k+m-1}),

        k X^{i_{m+1}..i_{m+k-1} l} d_l Y^{i_1..i_m}
          - m Y^{i_{k+1}..i_{k+m-1} l} d_l X^{i_1..i_k},

    symmetrized over the free indices.  The average over arrangements is
    taken split by split: each way of dividing the index multiset between
    the two factors is weighted by its arrangement multiplicity.  For
    k = m = 0 the bracket is trivial and the zero function is returned.
    """
    if X.dim != Y.dim:
        raise ValueError("dimension mismatch in Schouten bracket")
    dim, k, m = X.dim, X.order, Y.order
    if k == 0 and m == 0:
        return SymTensor.zero(dim, 0)
    order = k + m - 1
    comps: dict[tuple[int, ...], Poly] = {}
    for key in _sorted_keys(dim, order):
        cv = _counts(key, dim)
        total = Poly.zero(dim)
        if k > 0:
            # first factor takes k-1 free indices plus the contracted one
            for a in _sub_counts(cv, m):
                rest = tuple(c - x for c, x in zip(cv, a))
                y_key = _key_of(a)
                weight = _arrangements(a) * _arrangements(rest) * k
                for ell in range(1, dim + 1):
                    xk = X.component(tuple(sorted(_key_of(rest) + (ell,))))
                    if xk.is_zero():
                        continue
                    dy = Y.component(y_key).diff(ell)
                    if dy.is_zero():
                        continue
                    total = total + xk * dy * weight
        if m > 0:
            for a in _sub_counts(cv, k):
                rest = tuple(c - x for c, x in zip(cv, a))
                x_key = _key_of(a)
                weight = _arrangements(a) * _arrangements(rest) * m
                for ell in range(1, dim + 1):
                    ym = Y.component(tuple(sorted(_key_of(rest) + (ell,))))
                    if ym.is_zero():
                        continue
                    dx = X.component(x_key).diff(ell)
                    if dx.is_zero():
                        continue
                    total = total - ym * dx * weight
        if not total.is_zero():
            comps[key] = total * Fraction(1, _arrangements(cv))
    return SymTensor(dim, order, comps)


def lie_derivative(Y: SymTensor, X: SymTensor) -> SymTensor:
    """Lie derivative of X along the vector field Y, i.e. [Y, X]."""
    if Y.order != 1:
        raise ValueError("Lie derivative direction must be an order-1 tensor")
    return schouten_bracket(Y, X)


class GradedTensor:
    """Finite formal sum of SymTensors, keyed by order (zero parts absent)."""

    __slots__ = ("dim", "parts")

    def __init__(self, dim: int, parts: dict[int, SymTensor] | None = None):
        self.dim = dim
        clean: dict[int, SymTensor] = {}
        for order, tensor in (parts or {}).items():
            if tensor.order != order or tensor.dim != dim:
                raise ValueError("part order/dim inconsistent with key")
            if not tensor.is_zero():
                clean[order] = clean[order] + tensor if order in clean else tensor
                if clean[order].is_zero():
                    del clean[order]
        self.parts = clean

    @classmethod
    def zero(cls, dim: int) -> "GradedTensor":
        return cls(dim, {})

    @classmethod
    def from_tensor(cls, tensor: SymTensor) -> "GradedTensor":
        return cls(tensor.dim, {tensor.order: tensor})

    def part(self, order: int) -> SymTensor:
        return self.parts.get(order, SymTensor.zero(self.dim, order))

    def orders(self):
        return sorted(self.parts)

    def max_order(self) -> int:
        return max(self.parts, default=-1)

    def is_zero(self) -> bool:
        return not self.parts

    def __add__(self, other: "GradedTensor") -> "GradedTensor":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        parts = dict(self.parts)
        for order, tensor in other.parts.items():
            acc = parts.get(order, SymTensor.zero(self.dim, order)) + tensor
            if acc.is_zero():
                parts.pop(order, None)
            else:
                parts[order] = acc
        out = GradedTensor.__new__(GradedTensor)
        out.dim, out.parts = self.dim, parts
        return out

    def __neg__(self) -> "GradedTensor":
        out = GradedTensor.__new__(GradedTensor)
        out.dim = self.dim
        out.parts = {o: -t for o, t in self.parts.items()}
        return out

    def __sub__(self, other: "GradedTensor") -> "GradedTensor":
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, GradedTensor) and self.dim == other.dim and self.parts == other.parts

    def to_text(self) -> str:
        if not self.parts:
            return "0"
        return "; ".join(self.parts[o].to_text() for o in self.orders())

    def __repr__(self):
        return f"GradedTensor({self.to_text()})"


def schouten_graded(X: GradedTensor, Y: GradedTensor, order_cap: int = DEFAULT_ORDER_CAP) -> GradedTensor:
    """Bilinear extension of the Schouten concomitant, assembled by order."""
    if X.dim != Y.dim:
        raise ValueError("dimension mismatch")
    out = GradedTensor.zero(X.dim)
    for kx, tx in X.parts.items():
        for ky, ty in Y.parts.items():
            if kx == 0 and ky == 0:
                continue
            if kx + ky - 1 > order_cap:
                raise OrderCapError(
                    f"bracket of orders {kx}, {ky} exceeds order cap {order_cap}"
                )
            out = out + GradedTensor.from_tensor(schouten_bracket(tx, ty))
    return out


class SPair:
    """Element (sigma, Y) of the orders-{0,1} subalgebra: function + vector field."""

    __slots__ = ("sigma", "Y")

    def __init__(self, sigma: SymTensor, Y: SymTensor):
        if sigma.order != 0 or Y.order != 1:
            raise ValueError("SPair needs an order-0 and an order-1 tensor")
        if sigma.dim != Y.dim:
            raise ValueError("dimension mismatch")
        self.sigma = sigma
        self.Y = Y

    @classmethod
    def zero(cls, dim: int) -> "SPair":
        return cls(SymTensor.zero(dim, 0), SymTensor.zero(dim, 1))

    @property
    def dim(self) -> int:
        return self.sigma.dim

    def is_zero(self) -> bool:
        return self.sigma.is_zero() and self.Y.is_zero()

    def __add__(self, other: "SPair") -> "SPair":
        return SPair(self.sigma + other.sigma, self.Y + other.Y)

    def __neg__(self) -> "SPair":
        return SPair(-self.sigma, -self.Y)

    def __sub__(self, other: "SPair") -> "SPair":
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, SPair) and self.sigma == other.sigma and self.Y == other.Y

    def to_graded(self) -> GradedTensor:
        return GradedTensor(self.dim, {0: self.sigma, 1: self.Y})

    def __repr__(self):
        return f"SPair({self.sigma.to_text()} | {self.Y.to_text()})"


class NPart:
    """Element of the orders->=2 subalgebra, wrapped as a GradedTensor."""

    __slots__ = ("graded",)

    def __init__(self, graded: GradedTensor):
        if any(order < 2 for order in graded.parts):
            raise ValueError("NPart admits only parts of order >= 2")
        self.graded = graded

    @classmethod
    def zero(cls, dim: int) -> "NPart":
        return cls(GradedTensor.zero(dim))

    @property
    def dim(self) -> int:
        return self.graded.dim

    def part(self, order: int) -> SymTensor:
        return self.graded.part(order)

    def orders(self):
        return self.graded.orders()

    def is_zero(self) -> bool:
        return self.graded.is_zero()

    def __add__(self, other: "NPart") -> "NPart":
        return NPart(self.graded + other.graded)

    def __neg__(self) -> "NPart":
        return NPart(-self.graded)

    def __sub__(self, other: "NPart") -> "NPart":
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, NPart) and self.graded == other.graded

    def __repr__(self):
        return f"NPart({self.graded.to_text()})"


def split(X: GradedTensor) -> tuple[SPair, NPart]:
    """Project onto the direct sum: orders {0,1} -> SPair, orders >= 2 -> NPart."""
    s = SPair(X.part(0), X.part(1))
    n = NPart(GradedTensor(X.dim, {o: t for o, t in X.parts.items() if o >= 2}))
    return s, n


def embed(s: SPair, n: NPart) -> GradedTensor:
    """Inverse of split: reassemble the full graded tensor."""
    if s.dim != n.dim:
        raise ValueError("dimension mismatch")
    return s.to_graded() + n.graded


def act_left(Xn: NPart, s: SPair) -> SPair:
    """Left action of n on s: X |> (sigma, Y) = (0, [X^2, sigma]).

    Only the order-2 part contributes; brackets [X^k, sigma] with k >= 3
    land in n and belong to the right action.
    """
    if Xn.dim != s.dim:
        raise ValueError("dimension mismatch")
    x2 = Xn.part(2)
    return SPair(SymTensor.zero(s.dim, 0), schouten_bracket(x2, s.sigma))


def act_right(Xn: NPart, s: SPair) -> NPart:
    """Right action of s on n: X <| (sigma, Y) = sum_{k>=2} ([X^{k+1}, sigma] - L_Y X^k)."""
    if Xn.dim != s.dim:
        raise ValueError("dimension mismatch")
    out = GradedTensor.zero(s.dim)
    for order in Xn.orders():
        xk = Xn.part(order)
        if order >= 3:
            out = out + GradedTensor.from_tensor(schouten_bracket(xk, s.sigma))
        out = out - GradedTensor.from_tensor(lie_derivative(s.Y, xk))
    return NPart(out)


def bracket_s(a: SPair, b: SPair) -> SPair:
    """Semidirect bracket on s: [(eta, Z), (sigma, Y)] = (Z(sigma) - Y(eta), [Z, Y])."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    fn = schouten_bracket(a.Y, b.sigma) - schouten_bracket(b.Y, a.sigma)
    return SPair(fn, schouten_bracket(a.Y, b.Y))


def bracket_n(a: NPart, b: NPart, order_cap: int = DEFAULT_ORDER_CAP) -> NPart:
    """Schouten bracket restricted to n (closed: orders >= 2*2-1 = 3 >= 2)."""
    return NPart(schouten_graded(a.graded, b.graded, order_cap))


def double_cross_bracket(
    a: tuple[SPair, NPart], b: tuple[SPair, NPart], order_cap: int = DEFAULT_ORDER_CAP
) -> tuple[SPair, NPart]:
    """Double cross sum bracket on s (+) n.

    [(xi, eta), (xi', eta')] =
        ([xi, xi'] + eta |> xi' - eta' |> xi,
         [eta, eta'] + eta <| xi' - eta' <| xi).
    """
    xi, eta = a
    xi2, eta2 = b
    s_slot = bracket_s(xi, xi2) + act_left(eta, xi2) - act_left(eta2, xi)
    n_slot = bracket_n(eta, eta2, order_cap) + act_right(eta, xi2) - act_right(eta2, xi)
    return s_slot, n_slot


def compat_residuals(
    xi: SPair, xi2: SPair, eta: NPart, eta2: NPart, order_cap: int = DEFAULT_ORDER_CAP
) -> tuple[SPair, NPart]:
    """Left-minus-right residuals of the two matched-pair compatibility conditions.

    Condition 1 (in s):
        eta |> [xi, xi'] = [eta |> xi, xi'] + [xi, eta |> xi']
                           + (eta <| xi) |> xi' - (eta <| xi') |> xi
    Condition 2 (in n):
        [eta, eta'] <| xi = [eta, eta' <| xi] + [eta <| xi, eta']
                            + eta <| (eta' |> xi) - eta' <| (eta |> xi)

    Both residuals are exactly zero whenever (s, n) is a matched pair.
    """
    lhs1 = act_left(eta, bracket_s(xi, xi2))
    rhs1 = (
        bracket_s(act_left(eta, xi), xi2)
        + bracket_s(xi, act_left(eta, xi2))
        + act_left(act_right(eta, xi), xi2)
        - act_left(act_right(eta, xi2), xi)
    )
    lhs2 = act_right(bracket_n(eta, eta2, order_cap), xi)
    rhs2 = (
        bracket_n(eta, act_right(eta2, xi), order_cap)
        + bracket_n(act_right(eta, xi), eta2, order_cap)
        + act_right(eta, act_left(eta2, xi))
        - act_right(eta2, act_left(eta, xi))
    )
    return lhs1 - rhs1, lhs2 - rhs2
