"""Covariant moment fields on the spatial grid and their Lie-Poisson dynamics.

In one spatial dimension every tensor contraction degenerates to a pointwise
product, and the basic operators on an order-(m+k-1) moment A and an
order-k contravariant field X read

    A (star) X = m A X',      X (ast) A = k X A',
    L_X A      = A (star) X + X (ast) A,      div X = k X'.

On top of these sit the coadjoint action of the full graded algebra, its
matched-pair decomposition into the fluid block (rho, M) and the order->=2
block, the moment evolution equations with closure by truncation at K, the
compressible-fluid (Euler) subdynamics, and an RK4 stepper.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gridcore import GridFn, Scheme, SpatialGrid, ddq, quad_q


class TruncationReport:
    """Collects every hierarchy term dropped because it references A_{>K}."""

    def __init__(self):
        self.entries: list[str] = []

    def add(self, target_order: int, slot_order: int, needed: int, K: int):
        self.entries.append(
            f"d/dt A_{target_order}: slot order {slot_order} needs A_{needed} > K={K}; treated as 0"
        )

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        if not self.entries:
            return "no truncated terms"
        return "\n".join(self.entries)


class MomentState:
    """Moments (rho, M, A_2..A_K) on one spatial grid; K >= 2."""

    __slots__ = ("rho", "M", "A", "K")

    def __init__(self, rho: GridFn, M: GridFn, A: list[GridFn]):
        if rho.is_phase or M.is_phase or any(a.is_phase for a in A):
            raise ValueError("moment fields live on the spatial grid")
        if not A:
            raise ValueError("need at least A_2 (K >= 2)")
        grids = {rho.grid, M.grid, *[a.grid for a in A]}
        if len(grids) != 1:
            raise ValueError("all moment fields must share one grid")
        self.rho = rho
        self.M = M
        self.A = list(A)
        self.K = len(A) + 1

    @classmethod
    def zeros(cls, grid: SpatialGrid, K: int) -> "MomentState":
        if K < 2:
            raise ValueError("K >= 2 required")
        return cls(GridFn.zeros(grid), GridFn.zeros(grid), [GridFn.zeros(grid) for _ in range(K - 1)])

    @property
    def grid(self) -> SpatialGrid:
        return self.rho.grid

    def order(self, m: int) -> GridFn:
        """A_m with A_0 = rho, A_1 = M; orders beyond K are zero."""
        if m == 0:
            return self.rho
        if m == 1:
            return self.M
        if 2 <= m <= self.K:
            return self.A[m - 2]
        return GridFn.zeros(self.grid)

    def __add__(self, other: "MomentState") -> "MomentState":
        return MomentState(self.rho + other.rho, self.M + other.M,
                           [a + b for a, b in zip(self.A, other.A)])

    def __sub__(self, other: "MomentState") -> "MomentState":
        return MomentState(self.rho - other.rho, self.M - other.M,
                           [a - b for a, b in zip(self.A, other.A)])

    def __mul__(self, c: float) -> "MomentState":
        return MomentState(self.rho * c, self.M * c, [a * c for a in self.A])

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max([self.rho.max_abs(), self.M.max_abs()] + [a.max_abs() for a in self.A])

    def __repr__(self):
        return f"MomentState(K={self.K}, max|.|={self.max_abs():.3e})"


class ContraField:
    """Grid samples of a graded contravariant field, one spatial field per order.

    Also carries the variational data dH/dA_k of a moment Hamiltonian: slot 0
    is dH/drho, slot 1 is dH/dM, slot k >= 2 is dH/dA_k.  Missing or None
    slots are zero.
    """

    __slots__ = ("grid", "slots")

    def __init__(self, grid: SpatialGrid, slots: dict[int, GridFn]):
        self.grid = grid
        clean: dict[int, GridFn] = {}
        for order, f in slots.items():
            if f is None:
                continue
            if f.is_phase or f.grid != grid:
                raise ValueError("ContraField slots must be spatial fields on the shared grid")
            if order < 0:
                raise ValueError("orders are >= 0")
            clean[order] = f
        self.slots = clean

    @classmethod
    def zero(cls, grid: SpatialGrid) -> "ContraField":
        return cls(grid, {})

    def order(self, k: int) -> GridFn | None:
        return self.slots.get(k)

    def orders(self):
        return sorted(self.slots)

    def max_order(self) -> int:
        return max(self.slots, default=-1)

    def s_part(self) -> "ContraField":
        return ContraField(self.grid, {k: f for k, f in self.slots.items() if k <= 1})

    def n_part(self) -> "ContraField":
        return ContraField(self.grid, {k: f for k, f in self.slots.items() if k >= 2})


# ---------------------------------------------------------------------------
# pointwise operator vocabulary (1D)


def star(A: GridFn, X: GridFn, m: int, scheme: Scheme = Scheme.FOURIER) -> GridFn:
    """A (star) X = m A X' for an order-m result slot."""
    if m < 0:
        raise ValueError("m >= 0 required")
    if m == 0:
        return GridFn.zeros(A.grid)
    return m * A * ddq(X, scheme)


def ast(X: GridFn, A: GridFn, k: int, scheme: Scheme = Scheme.FOURIER) -> GridFn:
    """X (ast) A = k X A' for an order-k field X."""
    if k < 0:
        raise ValueError("k >= 0 required")
    if k == 0:
        return GridFn.zeros(A.grid)
    return k * X * ddq(A, scheme)


def gen_lie(X: GridFn, A: GridFn, k: int, m: int, scheme: Scheme = Scheme.FOURIER) -> GridFn:
    """L_X A = A (star) X + X (ast) A; the ordinary Lie derivative at k = 1."""
    return star(A, X, m, scheme) + ast(X, A, k, scheme)


def div_tensor(X: GridFn, k: int, scheme: Scheme = Scheme.FOURIER) -> GridFn:
    """div X = k X'; zero for order 0."""
    if k < 0:
        raise ValueError("k >= 0 required")
    if k == 0:
        return GridFn.zeros(X.grid)
    return k * ddq(X, scheme)


def grid_schouten(X: GridFn, k: int, Y: GridFn, m: int, scheme: Scheme = Scheme.FOURIER) -> GridFn:
    """1D Schouten bracket of grid fields: [X^k, Y^m] = k X Y' - m Y X'.

    With the Fourier scheme on band-limited trig data this is the exact
    bracket to roundoff; it serves as the independent oracle for the
    coadjoint adjointness tests (exact polynomial coefficients are not
    periodic, so the symbolic layer cannot supply grid oracles directly).
    """
    if k == 0 and m == 0:
        return GridFn.zeros(X.grid)
    out = GridFn.zeros(X.grid)
    if k > 0:
        out = out + k * X * ddq(Y, scheme)
    if m > 0:
        out = out - m * Y * ddq(X, scheme)
    return out


# ---------------------------------------------------------------------------
# coadjoint action, direct assembly


def _term(X_k: GridFn, k: int, A_in: GridFn, m: int, scheme: Scheme) -> GridFn:
    """L_{X^k} A_{m+k-1} + div X^k . A_{m+k-1}, the order-m output block."""
    return gen_lie(X_k, A_in, k, m, scheme) + div_tensor(X_k, k, scheme) * A_in


def coad_full(
    X: ContraField,
    S: MomentState,
    scheme: Scheme = Scheme.FOURIER,
    report: TruncationReport | None = None,
) -> MomentState:
    """Coadjoint action ad*_X A of the full graded field on the moment state.

        (ad*_X A)_0 = sum_{k>=1} ( X^k (ast) A_{k-1} + div X^k . A_{k-1} )
        (ad*_X A)_m = sum_{k>=0} ( L_{X^k} A_{m+k-1} + div X^k . A_{k+m-1} ),  m >= 1

    Terms whose input order m+k-1 exceeds K are closure-truncated (zero) and
    recorded in the report when one is supplied.
    """
    if X.grid != S.grid:
        raise ValueError("grid mismatch")
    K = S.K
    out = MomentState.zeros(S.grid, K)
    rho_dot = GridFn.zeros(S.grid)
    for k in X.orders():
        if k < 1:
            continue
        xk = X.order(k)
        if k - 1 > K:
            if report is not None:
                report.add(0, k, k - 1, K)
            continue
        a_in = S.order(k - 1)
        rho_dot = rho_dot + ast(xk, a_in, k, scheme) + div_tensor(xk, k, scheme) * a_in
    slots = [rho_dot]
    for m in range(1, K + 1):
        acc = GridFn.zeros(S.grid)
        for k in X.orders():
            xk = X.order(k)
            needed = m + k - 1
            if needed > K:
                if report is not None:
                    report.add(m, k, needed, K)
                continue
            acc = acc + _term(xk, k, S.order(needed), m, scheme)
        slots.append(acc)
    return MomentState(slots[0], slots[1], slots[2:])


# ---------------------------------------------------------------------------
# matched-pair building blocks


def coad_s(sigma: GridFn | None, Y: GridFn | None, rho: GridFn, M: GridFn,
           scheme: Scheme = Scheme.FOURIER) -> tuple[GridFn, GridFn]:
    """ad* of the fluid block on itself: (L_Y rho + rho div Y, rho dsigma + L_Y M + div Y M)."""
    grid = rho.grid
    zero = GridFn.zeros(grid)
    rho_dot, m_dot = zero, zero
    if Y is not None:
        rho_dot = ast(Y, rho, 1, scheme) + div_tensor(Y, 1, scheme) * rho
        m_dot = gen_lie(Y, M, 1, 1, scheme) + div_tensor(Y, 1, scheme) * M
    if sigma is not None:
        m_dot = m_dot + star(rho, sigma, 1, scheme)
    return rho_dot, m_dot


def dual_right(S_s: tuple[GridFn, GridFn], Xn: ContraField,
               scheme: Scheme = Scheme.FOURIER) -> tuple[GridFn, GridFn]:
    """(rho, M) <|* X = (-X^2 (ast) M - div X^2 . M, 0); only X^2 enters."""
    rho, M = S_s
    zero = GridFn.zeros(M.grid)
    x2 = Xn.order(2)
    if x2 is None:
        return zero, zero
    return -(ast(x2, M, 2, scheme) + div_tensor(x2, 2, scheme) * M), zero


def dual_left(sigma: GridFn | None, Y: GridFn | None, An: list[GridFn], K: int,
              scheme: Scheme = Scheme.FOURIER) -> list[GridFn]:
    """(sigma, Y) |>* A on the order->=2 block.

    Slot 2: L_Y A_2 + div Y . A_2; slot m >= 3 additionally A_{m-1} (star) sigma.
    """
    if not An:
        return []
    grid = An[0].grid
    out = []
    for m in range(2, K + 1):
        a_m = An[m - 2]
        acc = GridFn.zeros(grid)
        if Y is not None:
            acc = gen_lie(Y, a_m, 1, m, scheme) + div_tensor(Y, 1, scheme) * a_m
        if sigma is not None and m >= 3:
            acc = acc + star(An[m - 3], sigma, m, scheme)
        out.append(acc)
    return out


def b_star(sigma: GridFn | None, S_s: tuple[GridFn, GridFn], K: int,
           scheme: Scheme = Scheme.FOURIER) -> list[GridFn]:
    """b*_(sigma,Y)(rho, M) = M (star) sigma, landing in the order-2 slot."""
    _, M = S_s
    out = [GridFn.zeros(M.grid) for _ in range(K - 1)]
    if sigma is not None:
        out[0] = star(M, sigma, 2, scheme)
    return out


def a_star(Xn: ContraField, An: list[GridFn], K: int,
           scheme: Scheme = Scheme.FOURIER) -> tuple[GridFn, GridFn]:
    """a*_X A = (-sum_{k>=2} X^{k+1}-transport of A_k, -sum_{k>=2} L_{X^k}-transport of A_k)."""
    grid = Xn.grid
    rho_dot = GridFn.zeros(grid)
    m_dot = GridFn.zeros(grid)
    for k in range(2, K + 1):
        a_k = An[k - 2] if k - 2 < len(An) else None
        if a_k is None:
            continue
        x_next = Xn.order(k + 1)
        if x_next is not None:
            rho_dot = rho_dot - (ast(x_next, a_k, k + 1, scheme) + div_tensor(x_next, k + 1, scheme) * a_k)
        x_k = Xn.order(k)
        if x_k is not None:
            m_dot = m_dot - _term(x_k, k, a_k, 1, scheme)
    return rho_dot, m_dot


def coad_n(Xn: ContraField, An: list[GridFn], K: int,
           scheme: Scheme = Scheme.FOURIER,
           report: TruncationReport | None = None) -> list[GridFn]:
    """ad* of the order->=2 block on its own dual, truncated at K."""
    grid = Xn.grid
    out = []
    for m in range(2, K + 1):
        acc = GridFn.zeros(grid)
        for k in range(2, Xn.max_order() + 1):
            x_k = Xn.order(k)
            if x_k is None:
                continue
            needed = m + k - 1
            if needed > K:
                if report is not None:
                    report.add(m, k, needed, K)
                continue
            acc = acc + _term(x_k, k, An[needed - 2], m, scheme)
        out.append(acc)
    return out


def matched_coadjoint(
    s: tuple[GridFn | None, GridFn | None],
    Xn: ContraField,
    S: MomentState,
    scheme: Scheme = Scheme.FOURIER,
    report: TruncationReport | None = None,
) -> MomentState:
    """Coadjoint action assembled through the matched-pair decomposition.

    Fluid block:   ad*_(sigma,Y)(rho,M) - (rho,M) <|* X - a*_X A
    Moment block:  ad*_X A + (sigma,Y) |>* A + b*_(sigma,Y)(rho,M)

    Uses the same pointwise primitives as coad_full, assembled along the
    decomposition; the two agree pointwise to roundoff.
    """
    sigma, Y = s
    K = S.K
    rho_s, m_s = coad_s(sigma, Y, S.rho, S.M, scheme)
    rho_r, m_r = dual_right((S.rho, S.M), Xn, scheme)
    rho_a, m_a = a_star(Xn, S.A, K, scheme)
    rho_dot = rho_s - rho_r - rho_a
    m_dot = m_s - m_r - m_a
    nn = coad_n(Xn, S.A, K, scheme, report)
    dl = dual_left(sigma, Y, S.A, K, scheme)
    bs = b_star(sigma, (S.rho, S.M), K, scheme)
    A_dot = [a + b + c for a, b, c in zip(nn, dl, bs)]
    return MomentState(rho_dot, m_dot, A_dot)


def lp_rhs(
    H: ContraField,
    S: MomentState,
    scheme: Scheme = Scheme.FOURIER,
    report: TruncationReport | None = None,
) -> MomentState:
    """Moment evolution d/dt A = -ad*_{dH/dA} A, hierarchy truncated at K.

    H carries the variational slots (dH/drho, dH/dM, dH/dA_k).  Every term
    that would read a moment above K is dropped and recorded in the report.
    """
    return matched_coadjoint(
        (H.order(0), H.order(1)), H.n_part(), S, scheme, report
    ) * (-1.0)


def n_rhs(H: ContraField, An: list[GridFn], K: int,
          scheme: Scheme = Scheme.FOURIER,
          report: TruncationReport | None = None) -> list[GridFn]:
    """Order->=2 subdynamics: dA_m/dt = -sum_{k>=2} transport of A_{m+k-1}."""
    return [g * (-1.0) for g in coad_n(H.n_part(), An, K, scheme, report)]


# ---------------------------------------------------------------------------
# compressible isentropic fluid (Euler) subdynamics


@dataclass
class FluidHamiltonian:
    """Internal-energy closure w(rho) with derivative, for H = 1/2 int M^2/rho + int rho w."""

    w: callable
    w_prime: callable

    def enthalpy(self, rho: np.ndarray) -> np.ndarray:
        return rho * self.w_prime(rho) + self.w(rho)

    def pressure(self, rho: np.ndarray) -> np.ndarray:
        return rho**2 * self.w_prime(rho)


def polytropic(kappa: float = 1.0, gamma: float = 2.0) -> FluidHamiltonian:
    """w(rho) = kappa rho^(gamma-1)/(gamma-1), giving pressure p = kappa rho^gamma."""
    if gamma <= 1:
        raise ValueError("gamma > 1 required")
    return FluidHamiltonian(
        w=lambda rho: kappa * rho ** (gamma - 1.0) / (gamma - 1.0),
        w_prime=lambda rho: kappa * rho ** (gamma - 2.0),
    )


def euler_variational(
    H: FluidHamiltonian, rho: GridFn, M: GridFn, bernoulli_half_factor: bool = False
) -> tuple[GridFn, GridFn]:
    """Variational fields (sigma, Y) of the fluid Hamiltonian.

    Y = M/rho always.  sigma = -c M^2/rho^2 + r(rho) with the enthalpy
    r = rho w' + w; c = 1 reproduces the printed Bernoulli relation, while
    the flag switches to c = 1/2 (the actual variational derivative of the
    kinetic term, and the choice under which the standard-form Euler
    residual closes; see the standard-form test).
    """
    if np.any(rho.values <= 0):
        raise ValueError("density must be positive everywhere")
    c = 0.5 if bernoulli_half_factor else 1.0
    Y = M / rho
    sigma = GridFn(rho.grid, -c * M.values**2 / rho.values**2 + H.enthalpy(rho.values))
    return sigma, Y


def euler_rhs(
    H: FluidHamiltonian,
    rho: GridFn,
    M: GridFn,
    scheme: Scheme = Scheme.FOURIER,
    bernoulli_half_factor: bool = False,
) -> tuple[GridFn, GridFn]:
    """Fluid block of the moment hierarchy restricted to A = 0:

        rho_dot = -(L_Y rho + rho div Y),
        M_dot   = -(rho dsigma + L_Y M + div Y M).
    """
    sigma, Y = euler_variational(H, rho, M, bernoulli_half_factor)
    rho_dot, m_dot = coad_s(sigma, Y, rho, M, scheme)
    return rho_dot * (-1.0), m_dot * (-1.0)


# ---------------------------------------------------------------------------
# time stepping


def _tree_add(a, b):
    if isinstance(a, tuple):
        return tuple(_tree_add(x, y) for x, y in zip(a, b))
    if isinstance(a, list):
        return [_tree_add(x, y) for x, y in zip(a, b)]
    return a + b


def _tree_scale(c, a):
    if isinstance(a, tuple):
        return tuple(_tree_scale(c, x) for x in a)
    if isinstance(a, list):
        return [_tree_scale(c, x) for x in a]
    return a * c


def _tree_check(a, context: str):
    if isinstance(a, (tuple, list)):
        for x in a:
            _tree_check(x, context)
        return
    if isinstance(a, MomentState):
        _tree_check([a.rho, a.M, *a.A], context)
        return
    if hasattr(a, "Pi_q"):  # one-form states from the momentum layer
        _tree_check([a.Pi_q, a.Pi_p], context)
        return
    values = a.values if isinstance(a, GridFn) else np.asarray(a)
    if not np.all(np.isfinite(values)):
        raise RuntimeError(f"NaN/Inf detected {context}")


def rk4_step(rhs, state, dt: float):
    """Classical four-stage Runge-Kutta step on GridFn/MomentState/tuple states."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    k1 = rhs(state)
    k2 = rhs(_tree_add(state, _tree_scale(0.5 * dt, k1)))
    k3 = rhs(_tree_add(state, _tree_scale(0.5 * dt, k2)))
    k4 = rhs(_tree_add(state, _tree_scale(dt, k3)))
    incr = _tree_add(_tree_add(k1, _tree_scale(2.0, k2)), _tree_add(_tree_scale(2.0, k3), k4))
    out = _tree_add(state, _tree_scale(dt / 6.0, incr))
    _tree_check(out, f"after RK4 step (dt={dt})")
    return out


def total_mass(rho: GridFn) -> float:
    return quad_q(rho)


def fluid_energy(H: FluidHamiltonian, rho: GridFn, M: GridFn) -> float:
    """H(rho, M) = 1/2 int M^2/rho dq + int rho w(rho) dq."""
    kin = 0.5 * quad_q(GridFn(rho.grid, M.values**2 / rho.values))
    pot = quad_q(GridFn(rho.grid, rho.values * H.w(rho.values)))
    return kin + pot
