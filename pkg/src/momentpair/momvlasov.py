"""Momentum formulation of the plasma: one-form fields dual to Hamiltonian fields.

A one-form Pi = Pi_q dq + Pi_p dp on the phase grid represents a momentum
variable whose physical content is the density f = div(Pi#), where
Pi# = Pi_p d/dq - Pi_q d/dp is the musical image under the symplectic form.
The Lie-Poisson operator J_LP realizes the coadjoint action of Hamiltonian
vector fields on one-forms; the momentum-Vlasov equations are its flow for
the single-particle energy, and they project onto the Vlasov equation
through div o #.

Sign convention: the evolution is fixed by requiring exactly that
intertwining, d/dt div(Pi#) = {h, div(Pi#)}; with the momentum equations
written below this holds with f = +div(Pi#).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kinetic
from .gridcore import GridFn, PhaseGrid, Scheme, ddp, ddq, moment_quad, quad_qp
from .kinetic import VlasovParams, moment_components, route_block


class PairingMismatchError(Exception):
    """Direct and divergence sides of the duality pairing disagree."""


class GaugeError(Exception):
    """No antiderivative-gauge representative exists for the requested divergence."""


@dataclass
class GridHamField:
    """Phase-grid vector field a d/dq + b d/dp, optionally with its Hamiltonian h."""

    a: GridFn
    b: GridFn
    h: GridFn | None = None

    def __post_init__(self):
        if self.a.grid != self.b.grid:
            raise ValueError("component grid mismatch")

    @property
    def grid(self) -> PhaseGrid:
        return self.a.grid

    def scale(self, c: float) -> "GridHamField":
        return GridHamField(self.a * c, self.b * c, None if self.h is None else self.h * c)

    def apply(self, g: GridFn, scheme_q: Scheme = Scheme.FOURIER) -> GridFn:
        """Directional derivative a dg/dq + b dg/dp."""
        return self.a * ddq(g, scheme_q) + self.b * ddp(g)


def hamfield_of(h: GridFn, scheme_q: Scheme = Scheme.FOURIER) -> GridHamField:
    """The literal Hamiltonian field X_h = (dh/dp) d/dq - (dh/dq) d/dp."""
    return GridHamField(ddp(h), -ddq(h, scheme_q), h)


class OneFormGrid:
    """One-form Pi = Pi_q dq + Pi_p dp on a phase grid."""

    __slots__ = ("Pi_q", "Pi_p")

    def __init__(self, Pi_q: GridFn, Pi_p: GridFn):
        if not Pi_q.is_phase or Pi_q.grid != Pi_p.grid:
            raise ValueError("components must share one phase grid")
        self.Pi_q = Pi_q
        self.Pi_p = Pi_p

    @classmethod
    def zeros(cls, grid: PhaseGrid) -> "OneFormGrid":
        return cls(GridFn.zeros(grid), GridFn.zeros(grid))

    @property
    def grid(self) -> PhaseGrid:
        return self.Pi_q.grid

    def __add__(self, other: "OneFormGrid") -> "OneFormGrid":
        return OneFormGrid(self.Pi_q + other.Pi_q, self.Pi_p + other.Pi_p)

    def __sub__(self, other: "OneFormGrid") -> "OneFormGrid":
        return OneFormGrid(self.Pi_q - other.Pi_q, self.Pi_p - other.Pi_p)

    def __mul__(self, c: float) -> "OneFormGrid":
        return OneFormGrid(self.Pi_q * c, self.Pi_p * c)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max(self.Pi_q.max_abs(), self.Pi_p.max_abs())

    def __repr__(self):
        return f"OneFormGrid(max|.|={self.max_abs():.3e})"


def sharp(Pi: OneFormGrid) -> tuple[GridFn, GridFn]:
    """Musical isomorphism: Pi# = Pi_p d/dq - Pi_q d/dp, returned as (vq, vp)."""
    return Pi.Pi_p, -1.0 * Pi.Pi_q


def div_sharp(Pi: OneFormGrid, scheme_q: Scheme = Scheme.FOURIER) -> GridFn:
    """div(Pi#) = d(Pi_p)/dq - d(Pi_q)/dp, the density carried by Pi."""
    return ddq(Pi.Pi_p, scheme_q) - ddp(Pi.Pi_q)


def pairing_direct(Pi: OneFormGrid, V: GridHamField) -> float:
    """Plain duality integral <V, Pi> = integral (Pi_q a + Pi_p b) dq dp."""
    return quad_qp(Pi.Pi_q * V.a + Pi.Pi_p * V.b)


def pairing_ham(Pi: OneFormGrid, Xh: GridHamField, scheme_q: Scheme = Scheme.FOURIER,
                tol: float = 1e-8) -> float:
    """Duality pairing <X_h, Pi> = integral (Pi_q a + Pi_p b) dq dp.

    Also evaluates the divergence side integral div(Pi#) h and raises
    PairingMismatchError when the two disagree beyond tol (relative): on
    periodic-in-q, decaying-in-p data they must coincide, so a gap flags a
    discretization misconfiguration (non-periodic or non-decaying input).
    """
    if Xh.h is None:
        raise ValueError("pairing_ham needs the generating function on the field")
    direct = pairing_direct(Pi, Xh)
    dvg = quad_qp(div_sharp(Pi, scheme_q) * Xh.h)
    scale = max(1.0, abs(direct), abs(dvg))
    if abs(direct - dvg) > tol * scale:
        raise PairingMismatchError(
            f"direct side {direct:.6e} vs divergence side {dvg:.6e}; "
            "input is not periodic in q or does not decay in p"
        )
    return direct


def j_lp_apply(Pi: OneFormGrid, V: GridHamField, scheme_q: Scheme = Scheme.FOURIER) -> OneFormGrid:
    """Lie-Poisson operator J_LP(Pi) applied to a Hamiltonian field V = (a, b).

    1D rows (all tensor indices equal):
        dq slot: -( 2 Pi_q a' + Pi_q' a + Pi_p b' + dPi_q/dp b + Pi_q db/dp )
        dp slot: -( Pi_q da/dp + dPi_p/dq a + Pi_p a' + 2 Pi_p db/dp + dPi_p/dp b )
    with ' = d/dq.  On divergence-free (Hamiltonian) arguments this equals
    ad*_V Pi.
    """
    if Pi.grid != V.grid:
        raise ValueError("grid mismatch")
    a, b = V.a, V.b
    dq_slot = (
        2.0 * Pi.Pi_q * ddq(a, scheme_q)
        + ddq(Pi.Pi_q, scheme_q) * a
        + Pi.Pi_p * ddq(b, scheme_q)
        + ddp(Pi.Pi_q) * b
        + Pi.Pi_q * ddp(b)
    )
    dp_slot = (
        Pi.Pi_q * ddp(a)
        + ddq(Pi.Pi_p, scheme_q) * a
        + Pi.Pi_p * ddq(a, scheme_q)
        + 2.0 * Pi.Pi_p * ddp(b)
        + ddp(Pi.Pi_p) * b
    )
    return OneFormGrid(dq_slot * (-1.0), dp_slot * (-1.0))


def momvlasov_rhs(
    Pi: OneFormGrid,
    params: VlasovParams,
    phi: GridFn | None = None,
    scheme_q: Scheme = Scheme.FOURIER,
) -> OneFormGrid:
    """Momentum-Vlasov evolution of the one-form:

        dPi_q/dt = -X_h(Pi_q) + e phi'' Pi_p
        dPi_p/dt = -X_h(Pi_p) - (1/m) Pi_q

    with X_h(g) = (p/m) dg/dq - e phi' dg/dp.  In self-consistent mode phi
    solves the Poisson equation for rho = integral div(Pi#) dp.
    """
    grid = Pi.grid
    if phi is None:
        if params.field_mode == "self_consistent":
            rho = moment_quad(div_sharp(Pi, scheme_q), 0)
            phi = kinetic.poisson_solve(rho, params)
        else:
            phi = params.prescribed_phi or GridFn.zeros(grid.spatial)
    phip = ddq(phi, scheme_q).values
    phipp = ddq(ddq(phi, scheme_q), scheme_q).values
    p = grid.p_nodes[None, :]

    def xh(g: GridFn) -> np.ndarray:
        return (p / params.m) * ddq(g, scheme_q).values - params.e * phip[:, None] * ddp(g).values

    dq_slot = -xh(Pi.Pi_q) + params.e * phipp[:, None] * Pi.Pi_p.values
    dp_slot = -xh(Pi.Pi_p) - Pi.Pi_q.values / params.m
    return OneFormGrid(GridFn(grid, dq_slot), GridFn(grid, dp_slot))


def vlasov_hamfields(grid: PhaseGrid, phi: GridFn, params: VlasovParams,
                     scheme_q: Scheme = Scheme.FOURIER) -> dict[int, GridHamField]:
    """Momentum-side variational slots: -e X_phi at degree 0, -(1/2m) X_{p^2} at 2."""
    phi_phase = GridFn(grid, np.broadcast_to(phi.values[:, None],
                                             (grid.spatial.Nq, grid.Np)).copy())
    p2 = GridFn(grid, np.broadcast_to(grid.p_nodes[None, :] ** 2,
                                      (grid.spatial.Nq, grid.Np)).copy())
    slot0 = hamfield_of(phi_phase, scheme_q).scale(-params.e)
    slot2 = hamfield_of(p2, scheme_q).scale(-1.0 / (2.0 * params.m))
    return {0: slot0, 2: slot2}


def _antiderivative_q(values: np.ndarray, L: float) -> np.ndarray:
    """Zero-mean q-antiderivative per p column (Fourier inversion of d/dq)."""
    n = values.shape[0]
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=L / n)
    fk = np.fft.rfft(values, axis=0)
    out = np.zeros_like(fk)
    out[1:] = fk[1:] / (1j * k[1:, None])
    return np.fft.irfft(out, n=n, axis=0)


def representative(target: GridFn, tol: float = 1e-10) -> OneFormGrid:
    """One-form with the prescribed divergence in the antiderivative gauge.

    Pi_q = 0 and Pi_p = (zero-mean q-antiderivative of target), so that
    div(Pi#) = target exactly.  Requires the target to have zero q-mean at
    every p; otherwise no such gauge representative exists.
    """
    grid = target.grid
    scale = max(1.0, target.max_abs())
    col_means = np.abs(target.values.mean(axis=0))
    if float(col_means.max()) > tol * scale:
        raise GaugeError(
            "target divergence has nonzero q-mean at some p; "
            "antiderivative gauge unavailable"
        )
    pi_p = _antiderivative_q(target.values, grid.spatial.L)
    return OneFormGrid(GridFn.zeros(grid), GridFn(grid, pi_p))


def split_pi(Pi: OneFormGrid, K: int) -> tuple[OneFormGrid, OneFormGrid, OneFormGrid]:
    """Moment split of a one-form through its divergence.

    The density div(Pi#) is decomposed through order K; the fluid and
    moment blocks are realized as gauge representatives with the prescribed
    divergences, and the residual one-form Pi - Pi_s - Pi_n closes the
    reconstruction exactly.  Properties are asserted on divergences; gauge
    representatives themselves are not unique.
    """
    g_s, g_n, _ = kinetic.decompose_f(div_sharp(Pi), K)
    Pi_s = representative(g_s)
    Pi_n = representative(g_n)
    return Pi_s, Pi_n, Pi - Pi_s - Pi_n


def matched_momvlasov_rhs(
    Pi_s: OneFormGrid,
    Pi_n: OneFormGrid,
    slots: dict[int, GridHamField],
    K: int,
    scheme_q: Scheme = Scheme.FOURIER,
) -> tuple[OneFormGrid, OneFormGrid]:
    """Matched momentum-Vlasov evolution on the split (Pi_s, Pi_n).

    Every term is -J_LP(Pi^(l))(slot_j) with Pi^(l) the gauge representative
    of the order-l component of the block divergence; terms are routed to
    the fluid or moment block exactly as in the density picture, and the
    one-form remainders of each block ride along with their own block.  The
    divergences of the two outputs sum to the divergence of the unsplit
    right-hand side.
    """
    grid = Pi_s.grid
    comps_s, _ = moment_components(div_sharp(Pi_s, scheme_q), 1)
    comps_n, _ = moment_components(div_sharp(Pi_n, scheme_q), K)
    pieces: list[tuple[int | None, str, OneFormGrid]] = []
    rep_s = [representative(c) for c in comps_s[:2]]
    pieces.extend([(0, "s", rep_s[0]), (1, "s", rep_s[1])])
    pieces.append((None, "s", Pi_s - rep_s[0] - rep_s[1]))
    # The order-0/1 shards of the n-block divergence are moment-silent; they
    # stay inside the block remainder so the pieces sum to Pi_n exactly.
    rest_n = Pi_n
    for ell in range(2, K + 1):
        rep = representative(comps_n[ell])
        pieces.append((ell, "n", rep))
        rest_n = rest_n - rep
    pieces.append((None, "n", rest_n))
    d_s = OneFormGrid.zeros(grid)
    d_n = OneFormGrid.zeros(grid)
    for j, slot in sorted(slots.items()):
        if slot is None:
            continue
        for ell, home, form in pieces:
            if form.max_abs() == 0.0:
                continue
            term = j_lp_apply(form, slot, scheme_q) * (-1.0)
            side = route_block(ell, j) if ell is not None else home
            if side == "s":
                d_s = d_s + term
            else:
                d_n = d_n + term
    return d_s, d_n


def intertwine_check(
    Pi: OneFormGrid,
    params: VlasovParams,
    phi: GridFn | None = None,
    scheme_q: Scheme = Scheme.FOURIER,
) -> float:
    """Relative L2 gap between the two routes onto the density evolution:

        div((dPi/dt)#)  vs  Vlasov RHS applied to div(Pi#).

    The continuum identity makes this vanish; discretely it decays at the
    scheme order under refinement.
    """
    if phi is None and params.field_mode == "prescribed":
        phi = params.prescribed_phi or GridFn.zeros(Pi.grid.spatial)
    if phi is None:
        rho = moment_quad(div_sharp(Pi, scheme_q), 0)
        phi = kinetic.poisson_solve(rho, params)
    lhs = div_sharp(momvlasov_rhs(Pi, params, phi, scheme_q), scheme_q)
    rhs = kinetic.vlasov_rhs_f(div_sharp(Pi, scheme_q), phi, params, scheme_q)
    denom = float(np.linalg.norm(rhs.values))
    if denom == 0.0:
        return float(np.linalg.norm(lhs.values))
    return float(np.linalg.norm(lhs.values - rhs.values)) / denom
