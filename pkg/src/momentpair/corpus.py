"""Reproducible random corpora for the identity suites.

Randomness comes from an explicit 64-bit linear congruential generator
(Knuth's MMIX constants) rather than a library RNG, so the corpora are
bit-reproducible from the seed across platforms and implementations; the
constants are echoed into every run manifest.
"""

from __future__ import annotations

import numpy as np

from .exactpoly import Fraction, Poly, all_monomials
from .gridcore import GridFn, PhaseGrid, SpatialGrid
from .schouten import GradedTensor, NPart, SPair, SymTensor, _sorted_keys

LCG_MULT = 6364136223846793005
LCG_INC = 1442695040888963407
LCG_MOD = 2**64


class Lcg64:
    """x -> (a x + c) mod 2^64; top 32 bits feed the derived draws."""

    def __init__(self, seed: int):
        self.state = seed % LCG_MOD

    def next_u64(self) -> int:
        self.state = (LCG_MULT * self.state + LCG_INC) % LCG_MOD
        return self.state

    def next_int(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (inclusive)."""
        span = hi - lo + 1
        return lo + (self.next_u64() >> 32) % span

    def next_fraction(self, max_abs_num: int = 3, max_den: int = 3) -> Fraction:
        num = self.next_int(-max_abs_num, max_abs_num)
        den = self.next_int(1, max_den)
        return Fraction(num, den)

    def next_unit(self) -> float:
        """Float in [-1, 1)."""
        return (self.next_u64() >> 11) / 2**53 * 2.0 - 1.0


# ---------------------------------------------------------------------------
# exact-layer corpora


def random_poly(rng: Lcg64, dim: int, max_degree: int = 3, terms: int = 2) -> Poly:
    pool = all_monomials(dim, max_degree)
    out = Poly.zero(dim)
    for _ in range(terms):
        expo = pool[rng.next_int(0, len(pool) - 1)]
        out = out + Poly.monomial(dim, expo, rng.next_fraction())
    return out


def random_symtensor(rng: Lcg64, dim: int, order: int, max_degree: int = 3,
                     terms: int = 2) -> SymTensor:
    keys = _sorted_keys(dim, order)
    comps = {}
    for key in keys:
        if rng.next_int(0, 2) == 0 and len(comps) > 0:
            continue
        comps[key] = random_poly(rng, dim, max_degree, terms)
    return SymTensor(dim, order, comps)


def random_graded(rng: Lcg64, dim: int, max_order: int = 4, parts: int = 2) -> GradedTensor:
    """Random graded tensor; high orders get low-degree coefficients to keep
    the exact suites fast (degree cap 3 below order 3, else 1)."""
    out = GradedTensor.zero(dim)
    for _ in range(parts):
        order = rng.next_int(0, max_order)
        degree = 3 if order <= 2 else 1
        out = out + GradedTensor.from_tensor(random_symtensor(rng, dim, order, degree))
    return out


def random_spair(rng: Lcg64, dim: int, max_degree: int = 3) -> SPair:
    return SPair(
        random_symtensor(rng, dim, 0, max_degree),
        random_symtensor(rng, dim, 1, max_degree),
    )


def random_npart(rng: Lcg64, dim: int, max_order: int = 4) -> NPart:
    out = GradedTensor.zero(dim)
    for _ in range(2):
        order = rng.next_int(2, max_order)
        degree = 3 if order <= 2 else 1
        out = out + GradedTensor.from_tensor(random_symtensor(rng, dim, order, degree))
    return NPart(out)


# ---------------------------------------------------------------------------
# grid corpora (band-limited trigonometric data)


def random_trig(rng: Lcg64, grid: SpatialGrid, kmax: int = 3, amp: float = 1.0,
                mean: float = 0.0) -> GridFn:
    """Band-limited field mean + sum_{k<=kmax} a_k cos + b_k sin on the grid."""
    q = grid.nodes
    vals = np.full(grid.Nq, float(mean))
    for k in range(1, kmax + 1):
        w = 2.0 * np.pi * k / grid.L
        vals += amp * rng.next_unit() * np.cos(w * q)
        vals += amp * rng.next_unit() * np.sin(w * q)
    return GridFn(grid, vals)


def random_phase_decaying(rng: Lcg64, grid: PhaseGrid, kmax: int = 2,
                          pdeg: int = 2, amp: float = 1.0) -> GridFn:
    """Trig(q) x (polynomial in p) x Gaussian(p): smooth, periodic, decaying."""
    vals = np.zeros((grid.spatial.Nq, grid.Np))
    p = grid.p_nodes[None, :]
    envelope = np.exp(-0.5 * p**2)
    for d in range(pdeg + 1):
        coef = random_trig(rng, grid.spatial, kmax, amp).values[:, None]
        vals += coef * p**d
    return GridFn(grid, vals * envelope)


def random_phase_polyp(rng: Lcg64, grid: PhaseGrid, kmax: int = 2, pdeg: int = 2,
                       amp: float = 1.0) -> GridFn:
    """Trig(q) x low-degree polynomial in p (no decay): generator-side data.

    With p-degree <= 4 every FD4 p-derivative of these fields is exact, so
    they make clean Hamiltonian generators for adjointness tests.
    """
    vals = np.zeros((grid.spatial.Nq, grid.Np))
    p = grid.p_nodes[None, :]
    for d in range(pdeg + 1):
        coef = random_trig(rng, grid.spatial, kmax, amp).values[:, None]
        vals += coef * p**d
    return GridFn(grid, vals)
