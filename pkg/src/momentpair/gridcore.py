"""1D periodic spatial grid, truncated momentum grid, and grid calculus.

Spatial fields live on q_j = j L/Nq (periodic); phase fields on the tensor
grid (q_j, p_i) with p uniform on [-Pmax, Pmax].  Derivatives are 4th-order
centered differences (one-sided closure at the p boundaries) or Fourier in
q; quadratures are the rectangle rule in q and the trapezoid rule in p.
Reductions use numpy's fixed left-to-right summation, so results do not
depend on any threading configuration.
"""

from __future__ import annotations

import enum

import numpy as np

from .exactpoly import Poly
from .phasealg import PhasePoly
from .schouten import GradedTensor, SymTensor


class Scheme(enum.Enum):
    FD4 = "FD4"
    FOURIER = "Fourier"

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise ValueError(f"unknown scheme {text!r} (expected FD4 or Fourier)")


class SpatialGrid:
    """Periodic grid on [0, L) with Nq equispaced nodes."""

    __slots__ = ("L", "Nq", "nodes", "dq")

    def __init__(self, L: float, Nq: int):
        if Nq < 8:
            raise ValueError("Nq must be >= 8")
        if L <= 0:
            raise ValueError("L must be positive")
        self.L = float(L)
        self.Nq = int(Nq)
        self.dq = self.L / self.Nq
        self.nodes = np.arange(self.Nq) * self.dq

    def __eq__(self, other):
        return isinstance(other, SpatialGrid) and self.L == other.L and self.Nq == other.Nq

    def __hash__(self):
        return hash((self.L, self.Nq))

    def __repr__(self):
        return f"SpatialGrid(L={self.L}, Nq={self.Nq})"


class PhaseGrid:
    """Spatial grid times a truncated momentum interval [-Pmax, Pmax]."""

    __slots__ = ("spatial", "Pmax", "Np", "p_nodes", "dp")

    def __init__(self, spatial: SpatialGrid, Pmax: float, Np: int):
        if Np < 16:
            raise ValueError("Np must be >= 16")
        if Pmax <= 0:
            raise ValueError("Pmax must be positive")
        self.spatial = spatial
        self.Pmax = float(Pmax)
        self.Np = int(Np)
        self.p_nodes = np.linspace(-self.Pmax, self.Pmax, self.Np)
        self.dp = self.p_nodes[1] - self.p_nodes[0]

    def meshes(self):
        """(Q, P) arrays of shape (Nq, Np)."""
        return np.meshgrid(self.spatial.nodes, self.p_nodes, indexing="ij")

    def __eq__(self, other):
        return (
            isinstance(other, PhaseGrid)
            and self.spatial == other.spatial
            and self.Pmax == other.Pmax
            and self.Np == other.Np
        )

    def __hash__(self):
        return hash((self.spatial, self.Pmax, self.Np))

    def __repr__(self):
        return f"PhaseGrid({self.spatial!r}, Pmax={self.Pmax}, Np={self.Np})"


class GridFn:
    """Real field on a SpatialGrid (shape (Nq,)) or PhaseGrid (shape (Nq, Np))."""

    __slots__ = ("grid", "values")

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=float)
        if isinstance(grid, SpatialGrid):
            expected = (grid.Nq,)
        elif isinstance(grid, PhaseGrid):
            expected = (grid.spatial.Nq, grid.Np)
        else:
            raise TypeError("grid must be SpatialGrid or PhaseGrid")
        if values.shape != expected:
            raise ValueError(f"values shape {values.shape} != grid shape {expected}")
        if not np.all(np.isfinite(values)):
            raise ValueError("GridFn values must be finite")
        self.grid = grid
        self.values = values

    @classmethod
    def zeros(cls, grid) -> "GridFn":
        shape = (grid.Nq,) if isinstance(grid, SpatialGrid) else (grid.spatial.Nq, grid.Np)
        return cls(grid, np.zeros(shape))

    @property
    def is_phase(self) -> bool:
        return isinstance(self.grid, PhaseGrid)

    def copy(self) -> "GridFn":
        return GridFn(self.grid, self.values.copy())

    def _check(self, other: "GridFn"):
        if self.grid != other.grid:
            raise ValueError("grid mismatch")

    def __add__(self, other):
        if isinstance(other, GridFn):
            self._check(other)
            return GridFn(self.grid, self.values + other.values)
        return GridFn(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFn):
            self._check(other)
            return GridFn(self.grid, self.values - other.values)
        return GridFn(self.grid, self.values - other)

    def __rsub__(self, other):
        return GridFn(self.grid, other - self.values)

    def __mul__(self, other):
        if isinstance(other, GridFn):
            self._check(other)
            return GridFn(self.grid, self.values * other.values)
        return GridFn(self.grid, self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GridFn):
            self._check(other)
            return GridFn(self.grid, self.values / other.values)
        return GridFn(self.grid, self.values / other)

    def __neg__(self):
        return GridFn(self.grid, -self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def __repr__(self):
        kind = "phase" if self.is_phase else "spatial"
        return f"GridFn({kind}, max|.|={self.max_abs():.3e})"


# ---------------------------------------------------------------------------
# derivatives


def _fd4_periodic(values: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    def sh(k):
        return np.roll(values, -k, axis=axis)

    return (8.0 * (sh(1) - sh(-1)) - (sh(2) - sh(-2))) / (12.0 * h)


def _fourier_deriv(values: np.ndarray, L: float, axis: int = 0) -> np.ndarray:
    n = values.shape[axis]
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=L / n)
    fk = np.fft.rfft(values, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = k.size
    return np.fft.irfft(fk * (1j * k).reshape(shape), n=n, axis=axis)


# One-sided 4th-order first-derivative closures (5-point) for the p edges.
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


def _fd4_bounded(values: np.ndarray, h: float) -> np.ndarray:
    """FD4 along the last axis with one-sided 4th-order boundary closures."""
    out = np.empty_like(values)
    out[..., 2:-2] = (
        8.0 * (values[..., 3:-1] - values[..., 1:-3]) - (values[..., 4:] - values[..., :-4])
    ) / (12.0 * h)
    head = values[..., :5]
    tail = values[..., -5:]
    out[..., 0] = head @ _EDGE0 / h
    out[..., 1] = head @ _EDGE1 / h
    out[..., -1] = -(tail[..., ::-1] @ _EDGE0) / h
    out[..., -2] = -(tail[..., ::-1] @ _EDGE1) / h
    return out


def ddq(f: GridFn, scheme: Scheme = Scheme.FOURIER) -> GridFn:
    """Discrete d/dq with periodic wrap (works on spatial and phase fields)."""
    if f.is_phase:
        sp = f.grid.spatial
        if scheme is Scheme.FOURIER:
            return GridFn(f.grid, _fourier_deriv(f.values, sp.L, axis=0))
        return GridFn(f.grid, _fd4_periodic(f.values, sp.dq, axis=0))
    if scheme is Scheme.FOURIER:
        return GridFn(f.grid, _fourier_deriv(f.values, f.grid.L, axis=0))
    return GridFn(f.grid, _fd4_periodic(f.values, f.grid.dq, axis=0))


def ddp(f: GridFn, scheme: Scheme = Scheme.FD4) -> GridFn:
    """Discrete d/dp on a phase field; FD4 only (p is not periodic)."""
    if not f.is_phase:
        raise ValueError("ddp needs a phase-grid field")
    if scheme is Scheme.FOURIER:
        raise ValueError("Fourier differentiation is not supported in p")
    return GridFn(f.grid, _fd4_bounded(f.values, f.grid.dp))


# ---------------------------------------------------------------------------
# quadratures


def quad_q(f: GridFn) -> float:
    """Rectangle rule on the periodic grid; exact for sub-Nyquist trig data."""
    if f.is_phase:
        raise ValueError("quad_q needs a spatial field")
    return float(np.sum(f.values) * f.grid.dq)


def quad_p(f: GridFn, iq: int) -> float:
    """Trapezoid rule over p at a fixed q index."""
    if not f.is_phase:
        raise ValueError("quad_p needs a phase field")
    return float(np.trapezoid(f.values[iq, :], dx=f.grid.dp))


def quad_qp(f: GridFn) -> float:
    """Full phase-space integral: rectangle in q, trapezoid in p."""
    if not f.is_phase:
        raise ValueError("quad_qp needs a phase field")
    return float(np.sum(np.trapezoid(f.values, dx=f.grid.dp, axis=1)) * f.grid.spatial.dq)


def moment_quad(f: GridFn, m: int) -> GridFn:
    """m-th momentum moment  q |-> integral p^m f(q, p) dp  (trapezoid)."""
    if m < 0:
        raise ValueError("moment order must be >= 0")
    if not f.is_phase:
        raise ValueError("moment_quad needs a phase field")
    weights = f.grid.p_nodes**m if m else np.ones_like(f.grid.p_nodes)
    vals = np.trapezoid(f.values * weights[None, :], dx=f.grid.dp, axis=1)
    return GridFn(f.grid.spatial, vals)


def pairing(A, X) -> float:
    """Duality pairing sum_k integral A_k X^k dq of aligned order lists.

    A and X are sequences indexed by order (entries may be None for zero).
    """
    if len(A) != len(X):
        raise ValueError(f"order mismatch: {len(A)} moment slots vs {len(X)} field slots")
    total = 0.0
    for a_k, x_k in zip(A, X):
        if a_k is None or x_k is None:
            continue
        total += quad_q(a_k * x_k)
    return total


# ---------------------------------------------------------------------------
# sampling the exact layer


def sample(obj, grid) -> GridFn:
    """Pointwise float evaluation of a 1D symbolic object on a grid.

    Poly / order-k SymTensor -> spatial field; PhasePoly -> phase field.
    """
    if isinstance(obj, Poly):
        if obj.dim != 1:
            raise ValueError("sampling is implemented for dim == 1 only")
        sp = grid.spatial if isinstance(grid, PhaseGrid) else grid
        return GridFn(sp, obj.eval_grid([sp.nodes]))
    if isinstance(obj, SymTensor):
        if obj.dim != 1:
            raise ValueError("sampling is implemented for dim == 1 only")
        poly = obj.component((1,) * obj.order)
        return sample(poly, grid)
    if isinstance(obj, PhasePoly):
        if obj.dim != 1:
            raise ValueError("sampling is implemented for dim == 1 only")
        if not isinstance(grid, PhaseGrid):
            raise ValueError("PhasePoly sampling needs a PhaseGrid")
        p = grid.p_nodes[None, :]
        vals = np.zeros((grid.spatial.Nq, grid.Np))
        for key, poly in obj.terms.items():
            vals += poly.eval_grid([grid.spatial.nodes])[:, None] * p ** len(key)
        return GridFn(grid, vals)
    if isinstance(obj, GradedTensor):
        raise TypeError("sample graded tensors order by order (see momentdyn.sample_contra)")
    raise TypeError(f"cannot sample object of type {type(obj).__name__}")


def to_csv(f: GridFn) -> str:
    """CSV text: header 'q,value' or 'q,p,value', row-major, 17 significant digits."""
    lines = []
    if f.is_phase:
        lines.append("q,p,value")
        q = f.grid.spatial.nodes
        p = f.grid.p_nodes
        for i in range(f.grid.spatial.Nq):
            for j in range(f.grid.Np):
                lines.append(f"{q[i]:.17g},{p[j]:.17g},{f.values[i, j]:.17g}")
    else:
        lines.append("q,value")
        for qv, fv in zip(f.grid.nodes, f.values):
            lines.append(f"{qv:.17g},{fv:.17g}")
    return "\n".join(lines) + "\n"
