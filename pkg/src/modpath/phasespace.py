"""Core phase-space geometry: points, lattices, gauges, connection and phases.

Conventions used throughout the package (d = number of configuration dimensions):

* a phase-space point is X = (x, xt) with x a length d-vector and xt a
  momentum d-vector; as a 2d-vector it is ordered ``[x, xt]``;
* the symplectic pairing is ``omega(X, Y) = xt.y - x.yt``, i.e. the matrix
  ``[[0, -I], [I, 0]]`` acting as X^T w Y;
* the oscillator metric is ``G = diag(m*Omega*I, I/(m*Omega))`` (det G = 1)
  and ``eta = [[0, I], [I, 0]]``;
* gauges are the quadratic family alpha(X) = c * x.xt, which covers the zero
  gauge (c = 0), the Schrodinger gauge (c = -1/2hbar) and the momentum gauge
  (c = +1/2hbar).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhysicalParams:
    """Oscillator constants. Numeric kernels in zak/propagator require dims == 1."""

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    dims: int = 1

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0 and self.omega > 0):
            raise ValueError("hbar, mass and omega must be strictly positive")
        if int(self.dims) < 1 or self.dims != int(self.dims):
            raise ValueError("dims must be a positive integer")
        object.__setattr__(self, "dims", int(self.dims))


def _as_dvec(v, d: int | None = None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=float)).copy()
    if arr.ndim != 1:
        raise ValueError("phase-space components must be scalars or 1-d vectors")
    if d is not None and arr.size != d:
        raise DimensionMismatch(f"expected a {d}-vector, got size {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("phase-space components must be finite")
    arr.setflags(write=False)
    return arr


class PhasePoint:
    """A point X = (x, xt) of the phase space; immutable."""

    __slots__ = ("x", "xt")

    def __init__(self, x, xt):
        x = _as_dvec(x)
        xt = _as_dvec(xt, x.size)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xt", xt)

    def __setattr__(self, name, value):
        raise AttributeError("PhasePoint is immutable")

    @property
    def dims(self) -> int:
        return self.x.size

    @property
    def vec(self) -> np.ndarray:
        return np.concatenate([self.x, self.xt])

    @classmethod
    def from_vec(cls, v) -> "PhasePoint":
        v = np.asarray(v, dtype=float)
        if v.ndim != 1 or v.size % 2:
            raise ValueError("expected a flat 2d-vector")
        d = v.size // 2
        return cls(v[:d], v[d:])

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        return PhasePoint(self.x + other.x, self.xt + other.xt)

    def __sub__(self, other: "PhasePoint") -> "PhasePoint":
        return PhasePoint(self.x - other.x, self.xt - other.xt)

    def __mul__(self, s: float) -> "PhasePoint":
        return PhasePoint(self.x * s, self.xt * s)

    __rmul__ = __mul__

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(-self.x, -self.xt)

    def __repr__(self):
        return f"PhasePoint(x={self.x.tolist()}, xt={self.xt.tolist()})"


@dataclass(frozen=True)
class ModularLattice:
    """Diagonal modular lattice with scales lam (length) and lam_tilde (momentum).

    The pairing lam * lam_tilde = 2*pi*hbar is enforced per axis at
    construction (machine relative tolerance 1e-15).
    """

    lam: np.ndarray
    lam_tilde: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        lam = _as_dvec(self.lam)
        lt = _as_dvec(self.lam_tilde, lam.size)
        if np.any(lam <= 0) or np.any(lt <= 0):
            raise ValueError("lattice scales must be strictly positive")
        prod = lam * lt
        if np.any(np.abs(prod - TWO_PI * self.hbar) > 1e-15 * TWO_PI * self.hbar):
            raise ValueError("lattice scales must satisfy lam*lam_tilde = 2*pi*hbar per axis")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "lam_tilde", lt)

    @classmethod
    def from_length(cls, lam, params: PhysicalParams) -> "ModularLattice":
        lam = _as_dvec(lam)
        if lam.size == 1 and params.dims > 1:
            lam = np.full(params.dims, lam[0])
        return cls(lam, TWO_PI * params.hbar / lam, params.hbar)

    @classmethod
    def natural(cls, params: PhysicalParams, scale: float = 1.0) -> "ModularLattice":
        """Lattice with lam = scale * sqrt(2*pi*hbar/(m*Omega)), so lam = lam_tilde at scale 1 in units m*Omega = 1."""
        lam = scale * np.sqrt(TWO_PI * params.hbar / (params.mass * params.omega))
        return cls.from_length(np.full(params.dims, lam), params)

    @property
    def dims(self) -> int:
        return self.lam.size

    @property
    def lambda_bar(self) -> np.ndarray:
        """The 2d x 2d block matrix diag(lam, lam_tilde) embedding integer vectors into the lattice."""
        return np.diag(np.concatenate([self.lam, self.lam_tilde]))

    def cell_volume(self) -> float:
        return float(np.prod(self.lam) * np.prod(self.lam_tilde))

    def vector(self, n, nt) -> "LatticeVector":
        return LatticeVector(n, nt, self)

    def __eq__(self, other):
        return (
            isinstance(other, ModularLattice)
            and np.array_equal(self.lam, other.lam)
            and np.array_equal(self.lam_tilde, other.lam_tilde)
        )


@dataclass(frozen=True)
class LatticeVector:
    """Integer labels (n, nt) of the lattice point K = (lam*n, lam_tilde*nt)."""

    n: np.ndarray
    nt: np.ndarray
    lattice: ModularLattice

    def __post_init__(self):
        n = np.atleast_1d(np.asarray(self.n))
        nt = np.atleast_1d(np.asarray(self.nt))
        if n.size != self.lattice.dims or nt.size != self.lattice.dims:
            raise DimensionMismatch("lattice index size does not match lattice dimension")
        if not (np.all(n == np.round(n)) and np.all(nt == np.round(nt))):
            raise ValueError("lattice indices must be integers")
        n = n.astype(int)
        nt = nt.astype(int)
        n.setflags(write=False)
        nt.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "nt", nt)

    @property
    def point(self) -> PhasePoint:
        return PhasePoint(self.lattice.lam * self.n, self.lattice.lam_tilde * self.nt)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        if self.lattice != other.lattice:
            raise DimensionMismatch("lattice vectors on different lattices")
        return LatticeVector(self.n + other.n, self.nt + other.nt, self.lattice)

    def is_zero(self) -> bool:
        return not (np.any(self.n) or np.any(self.nt))


@dataclass(frozen=True)
class GaugeChoice:
    """U(1) gauge alpha(X) = c * x.xt with its analytic gradient.

    kind is one of "zero", "schrodinger", "momentum", "custom"; the three named
    gauges fix c = 0, -1/(2 hbar), +1/(2 hbar).
    """

    kind: str = "zero"
    c: float = 0.0

    @classmethod
    def zero(cls) -> "GaugeChoice":
        return cls("zero", 0.0)

    @classmethod
    def schrodinger(cls, hbar: float = 1.0) -> "GaugeChoice":
        return cls("schrodinger", -0.5 / hbar)

    @classmethod
    def momentum(cls, hbar: float = 1.0) -> "GaugeChoice":
        return cls("momentum", +0.5 / hbar)

    @classmethod
    def custom(cls, c: float) -> "GaugeChoice":
        return cls("custom", float(c))

    def alpha(self, X: PhasePoint) -> float:
        return self.c * float(np.dot(X.x, X.xt))

    def grad_alpha(self, X: PhasePoint) -> np.ndarray:
        """Gradient (d alpha/dx, d alpha/dxt) as a 2d covector."""
        return self.c * np.concatenate([X.xt, X.x])

    def alpha_xy(self, x, xt):
        """Vectorized alpha on broadcastable component arrays (d = 1)."""
        return self.c * np.asarray(x) * np.asarray(xt)


class GeometryForms:
    """Constant symplectic/metric structures on the 2d-dimensional phase space."""

    def __init__(self, params: PhysicalParams):
        d = params.dims
        eye = np.eye(d)
        zero = np.zeros((d, d))
        self.params = params
        self.omega_form = np.block([[zero, -eye], [eye, zero]])
        mo = params.mass * params.omega
        self.metric_G = np.block([[mo * eye, zero], [zero, eye / mo]])
        self.metric_eta = np.block([[zero, eye], [eye, zero]])
        self.omega_inv = -self.omega_form  # w^2 = -1
        self.complex_structure = self.omega_inv @ self.metric_G  # J = w^-1 G, J^2 = -1
        for m in (self.omega_form, self.metric_G, self.metric_eta,
                  self.omega_inv, self.complex_structure):
            m.setflags(write=False)

    def G(self, X: PhasePoint, Y: PhasePoint) -> float:
        return float(X.vec @ self.metric_G @ Y.vec)

    def eta(self, X: PhasePoint, Y: PhasePoint) -> float:
        return float(X.vec @ self.metric_eta @ Y.vec)


def symplectic(X: PhasePoint, Y: PhasePoint) -> float:
    """omega(X, Y) = xt.y - x.yt, in action units."""
    if X.dims != Y.dims:
        raise DimensionMismatch("phase points of different dimension")
    return float(np.dot(X.xt, Y.x) - np.dot(X.x, Y.xt))


def connection(X: PhasePoint, gauge: GaugeChoice, hbar: float) -> np.ndarray:
    """Modular connection A_A(X) = 1/2 X^B w_BA + hbar * grad alpha, a 2d covector.

    Zero gauge gives (xt/2, -x/2); its curvature dA equals omega in every gauge.
    """
    base = 0.5 * np.concatenate([X.xt, -X.x])
    return base + hbar * gauge.grad_alpha(X)


def beta_phase(X: PhasePoint, K: LatticeVector, gauge: GaugeChoice, hbar: float) -> float:
    """Quasi-periodicity phase beta_alpha(X, K) for a lattice translation K.

    beta = alpha(X+K) - alpha(X) + k.kt/(2 hbar) + omega(K, X)/(2 hbar).
    """
    Kp = K.point
    shifted = X + Kp
    return (
        gauge.alpha(shifted)
        - gauge.alpha(X)
        + float(np.dot(Kp.x, Kp.xt)) / (2.0 * hbar)
        + symplectic(Kp, X) / (2.0 * hbar)
    )


def reduce_to_cell(X: PhasePoint, lattice: ModularLattice) -> tuple[PhasePoint, LatticeVector]:
    """Split X = X0 + K with X0 in the centered half-open cell lam[-1/2,1/2) x lt[-1/2,1/2).

    Ties at +lam/2 wrap to -lam/2 (half-open convention), so the map is
    idempotent and the round trip X0 + K == X is exact in floating point.
    """
    n = np.floor(X.x / lattice.lam + 0.5).astype(int)
    nt = np.floor(X.xt / lattice.lam_tilde + 0.5).astype(int)
    K = LatticeVector(n, nt, lattice)
    X0 = X - K.point
    return X0, K
