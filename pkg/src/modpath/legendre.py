"""Phase-space Legendre transform for quadratic Hamiltonians H(Q) = Q^T M Q / 2.

The prescription is carried out as explicit matrix algebra:
  1. velocity map Xdot = w^{-1} M Q,
  2. inversion Q(Xdot) = (w^{-1} M)^{-1} Xdot,
  3. L(X, Xdot) = -Xdot.A(X) + omega(Q(Xdot), Xdot) - H(Q(Xdot)),
which collapses to the quadratic form L = -Xdot.A + Xdot^T Kin Xdot / 2 with
Kin = w^T M^{-1} w.  For the oscillator M = Omega G this is Kin = G / Omega.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularM
from .phasespace import GaugeChoice, GeometryForms, PhasePoint, PhysicalParams, connection

_COND_LIMIT = 1e12
_SYM_TOL = 1e-13


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Positive-definite quadratic form on the 2d phase space."""

    M: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.M, dtype=float))
        if M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise ValueError("M must be a square 2d x 2d matrix")
        scale = max(1.0, float(np.max(np.abs(M))))
        if np.max(np.abs(M - M.T)) > _SYM_TOL * scale:
            raise ValueError("M must be symmetric")
        if np.linalg.eigvalsh(M)[0] <= 0:
            raise ValueError("M must be positive definite")
        M = 0.5 * (M + M.T)
        M.setflags(write=False)
        object.__setattr__(self, "M", M)

    @classmethod
    def oscillator(cls, params: PhysicalParams) -> "QuadraticHamiltonian":
        return cls(params.omega * GeometryForms(params).metric_G)

    @property
    def dims(self) -> int:
        return self.M.shape[0] // 2

    def value(self, Q: np.ndarray) -> float:
        Q = np.asarray(Q, dtype=float)
        return 0.5 * float(Q @ self.M @ Q)


@dataclass(frozen=True)
class ModularLagrangian:
    """L(X, Xdot) = -Xdot.A(X) + Xdot^T Kin Xdot / 2 in the recorded gauge."""

    kinetic: np.ndarray
    gauge: GaugeChoice
    hbar: float

    def __post_init__(self):
        K = np.atleast_2d(np.asarray(self.kinetic, dtype=float))
        if np.max(np.abs(K - K.T)) > _SYM_TOL * max(1.0, float(np.max(np.abs(K)))):
            raise ValueError("kinetic matrix must be symmetric")
        K.setflags(write=False)
        object.__setattr__(self, "kinetic", K)

    def value(self, X: PhasePoint, Xdot: np.ndarray) -> float:
        Xdot = np.asarray(Xdot, dtype=float)
        A = connection(X, self.gauge, self.hbar)
        return float(-Xdot @ A + 0.5 * Xdot @ self.kinetic @ Xdot)


def _omega_matrix(d: int) -> np.ndarray:
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return np.block([[zero, -eye], [eye, zero]])


def _guarded_inverse(M: np.ndarray, what: str) -> np.ndarray:
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularM(f"{what} has condition number {cond:.3e} beyond the guard {_COND_LIMIT:g}")
    return np.linalg.inv(M)


def modular_legendre(H: QuadraticHamiltonian, gauge: GaugeChoice,
                     hbar: float = 1.0) -> ModularLagrangian:
    """Run the three matrix steps of the transform and return the Lagrangian."""
    d = H.dims
    w = _omega_matrix(d)
    w_inv = -w
    step2 = w_inv @ H.M                       # Xdot = step2 @ Q
    step3 = _guarded_inverse(step2, "the velocity map w^{-1} M")   # Q = step3 @ Xdot
    # L = -Xdot.A + Xdot^T (step3^T w) Xdot - Xdot^T (step3^T M step3) Xdot / 2
    quad = 2.0 * step3.T @ w - step3.T @ H.M @ step3
    kin = 0.5 * (quad + quad.T)
    return ModularLagrangian(kin, gauge, hbar)


def eval_legendre_lagrangian(H: QuadraticHamiltonian, gauge: GaugeChoice,
                             X: PhasePoint, Xdot: np.ndarray,
                             hbar: float = 1.0) -> float:
    """Pointwise evaluation of the transform at one (X, Xdot), without the closed form.

    Entry point for plugging in future non-quadratic Hamiltonians; the shipped
    implementation handles the quadratic family only.
    """
    Xdot = np.asarray(Xdot, dtype=float)
    d = H.dims
    w = _omega_matrix(d)
    step2 = (-w) @ H.M
    Q = np.linalg.solve(step2, Xdot)
    A = connection(X, gauge, hbar)
    berry = -float(Xdot @ A) + float(Q @ w @ Xdot)
    return berry - H.value(Q)


def roundtrip_check(H: QuadraticHamiltonian, gauge: GaugeChoice,
                    hbar: float = 1.0) -> float:
    """Legendre-transform the produced Lagrangian back and compare Hamiltonians.

    The conjugate momentum is P = -A + Kin Xdot, so the recovered Hamiltonian
    is (P + A)^T Kin^{-1} (P + A) / 2; the expected closed pattern has
    Kin^{-1} = w^{-1} M w^{-T}.  Returns the max entrywise deviation.
    """
    lag = modular_legendre(H, gauge, hbar)
    d = H.dims
    w = _omega_matrix(d)
    kin_inv = _guarded_inverse(lag.kinetic, "the kinetic matrix")
    expected = (-w) @ H.M @ (-w).T
    return float(np.max(np.abs(kin_inv - expected)))


def euler_lagrange_matrix(H: QuadraticHamiltonian) -> np.ndarray:
    """Matrix E with Xddot = E Xdot implied by the produced Lagrangian (= w^{-1} M)."""
    lag = modular_legendre(H, GaugeChoice.zero())
    d = H.dims
    w = _omega_matrix(d)
    kin_inv = _guarded_inverse(lag.kinetic, "the kinetic matrix")
    return -kin_inv @ w
