"""Stationary trajectories of the phase-space action and their conserved charges.

The action density is L(X, Xdot) = -Xdot.A(X) + G(Xdot, Xdot)/(2 Omega); its
extremals satisfy Xddot = Omega w^{-1} G Xdot, i.e. ellipses
X(t) = chi + xi sin(Omega(t - tmid)) - J xi cos(Omega(t - tmid)) with
J = w^{-1} G, one per winding sector W of the torus.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ResonantTime, UnsupportedDim
from .phasespace import (GaugeChoice, GeometryForms, LatticeVector, PhasePoint,
                         PhysicalParams, connection, symplectic)

_RESONANCE_TOL = 1e-9


def _check_resonance(params: PhysicalParams, t0: float, tf: float):
    """Exclude Omega*(tf - t0) within 1e-9 of a multiple of pi."""
    if tf <= t0:
        raise ValueError("tf must exceed t0")
    phase = params.omega * (tf - t0)
    if abs(phase - np.pi * round(phase / np.pi)) < _RESONANCE_TOL:
        raise ResonantTime(f"Omega*(tf-t0) = {phase:.12g} is resonant (multiple of pi)")


@dataclass(frozen=True)
class TrajectoryW:
    """Closed-form stationary path in winding sector W with constants (chi, xi)."""

    W: LatticeVector
    chi: PhasePoint
    xi: PhasePoint
    t0: float
    tf: float
    params: PhysicalParams
    X0: PhasePoint
    Xf: PhasePoint
    forms: GeometryForms = field(repr=False, default=None)

    def _trig(self, t):
        t = np.asarray(t, dtype=float)
        arg = self.params.omega * (np.atleast_1d(t) - 0.5 * (self.t0 + self.tf))
        return np.sin(arg), np.cos(arg), t.ndim == 0

    def position(self, t) -> np.ndarray:
        """X(t); returns shape (2d,) for scalar t, else (len(t), 2d)."""
        s, c, scalar = self._trig(t)
        xi = self.xi.vec
        jxi = self.forms.complex_structure @ xi
        out = self.chi.vec + np.outer(s, xi) - np.outer(c, jxi)
        return out[0] if scalar else out

    def velocity(self, t) -> np.ndarray:
        s, c, scalar = self._trig(t)
        om = self.params.omega
        xi = self.xi.vec
        jxi = self.forms.complex_structure @ xi
        out = om * (np.outer(c, xi) + np.outer(s, jxi))
        return out[0] if scalar else out

    def acceleration(self, t) -> np.ndarray:
        om = self.params.omega
        return -om * om * (self.position(t) - self.chi.vec)

    def point(self, t) -> PhasePoint:
        return PhasePoint.from_vec(self.position(t))


def stationary_path(X0: PhasePoint, Xf: PhasePoint, W: LatticeVector,
                    t0: float, tf: float, params: PhysicalParams) -> TrajectoryW:
    """Unique extremal from X0 at t0 to Xf + W at tf.

    chi = (X0 + Xf + W)/2 + J (Xf + W - X0)/2 * cot(Omega T / 2),
    xi  = (Xf + W - X0)/2 * csc(Omega T / 2),  T = tf - t0.
    """
    _check_resonance(params, t0, tf)
    forms = GeometryForms(params)
    half = 0.5 * params.omega * (tf - t0)
    cot = np.cos(half) / np.sin(half)
    csc = 1.0 / np.sin(half)
    target = Xf + W.point
    dw = target - X0
    chi_vec = 0.5 * (X0.vec + target.vec) + 0.5 * cot * (forms.complex_structure @ dw.vec)
    xi_vec = 0.5 * csc * dw.vec
    return TrajectoryW(W, PhasePoint.from_vec(chi_vec), PhasePoint.from_vec(xi_vec),
                       t0, tf, params, X0, Xf, forms)


def lagrangian(traj: TrajectoryW, gauge: GaugeChoice, t) -> np.ndarray:
    """Action density along the trajectory at times t."""
    params = traj.params
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    X = np.atleast_2d(traj.position(ts))
    V = np.atleast_2d(traj.velocity(ts))
    return _lagrangian_xv(X, V, gauge, params)


def _lagrangian_xv(X: np.ndarray, V: np.ndarray, gauge: GaugeChoice,
                   params: PhysicalParams) -> np.ndarray:
    forms = GeometryForms(params)
    d = params.dims
    x, xt = X[:, :d], X[:, d:]
    # connection contracted with the velocity, vectorized over rows
    base = 0.5 * (np.einsum("ij,ij->i", V[:, :d], xt) - np.einsum("ij,ij->i", V[:, d:], x))
    grad = gauge.c * np.concatenate([xt, x], axis=1)
    a_dot_v = base + params.hbar * np.einsum("ij,ij->i", V, grad)
    kinetic = 0.5 / params.omega * np.einsum("ij,jk,ik->i", V, forms.metric_G, V)
    return -a_dot_v + kinetic


def onshell_action(traj: TrajectoryW, gauge: GaugeChoice) -> float:
    """Closed-form on-shell action for the stationary path.

    S = -hbar alpha(Xf + W) + hbar alpha(X0) - omega(X0, Xf + W)/2
        + cot(Omega T/2) G(Xf + W - X0, Xf + W - X0)/4.
    """
    params = traj.params
    _check_resonance(params, traj.t0, traj.tf)
    forms = traj.forms
    target = traj.Xf + traj.W.point
    dw = target - traj.X0
    half = 0.5 * params.omega * (traj.tf - traj.t0)
    cot = np.cos(half) / np.sin(half)
    return (
        -params.hbar * gauge.alpha(target)
        + params.hbar * gauge.alpha(traj.X0)
        - 0.5 * symplectic(traj.X0, target)
        + 0.25 * cot * forms.G(dw, dw)
    )


def onshell_action_quadrature(traj: TrajectoryW, gauge: GaugeChoice,
                              nodes: int = 200) -> float:
    """Gauss-Legendre quadrature of the action plus the alpha boundary terms.

    Uses S = -hbar alpha(X(tf)) + hbar alpha(X(t0))
             + int [-omega(X, Xdot)/2 + G(Xdot, Xdot)/(2 Omega)] dt,
    an algebraically different split from the closed form above.
    """
    params = traj.params
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (traj.tf - traj.t0) * xg + 0.5 * (traj.tf + traj.t0)
    w = 0.5 * (traj.tf - traj.t0) * wg
    X = np.atleast_2d(traj.position(t))
    V = np.atleast_2d(traj.velocity(t))
    d = params.dims
    omega_xv = np.einsum("ij,ij->i", X[:, d:], V[:, :d]) - np.einsum("ij,ij->i", X[:, :d], V[:, d:])
    kinetic = 0.5 / params.omega * np.einsum("ij,jk,ik->i", V, traj.forms.metric_G, V)
    integral = float(np.dot(w, -0.5 * omega_xv + kinetic))
    bdry = (-params.hbar * gauge.alpha(traj.point(traj.tf))
            + params.hbar * gauge.alpha(traj.point(traj.t0)))
    return bdry + integral


@dataclass(frozen=True)
class CurrentReport:
    """Noether charges sampled along a trajectory, with their worst drift."""

    chi_current: PhasePoint
    energy: float
    J: np.ndarray
    kappa: float
    max_drift: float


def noether_currents(traj: TrajectoryW, n_samples: int = 50) -> CurrentReport:
    """Evaluate the four conserved charges on a time grid and report max drift.

    chi = X + J Xdot / Omega, E = G(Xdot, Xdot)/(2 Omega),
    J^{ab} = xt^{[a} x^{b]} - m xd^{[a} x^{b]} - xtd^{[a} xt^{b]}/(m Omega^2),
    kappa = omega(X, Xdot)/Omega - G(X, X)/2.
    """
    params = traj.params
    d = params.dims
    forms = traj.forms
    t = np.linspace(traj.t0, traj.tf, n_samples)
    X = np.atleast_2d(traj.position(t))
    V = np.atleast_2d(traj.velocity(t))
    chi = X + (forms.complex_structure @ V.T).T / params.omega
    energy = 0.5 / params.omega * np.einsum("ij,jk,ik->i", V, forms.metric_G, V)
    omega_xv = np.einsum("ij,ij->i", X[:, d:], V[:, :d]) - np.einsum("ij,ij->i", X[:, :d], V[:, d:])
    gxx = np.einsum("ij,jk,ik->i", X, forms.metric_G, X)
    kappa = omega_xv / params.omega - 0.5 * gxx

    def antisym(a, b):
        return 0.5 * (np.einsum("ti,tj->tij", a, b) - np.einsum("ti,tj->tij", b, a))

    x, xt = X[:, :d], X[:, d:]
    xd, xtd = V[:, :d], V[:, d:]
    m, om = params.mass, params.omega
    Jrot = antisym(xt, x) - m * antisym(xd, x) - antisym(xtd, xt) / (m * om * om)

    scale = max(np.max(np.abs(chi)), np.max(np.abs(energy)), np.max(np.abs(kappa)),
                np.max(np.abs(Jrot)) if d > 1 else 0.0, 1e-30)
    drift = max(
        np.max(np.abs(chi - chi[0])),
        np.max(np.abs(energy - energy[0])),
        np.max(np.abs(kappa - kappa[0])),
        np.max(np.abs(Jrot - Jrot[0])),
    ) / scale
    return CurrentReport(
        PhasePoint.from_vec(chi[0]), float(energy[0]), Jrot[0], float(kappa[0]), float(drift)
    )


def hamilton_principal(X: PhasePoint, t: float, X0: PhasePoint, t0: float,
                       params: PhysicalParams, gauge: GaugeChoice) -> float:
    """Hamilton's principal function S(X, t) for paths released from (X0, t0)."""
    _check_resonance(params, t0, t)
    forms = GeometryForms(params)
    dx = X - X0
    half = 0.5 * params.omega * (t - t0)
    cot = np.cos(half) / np.sin(half)
    return (
        -params.hbar * gauge.alpha(X)
        + params.hbar * gauge.alpha(X0)
        - 0.5 * symplectic(X0, X)
        + 0.25 * cot * forms.G(dx, dx)
    )


def hamilton_principal_gradient(X: PhasePoint, t: float, X0: PhasePoint, t0: float,
                                params: PhysicalParams, gauge: GaugeChoice) -> np.ndarray:
    """Analytic dS/dX as a 2d covector."""
    forms = GeometryForms(params)
    half = 0.5 * params.omega * (t - t0)
    cot = np.cos(half) / np.sin(half)
    dx = (X - X0).vec
    return (
        -params.hbar * gauge.grad_alpha(X)
        + 0.5 * (forms.omega_form @ X0.vec)
        + 0.5 * cot * (forms.metric_G @ dx)
    )


def modular_hamiltonian(X: PhasePoint, P: np.ndarray, params: PhysicalParams,
                        gauge: GaugeChoice) -> float:
    """H(X, P) = Omega G^{-1}(P + A(X), P + A(X)) / 2."""
    forms = GeometryForms(params)
    shifted = P + connection(X, gauge, params.hbar)
    g_inv = np.linalg.inv(forms.metric_G)
    return 0.5 * params.omega * float(shifted @ g_inv @ shifted)


def hamilton_jacobi_residual(X: PhasePoint, t: float, X0: PhasePoint, t0: float,
                             params: PhysicalParams, gauge: GaugeChoice) -> float:
    """dS/dt + H(X, dS/dX) with all pieces analytic; zero for the closed form."""
    _check_resonance(params, t0, t)
    forms = GeometryForms(params)
    dx = (X - X0).vec
    half = 0.5 * params.omega * (t - t0)
    csc2 = 1.0 / np.sin(half) ** 2
    dS_dt = -0.125 * params.omega * csc2 * float(dx @ forms.metric_G @ dx)
    grad = hamilton_principal_gradient(X, t, X0, t0, params, gauge)
    return dS_dt + modular_hamiltonian(X, grad, params, gauge)


def conjugate_momentum(traj: TrajectoryW, gauge: GaugeChoice, t: float) -> np.ndarray:
    """P = -A(X) + G Xdot / Omega along the trajectory."""
    X = traj.point(t)
    V = traj.velocity(t)
    return (-connection(X, gauge, traj.params.hbar)
            + traj.forms.metric_G @ V / traj.params.omega)


@dataclass(frozen=True)
class SymmetryCheck:
    sizes: tuple[float, ...]
    mismatches: tuple[float, ...]
    boundary_term: float
    worst_ratio: float


def _action_of_path(pos_fn, vel_fn, t0: float, tf: float, gauge: GaugeChoice,
                    params: PhysicalParams, nodes: int = 200) -> float:
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (tf - t0) * xg + 0.5 * (tf + t0)
    w = 0.5 * (tf - t0) * wg
    X = np.atleast_2d(pos_fn(t))
    V = np.atleast_2d(vel_fn(t))
    return float(np.dot(w, _lagrangian_xv(X, V, gauge, params)))


def symmetry_variation_check(traj: TrajectoryW, which: str, gauge: GaugeChoice,
                             aux=None, sizes=(1e-3, 1e-4, 1e-5)) -> SymmetryCheck:
    """First-order check that the named variation shifts the action by its boundary term.

    which is one of "translation" (aux: a 2d-vector), "time_shift",
    "rotation" (aux: antisymmetric d x d matrix, d >= 2), "symplectic".
    Returns the per-size mismatches |Delta S / s - boundary| and the worst
    mismatch normalized by the action scale.
    """
    params = traj.params
    d = params.dims
    forms = traj.forms
    t0, tf = traj.t0, traj.tf
    hbar = params.hbar

    def conn(Xv):
        x, xt = Xv[:d], Xv[d:]
        return 0.5 * np.concatenate([xt, -x]) + hbar * gauge.c * np.concatenate([xt, x])

    def lag_point(Xv, Vv):
        return float(_lagrangian_xv(Xv[None, :], Vv[None, :], gauge, params)[0])

    if which == "translation":
        eps_vec = np.zeros(2 * d) if aux is None else np.asarray(aux, dtype=float)

        def direction(t):
            return np.broadcast_to(eps_vec, (np.size(t), 2 * d)).copy()

        def ddirection(t):
            return np.zeros((np.size(t), 2 * d))

        def boundary_at(tb):
            Xv = traj.position(tb)
            return float(-conn(Xv) @ eps_vec
                         + (Xv[d:] @ eps_vec[:d] - Xv[:d] @ eps_vec[d:]))
    elif which == "symplectic":
        Jmat = forms.complex_structure

        def direction(t):
            return (Jmat @ np.atleast_2d(traj.position(t)).T).T

        def ddirection(t):
            return (Jmat @ np.atleast_2d(traj.velocity(t)).T).T

        def boundary_at(tb):
            Xv = traj.position(tb)
            return float(-conn(Xv) @ (Jmat @ Xv) + 0.5 * Xv @ forms.metric_G @ Xv)
    elif which == "rotation":
        if d < 2:
            raise UnsupportedDim("rotation variation needs d >= 2")
        L = np.asarray(aux, dtype=float)
        if L.shape != (d, d) or np.max(np.abs(L + L.T)) > 1e-12:
            raise ValueError("rotation needs an antisymmetric d x d matrix")
        R = np.block([[-L, np.zeros((d, d))], [np.zeros((d, d)), -L]])

        def direction(t):
            return (R @ np.atleast_2d(traj.position(t)).T).T

        def ddirection(t):
            return (R @ np.atleast_2d(traj.velocity(t)).T).T

        def boundary_at(tb):
            Xv = traj.position(tb)
            A = conn(Xv)
            x, xt = Xv[:d], Xv[d:]
            return float(A[:d] @ (L @ x) + A[d:] @ (L @ xt) - xt @ (L @ x))
    elif which == "time_shift":
        def boundary_at(tb):
            Xv = traj.position(tb)
            Vv = traj.velocity(tb)
            return lag_point(Xv, Vv)
    else:
        raise ValueError("which must be translation, time_shift, rotation or symplectic")

    S0 = _action_of_path(traj.position, traj.velocity, t0, tf, gauge, params)
    boundary = boundary_at(tf) - boundary_at(t0)
    mismatches = []
    for s in sizes:
        if which == "time_shift":
            Ss = _action_of_path(lambda t: traj.position(np.asarray(t) + s),
                                 lambda t: traj.velocity(np.asarray(t) + s),
                                 t0, tf, gauge, params)
        else:
            Ss = _action_of_path(lambda t: np.atleast_2d(traj.position(t)) + s * direction(t),
                                 lambda t: np.atleast_2d(traj.velocity(t)) + s * ddirection(t),
                                 t0, tf, gauge, params)
        mismatches.append(abs((Ss - S0) / s - boundary))
    scale = max(abs(boundary), abs(S0), 1.0)
    return SymmetryCheck(tuple(sizes), tuple(mismatches), boundary,
                         max(mismatches) / scale)
