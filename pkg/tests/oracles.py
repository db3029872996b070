"""Independent oracles used by the test suite.

Everything here is deliberately written against the package's code paths:
brute-force series, Gauss-Hermite spectral decompositions, closed-form
complex-Gaussian algebra, and generic linear-algebra boundary solves.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from modpath.phasespace import PhasePoint, PhysicalParams


def brute_theta(z, tau, radius: int = 20, shuffle_seed: int | None = None) -> complex:
    """Naive theta series over the box |n|_inf <= radius, summed term by term."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    tau = np.atleast_2d(np.asarray(tau, dtype=complex))
    D = z.size
    grids = np.meshgrid(*([np.arange(-radius, radius + 1)] * D), indexing="ij")
    ns = np.stack([g.ravel() for g in grids], axis=-1)
    terms = [cmath.exp(1j * math.pi * complex(n @ tau @ n) + 2j * math.pi * complex(n @ z))
             for n in ns]
    if shuffle_seed is not None:
        rng = np.random.default_rng(shuffle_seed)
        order = rng.permutation(len(terms))
        terms = [terms[i] for i in order]
    total = 0.0 + 0.0j
    for t in terms:
        total += t
    return total


def hermite_function(n: int, u: np.ndarray) -> np.ndarray:
    """Unit-norm oscillator eigenfunction in the scaled variable u (m=omega=hbar=1)."""
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    norm = np.pi ** -0.25 / math.sqrt(2.0 ** n * math.factorial(n))
    return norm * np.polynomial.hermite.hermval(u, coeffs) * np.exp(-0.5 * u * u)


def fock_coefficients(psi, params: PhysicalParams, cutoff: int = 64,
                      gh_order: int = 180) -> np.ndarray:
    """<n|psi> by Gauss-Hermite quadrature (weight recovered explicitly)."""
    scale = math.sqrt(params.mass * params.omega / params.hbar)
    u, w = np.polynomial.hermite.hermgauss(gh_order)
    x = u / scale
    vals = psi(x) * np.exp(u * u) * w / scale     # undo the e^{-u^2} weight
    coeffs = np.empty(cutoff + 1, dtype=complex)
    for n in range(cutoff + 1):
        coeffs[n] = np.sum(hermite_function(n, u) * math.sqrt(scale) * vals)
    return coeffs


def fock_evolved_overlap(psi_f, psi_0, T: float, params: PhysicalParams,
                         cutoff: int = 64) -> complex:
    """<psi_f | e^{-i T H / hbar} | psi_0> through the oscillator spectrum."""
    cf = fock_coefficients(psi_f, params, cutoff)
    c0 = fock_coefficients(psi_0, params, cutoff)
    phases = np.exp(-1j * params.omega * T * (np.arange(cutoff + 1) + 0.5))
    return complex(np.sum(np.conj(cf) * c0 * phases))


class GaussianExp:
    """exp(a x^2 + b x + c) with Re(a) < 0; closed under the Trotter factors."""

    def __init__(self, a: complex, b: complex, c: complex):
        self.a, self.b, self.c = complex(a), complex(b), complex(c)

    @classmethod
    def from_state(cls, center: float, momentum: float, sigma2: float,
                   hbar: float) -> "GaussianExp":
        amp = (2.0 * math.pi * sigma2) ** -0.25
        a = -1.0 / (4.0 * sigma2)
        b = center / (2.0 * sigma2) + 1j * momentum / hbar
        c = -center * center / (4.0 * sigma2) - 1j * momentum * center / hbar + math.log(amp)
        return cls(a, b, c)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(self.a * x * x + self.b * x + self.c)

    def times_potential(self, dt: float, params: PhysicalParams) -> "GaussianExp":
        """Multiply by exp(-i dt m Omega^2 x^2 / 2 hbar)."""
        shift = -0.5j * dt * params.mass * params.omega ** 2 / params.hbar
        return GaussianExp(self.a + shift, self.b, self.c)

    def free_propagate(self, dt: float, params: PhysicalParams) -> "GaussianExp":
        """Apply exp(-i dt p^2 / 2 m hbar) via the free kernel Gaussian integral."""
        hbar, m = params.hbar, params.mass
        mu = m / (2.0 * hbar * dt)
        pref = cmath.sqrt(m / (2j * math.pi * hbar * dt))
        aa = self.a + 1j * mu
        a_new = 1j * mu + mu * mu / aa
        b_new = 1j * mu * self.b / aa
        c_new = self.c - self.b * self.b / (4.0 * aa) + cmath.log(pref * cmath.sqrt(-math.pi / aa))
        return GaussianExp(a_new, b_new, c_new)

    def overlap(self, other: "GaussianExp") -> complex:
        """integral of conj(self) * other over the line."""
        a = np.conj(self.a) + other.a
        b = np.conj(self.b) + other.b
        c = np.conj(self.c) + other.c
        return cmath.sqrt(-math.pi / a) * cmath.exp(c - b * b / (4.0 * a))


def trotter_smeared(gf: GaussianExp, g0: GaussianExp, dt: float,
                    params: PhysicalParams) -> complex:
    """<psi_f | e^{-i dt T} e^{-i dt V} | psi_0> for Gaussian endpoints, exactly."""
    return gf.overlap(g0.times_potential(dt, params).free_propagate(dt, params))


def boundary_value_path(X0: PhasePoint, Xf_plus_W: PhasePoint, t0: float, tf: float,
                        params: PhysicalParams, forms) -> tuple[np.ndarray, np.ndarray]:
    """Solve the two-point problem for Xdd = -Omega^2 (X - chi), Xd = Omega J (X - chi).

    General solution X(t) = chi + cos(Om t) A + sin(Om t) J A with free
    (chi, A); the boundary conditions are a linear 4d x 4d system.  Returns
    (chi, A).
    """
    om = params.omega
    J = forms.complex_structure
    dim = 2 * params.dims
    eye = np.eye(dim)

    def row(t):
        return np.hstack([eye, math.cos(om * t) * eye + math.sin(om * t) * J])

    lhs = np.vstack([row(t0), row(tf)])
    rhs = np.concatenate([X0.vec, Xf_plus_W.vec])
    sol = np.linalg.solve(lhs, rhs)
    return sol[:dim], sol[dim:]


def finite_difference_gradient(f, x0: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central finite differences of a scalar function of a flat vector."""
    x0 = np.asarray(x0, dtype=float)
    out = np.empty_like(x0)
    for i in range(x0.size):
        dx = np.zeros_like(x0)
        dx[i] = step
        out[i] = (f(x0 + dx) - f(x0 - dx)) / (2.0 * step)
    return out
