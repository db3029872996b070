"""Multidimensional Jacobi theta function with a certified truncation bound.

theta(z, tau) = sum over n in Z^D of exp(i pi n^T tau n + 2 pi i n^T z),
for z in C^D and tau in the Siegel upper-half space (symmetric complex D x D
with positive-definite imaginary part).  Terms are summed over the infinity-
norm box |n| <= R with R chosen so the neglected tail is provably below the
requested tolerance, using the Gaussian bound

    |term(n)| = exp(-pi n^T Im(tau) n - 2 pi n . Im(z))
             <= exp(-pi mu ||n||^2 + 2 pi ||n|| ||Im z||),

mu the smallest eigenvalue of Im(tau).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadAux, NotSiegel, TruncationInsufficient

_SYM_TOL = 1e-13


class SiegelMatrix:
    """Symmetric complex matrix with positive-definite imaginary part."""

    __slots__ = ("tau", "dim", "mu_min")

    def __init__(self, tau):
        tau = np.atleast_2d(np.asarray(tau, dtype=complex))
        if tau.ndim != 2 or tau.shape[0] != tau.shape[1]:
            raise NotSiegel("tau must be a square matrix")
        scale = max(1.0, float(np.max(np.abs(tau))))
        if np.max(np.abs(tau - tau.T)) > _SYM_TOL * scale:
            raise NotSiegel("tau must be symmetric")
        ev = np.linalg.eigvalsh(tau.imag)
        if ev[0] <= 0.0:
            raise NotSiegel(f"Im(tau) must be positive definite (min eigenvalue {ev[0]:.3e})")
        tau = 0.5 * (tau + tau.T)
        tau.setflags(write=False)
        self.tau = tau
        self.dim = tau.shape[0]
        self.mu_min = float(ev[0])

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.tau)


@dataclass(frozen=True)
class ThetaTruncation:
    """Tail tolerance and the largest box radius the evaluator may use."""

    tail_tol: float = 1e-14
    max_radius: int = 64

    def __post_init__(self):
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")
        if self.max_radius < 1:
            raise ValueError("max_radius must be at least 1")


def _as_siegel(tau) -> SiegelMatrix:
    return tau if isinstance(tau, SiegelMatrix) else SiegelMatrix(tau)


def _as_zvec(z, dim: int) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (dim,):
        raise ValueError(f"z must be a complex {dim}-vector")
    return z


def _ring_count(r: int, dim: int) -> int:
    if r == 0:
        return 1
    return (2 * r + 1) ** dim - (2 * r - 1) ** dim


def _ring_bound(r: int, mu: float, b: float, dim: int) -> float:
    # max over the ring ||n||_inf = r of exp(-pi mu rho^2 + 2 pi b rho),
    # rho = ||n||_2 in [r, sqrt(dim) r]; the exponent is maximal at rho* = b/mu.
    lo, hi = float(r), float(r) * np.sqrt(dim)
    rho = min(max(b / mu, lo), hi)
    expo = -np.pi * mu * rho * rho + 2.0 * np.pi * b * rho
    if expo > 700.0:
        return np.inf
    return _ring_count(r, dim) * float(np.exp(expo))


def certified_radius(tau: SiegelMatrix, z, trunc: ThetaTruncation) -> int:
    """Smallest box radius whose tail bound is below trunc.tail_tol.

    Raises TruncationInsufficient when no radius up to trunc.max_radius works.
    """
    z = _as_zvec(z, tau.dim)
    mu = tau.mu_min
    b = float(np.linalg.norm(z.imag))
    # ring bounds decay doubly exponentially past b/mu; accumulate tails from above
    r_hi = trunc.max_radius
    r_probe = r_hi
    tail_beyond = 0.0
    # extend the probe range until the remainder past it is negligible
    while True:
        r_probe += 1
        term = _ring_bound(r_probe, mu, b, tau.dim)
        tail_beyond += term
        if term < 1e-3 * trunc.tail_tol and r_probe > b / mu + 2:
            break
        if r_probe > 64 * trunc.max_radius + 1024:
            raise TruncationInsufficient(
                "tail bound does not converge within the probe range; "
                "increase max_radius or the imaginary part of tau"
            )
    tails = np.empty(r_hi + 1)
    acc = tail_beyond
    for r in range(r_hi, 0, -1):
        tails[r] = acc
        acc += _ring_bound(r, mu, b, tau.dim)
    tails[0] = acc
    ok = np.nonzero(tails[1:] <= trunc.tail_tol)[0]
    if ok.size == 0:
        raise TruncationInsufficient(
            f"tail bound {tails[-1]:.3e} at radius {r_hi} exceeds tail_tol {trunc.tail_tol:.3e}"
        )
    return int(ok[0]) + 1


def _lattice_box(radius: int, dim: int) -> np.ndarray:
    axes = [np.arange(-radius, radius + 1)] * dim
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=-1)


def theta(z, tau, trunc: ThetaTruncation | None = None) -> complex:
    """Evaluate the theta series with certified absolute error below trunc.tail_tol."""
    tau = _as_siegel(tau)
    trunc = trunc or ThetaTruncation()
    z = _as_zvec(z, tau.dim)
    radius = certified_radius(tau, z, trunc)
    n = _lattice_box(radius, tau.dim)
    quad = np.einsum("ki,ij,kj->k", n, tau.tau, n)
    expo = 1j * np.pi * quad + 2j * np.pi * (n @ z)
    return complex(np.sum(np.exp(expo)))


def theta_grid(z_array: np.ndarray, tau, trunc: ThetaTruncation | None = None,
               extra_im_z: float = 0.0) -> np.ndarray:
    """Vectorized theta over an array of z vectors (shape (..., D)) at fixed tau.

    The truncation radius is certified once for the largest ||Im z|| in the
    batch (plus extra_im_z headroom), then shared by all points.
    """
    tau = _as_siegel(tau)
    trunc = trunc or ThetaTruncation()
    z_array = np.asarray(z_array, dtype=complex)
    if z_array.shape[-1] != tau.dim:
        raise ValueError("z batch has wrong trailing dimension")
    bmax = float(np.max(np.linalg.norm(z_array.imag, axis=-1))) if z_array.size else 0.0
    probe = np.zeros(tau.dim, dtype=complex)
    probe[0] = 1j * (bmax + extra_im_z)
    radius = certified_radius(tau, probe, trunc)
    n = _lattice_box(radius, tau.dim)
    quad = np.einsum("ki,ij,kj->k", n, tau.tau, n)
    coeff = np.exp(1j * np.pi * quad)
    keep = np.abs(coeff) > 1e-20
    n, coeff = n[keep], coeff[keep]
    flat = z_array.reshape(-1, tau.dim)
    out = np.zeros(flat.shape[0], dtype=complex)
    # chunk over lattice terms to bound the temporary (points x terms) array
    step = max(1, int(4e7 // max(1, flat.shape[0])))
    for start in range(0, n.shape[0], step):
        nb = n[start:start + step]
        cb = coeff[start:start + step]
        out += np.exp(2j * np.pi * (flat @ nb.T)) @ cb
    return out.reshape(z_array.shape[:-1])


def theta_1d_grid(z_flat: np.ndarray, tau_scalar: complex,
                  trunc: ThetaTruncation | None = None) -> np.ndarray:
    """One-dimensional theta series over a flat batch of z values at fixed tau."""
    trunc = trunc or ThetaTruncation()
    tau = SiegelMatrix([[tau_scalar]])
    z_flat = np.asarray(z_flat, dtype=complex).ravel()
    bmax = float(np.max(np.abs(z_flat.imag))) if z_flat.size else 0.0
    radius = certified_radius(tau, np.array([1j * bmax]), trunc)
    ns = np.arange(-radius, radius + 1)
    coeff = np.exp(1j * np.pi * complex(tau_scalar) * ns * ns)
    keep = np.abs(coeff) > 1e-22
    ns, coeff = ns[keep], coeff[keep]
    out = np.empty(z_flat.size, dtype=complex)
    step = max(1, int(3e7 // max(1, ns.size)))
    for start in range(0, z_flat.size, step):
        zb = z_flat[start:start + step]
        out[start:start + step] = np.exp(2j * np.pi * zb[:, None] * ns[None, :]) @ coeff
    return out


def det_sqrt_neg_i_tau(tau) -> complex:
    """Principal square root of det(-i tau) via the eigenvalue product.

    Every eigenvalue of -i tau has positive real part when tau is Siegel, so
    the per-eigenvalue principal roots are unambiguous.
    """
    tau = _as_siegel(tau)
    ev = np.linalg.eigvals(-1j * tau.tau)
    if np.any(ev.real <= 0):
        raise NotSiegel("eigenvalues of -i*tau must have positive real part")
    return complex(np.prod(np.sqrt(ev)))


def theta_inverted(z, tau, trunc: ThetaTruncation | None = None) -> complex:
    """theta(tau^-1 z, -tau^-1) evaluated directly from the series.

    This is the left-hand side of the inversion identity, computed without
    using the identity, so the two code paths can be compared in tests.
    """
    tau = _as_siegel(tau)
    z = _as_zvec(z, tau.dim)
    tau_inv = tau.inverse()
    return theta(tau_inv @ z, SiegelMatrix(-tau_inv), trunc)


@dataclass
class LemmaAux:
    """Auxiliary data consumed by check_lemma; only the relevant field is read."""

    m: np.ndarray | None = None          # integer shift, lemmas 1-2
    A: np.ndarray | None = None          # GL(D, Z) matrix, lemma 3
    B: np.ndarray | None = None          # even-diagonal symmetric integer matrix, lemma 4
    scale: float | None = None           # positive scale a, lemma 6


def _require_int_matrix(M, name: str) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M))
    if np.any(M != np.round(M)):
        raise BadAux(f"{name} must have integer entries")
    return M.astype(int)


def check_lemma(lemma_id: int, z, tau, aux: LemmaAux | None = None,
                trunc: ThetaTruncation | None = None) -> float:
    """Absolute residual |LHS - RHS| of one of the six theta identities.

    1: periodicity under integer shifts of z            (needs aux.m)
    2: quasi-periodicity under shifts of z by tau*m      (needs aux.m)
    3: invariance under GL(D, Z) congruence              (needs aux.A)
    4: invariance of tau under even-diagonal B shifts    (needs aux.B)
    5: inversion identity (two independent code paths)
    6: |theta(z, a*tau) - 1| for a large scale a         (needs aux.scale)
    """
    tau = _as_siegel(tau)
    z = _as_zvec(z, tau.dim)
    aux = aux or LemmaAux()
    if lemma_id == 1:
        if aux.m is None:
            raise BadAux("lemma 1 needs an integer vector m")
        m = _require_int_matrix(np.atleast_2d(aux.m), "m").ravel()
        return abs(theta(z + m, tau, trunc) - theta(z, tau, trunc))
    if lemma_id == 2:
        if aux.m is None:
            raise BadAux("lemma 2 needs an integer vector m")
        m = _require_int_matrix(np.atleast_2d(aux.m), "m").ravel()
        lhs = theta(z + tau.tau @ m, tau, trunc)
        factor = np.exp(-1j * np.pi * (m @ tau.tau @ m) - 2j * np.pi * (m @ z))
        return abs(lhs - factor * theta(z, tau, trunc))
    if lemma_id == 3:
        if aux.A is None:
            raise BadAux("lemma 3 needs a GL(D, Z) matrix A")
        A = _require_int_matrix(aux.A, "A")
        if abs(abs(round(float(np.linalg.det(A)))) - 1) > 0:
            raise BadAux("A must be unimodular (integer inverse)")
        lhs = theta(A.T @ z, SiegelMatrix(A.T @ tau.tau @ A), trunc)
        return abs(lhs - theta(z, tau, trunc))
    if lemma_id == 4:
        if aux.B is None:
            raise BadAux("lemma 4 needs an even-diagonal symmetric integer matrix B")
        B = _require_int_matrix(aux.B, "B")
        if np.any(B != B.T):
            raise BadAux("B must be symmetric")
        if np.any(np.diag(B) % 2):
            raise BadAux("B must have even diagonal")
        lhs = theta(z, SiegelMatrix(tau.tau + B), trunc)
        return abs(lhs - theta(z, tau, trunc))
    if lemma_id == 5:
        lhs = theta_inverted(z, tau, trunc)
        tau_inv = tau.inverse()
        rhs = det_sqrt_neg_i_tau(tau) * np.exp(1j * np.pi * (z @ tau_inv @ z)) * theta(z, tau, trunc)
        return abs(lhs - rhs)
    if lemma_id == 6:
        if aux.scale is None or aux.scale <= 0:
            raise BadAux("lemma 6 needs a positive scale a")
        return abs(theta(z, SiegelMatrix(aux.scale * tau.tau), trunc) - 1.0)
    raise ValueError("lemma_id must be in 1..6")


def check_lemma_relative(lemma_id: int, z, tau, aux: LemmaAux | None = None,
                         trunc: ThetaTruncation | None = None) -> float:
    """check_lemma normalized by the magnitude of the identity's right-hand side."""
    tau_s = _as_siegel(tau)
    z = _as_zvec(z, tau_s.dim)
    residual = check_lemma(lemma_id, z, tau_s, aux, trunc)
    if lemma_id == 6:
        return residual
    base = theta(z, tau_s, trunc)
    if lemma_id == 2:
        m = np.asarray(aux.m).ravel()
        scale = abs(np.exp(-1j * np.pi * (m @ tau_s.tau @ m) - 2j * np.pi * (m @ z)) * base)
    elif lemma_id == 5:
        tau_inv = tau_s.inverse()
        scale = abs(det_sqrt_neg_i_tau(tau_s) * np.exp(1j * np.pi * (z @ tau_inv @ z)) * base)
    else:
        scale = abs(base)
    return residual / max(scale, 1e-300)
