"""Numerics for path integrals on modular (Zak) phase space of the harmonic oscillator."""

from .errors import (BadAux, BudgetExceeded, CausticError, ConfigError, DimensionMismatch,
                     GaugeMismatch, LatticeMismatch, ModpathError, NotSiegel, ResonantTime,
                     SingularM, TailTooLarge, TruncationInsufficient, UnsupportedDim)
from .phasespace import (GaugeChoice, GeometryForms, LatticeVector, ModularLattice,
                         PhasePoint, PhysicalParams, beta_phase, connection,
                         reduce_to_cell, symplectic)
from .theta import (LemmaAux, SiegelMatrix, ThetaTruncation, check_lemma,
                    det_sqrt_neg_i_tau, theta, theta_grid, theta_inverted)
from .zak import (ModularWavefunction, SchrodingerWavefunction, gauge_relabel,
                  gaussian_state, hermite_state, inner_product, rescaled_zak_error,
                  zak_gradient, zak_transform, weyl_action)
from .dynamics import (CurrentReport, TrajectoryW, hamilton_jacobi_residual,
                       hamilton_principal, hamilton_principal_gradient,
                       modular_hamiltonian, noether_currents, onshell_action,
                       onshell_action_quadrature, stationary_path,
                       symmetry_variation_check)
from .legendre import (ModularLagrangian, QuadraticHamiltonian, eval_legendre_lagrangian,
                       euler_lagrange_matrix, modular_legendre, roundtrip_check)
from .propagator import (AmplitudeRequest, SemiclassicalResult, SlicingPlan,
                         compose_amplitude, compose_smeared, exact_amplitude,
                         exact_amplitude_sectors, fock_smeared, gaussian_decay_fit,
                         infinitesimal_amplitude_sum, infinitesimal_amplitude_theta,
                         mehler_kernel, mehler_smeared, schrodinger_limit_scan,
                         sector_smeared_amplitudes, semiclassical_amplitude,
                         theta_step_grid, evolved_state)

__version__ = "0.1.0"
