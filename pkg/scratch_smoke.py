"""Scratch: early numeric checks of the core identities (not part of the suite)."""
import numpy as np
import modpath as mp

rng = np.random.default_rng(7)
params = mp.PhysicalParams()
lattice = mp.ModularLattice.natural(params)
print("lam, lam_tilde:", lattice.lam, lattice.lam_tilde)

# 1. theta fixture
v = mp.theta([0.0], [[1j]])
print("theta(0,i) =", v, "expected 1.0864348112133080")

# 2. inversion identity residual at random Siegel points
for D in (1, 2):
    for _ in range(3):
        re = rng.normal(size=(D, D)); re = 0.5 * (re + re.T)
        im = rng.normal(size=(D, D)); im = im @ im.T + 0.3 * np.eye(D)
        tau = re + 1j * im
        z = rng.normal(size=D) + 1j * rng.normal(size=D) * 0.3
        r = mp.check_lemma(5, z, tau)
        print(f"D={D} lemma5 abs residual: {r:.3e}")

# 3. connection closed forms
X = mp.PhasePoint([0.4], [-0.7])
print("A zero:", mp.connection(X, mp.GaugeChoice.zero(), 1.0))
print("A sch :", mp.connection(X, mp.GaugeChoice.schrodinger(1.0), 1.0))
print("A mom :", mp.connection(X, mp.GaugeChoice.momentum(1.0), 1.0))

# 4. step kernel: sum vs theta routes
for gauge in (mp.GaugeChoice.zero(), mp.GaugeChoice.schrodinger(1.0), mp.GaugeChoice.momentum(1.0)):
    for dt in (1e-3, 0.02, 0.1):
        Xp = mp.PhasePoint(rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1))
        Xn = mp.PhasePoint(rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1))
        req = mp.AmplitudeRequest(Xp, Xn, 0.0, 1.0, params, lattice, gauge, epsilon=1e-3)
        a = mp.infinitesimal_amplitude_sum(Xn, Xp, dt, req)
        b = mp.infinitesimal_amplitude_theta(Xn, Xp, dt, req)
        print(f"{gauge.kind:12s} dt={dt:7.3f} |sum-theta|/|theta| = {abs(a-b)/abs(b):.3e}  |A|={abs(b):.3e}")

# 5. grid step kernel matches the scalar one
req = mp.AmplitudeRequest(mp.PhasePoint([0.], [0.]), mp.PhasePoint([0.1], [0.]), 0.0, 1.0,
                          params, lattice, mp.GaugeChoice.zero(), epsilon=1e-3)
Xp = mp.PhasePoint([0.3], [-0.2]); Xn = mp.PhasePoint([-0.4], [0.5])
g = mp.theta_step_grid(np.array([Xn.x[0]]), np.array([Xn.xt[0]]),
                       np.array([Xp.x[0]]), np.array([Xp.xt[0]]), 0.05, req)
s = mp.infinitesimal_amplitude_theta(Xn, Xp, 0.05, req)
print("grid vs scalar:", abs(g[0] - s) / abs(s))

# 6. exact amplitude quasi-periodicity (Appendix B) in all three gauges
for gauge in (mp.GaugeChoice.zero(), mp.GaugeChoice.schrodinger(1.0), mp.GaugeChoice.momentum(1.0)):
    X0 = mp.PhasePoint([0.21], [-0.33]); Xf = mp.PhasePoint([-0.11], [0.42])
    req = mp.AmplitudeRequest(X0, Xf, 0.0, 0.9, params, lattice, gauge, epsilon=1e-3)
    A = mp.exact_amplitude(req)
    K = lattice.vector([1], [-2])
    reqs = mp.AmplitudeRequest(X0, mp.PhasePoint(Xf.x + K.point.x, Xf.xt + K.point.xt),
                               0.0, 0.9, params, lattice, gauge, epsilon=1e-3)
    As = mp.exact_amplitude(reqs)
    expected = np.exp(-1j * mp.beta_phase(Xf, K, gauge, 1.0)) * A
    print(f"{gauge.kind:12s} final-shift residual {abs(As - expected)/abs(A):.3e}  |A|={abs(A):.3e}")
    req0 = mp.AmplitudeRequest(mp.PhasePoint(X0.x + K.point.x, X0.xt + K.point.xt), Xf,
                               0.0, 0.9, params, lattice, gauge, epsilon=1e-3)
    A0 = mp.exact_amplitude(req0)
    expected0 = np.exp(+1j * mp.beta_phase(X0, K, gauge, 1.0)) * A
    print(f"{gauge.kind:12s} initial-shift residual {abs(A0 - expected0)/abs(A):.3e}")

# 7. semiclassical dual route
req = mp.AmplitudeRequest(mp.PhasePoint([0.2], [-0.1]), mp.PhasePoint([-0.3], [0.25]),
                          0.0, 1.3, params, lattice, mp.GaugeChoice.zero(),
                          epsilon=0.2, winding_cut=10)
sc = mp.semiclassical_amplitude(req)
print("semiclassical direct vs theta:", abs(sc.direct - sc.theta_form) / abs(sc.theta_form),
      "|A|=", abs(sc.theta_form))

# 8. stationary path boundary + EOM
W = lattice.vector([1], [0])
traj = mp.stationary_path(mp.PhasePoint([0.0], [0.0]), mp.PhasePoint([0.3], [-0.2]), W, 0.0, 1.0, params)
print("bdry0:", np.max(np.abs(traj.position(0.0) - np.array([0.0, 0.0]))),
      "bdryf:", np.max(np.abs(traj.position(1.0) - (np.array([0.3, -0.2]) + W.point.vec))))
ts = np.linspace(0.05, 0.95, 7)
forms = mp.GeometryForms(params)
eom = traj.acceleration(ts) - (params.omega * (forms.omega_inv @ forms.metric_G) @ traj.velocity(ts).T).T
print("EOM residual:", np.max(np.abs(eom)))
S_cf = mp.onshell_action(traj, mp.GaugeChoice.zero())
S_q = mp.onshell_action_quadrature(traj, mp.GaugeChoice.zero())
print("action closed vs quad:", S_cf, abs(S_cf - S_q))

# 9. HJ residual
r = mp.hamilton_jacobi_residual(mp.PhasePoint([0.7], [0.2]), 1.1, mp.PhasePoint([0.1], [-0.4]), 0.0,
                                params, mp.GaugeChoice.schrodinger(1.0))
print("HJ residual:", r)

# 10. legendre
H = mp.QuadraticHamiltonian.oscillator(params)
lag = mp.modular_legendre(H, mp.GaugeChoice.zero())
print("Kin - G/Omega:", np.max(np.abs(lag.kinetic - forms.metric_G / params.omega)))
print("roundtrip:", mp.roundtrip_check(H, mp.GaugeChoice.zero()))
