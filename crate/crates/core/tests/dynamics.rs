use anyon_core::dynamics::*;
use anyon_core::poisson::{osc_hamiltonian, runge_lenz, Observable};
use anyon_core::{Complex64, Params64, PhaseState, Rational64, Signature};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
#[allow(clippy::approx_constant)]
fn oscillator_flow_matches_exact_solution() {
    let p = Params64::default();
    let sys = HamiltonianSystem::new(SystemKind::Oscillator2D, &p).unwrap();
    let s0 = PhaseState::flat(c(1.0, 0.0), c(0.0, 1.0));
    let traj = flow(&sys, &s0, &IntegratorConfig::new(Method::SplitSymplectic, 1e-3, 6.2832)).unwrap();
    assert_eq!(traj.len(), 6285);
    let mut worst: f64 = 0.0;
    for (t, s) in &traj.samples {
        let e = oscillator_solution(&p, &s0, *t).unwrap();
        worst = worst.max(s.coords().iter().zip(e.coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        let z = anyon_core::transforms::planar_position(s);
        assert!(z.norm() <= 1.0 + 1e-6);
    }
    assert!(worst < 1e-5, "{worst}");
    let first = traj.positions()[0];
    assert!((traj.positions().last().unwrap() - first).norm() < 1e-4);
    let period = period_estimate(&traj).unwrap();
    assert!((period - std::f64::consts::TAU).abs() < 1e-6, "{period}");
}

#[test]
fn exact_oscillator_period_and_drift() {
    let p = Params64 { omega: 1.7, ..Default::default() };
    let s0 = PhaseState::flat(c(0.4, -0.3), c(1.2, 0.5));
    let traj = oscillator_orbit(&p, &s0, 10.0, 5000).unwrap();
    let per = period_estimate(&traj).unwrap();
    assert!(
        (per - std::f64::consts::PI / 1.7).abs() < 1e-6 || (per - std::f64::consts::TAU / 1.7).abs() < 1e-6,
        "{per}"
    );
    let rep = drift_report(&traj, &[osc_hamiltonian(1.7)]).unwrap();
    assert!(rep.entries[0].relative < 1e-14);
    let one = Observable::real("one", |_x: &[f64]| 1.0);
    assert_eq!(drift_report(&traj, &[one]).unwrap().entries[0].max_abs, 0.0);
}

#[test]
fn empty_trajectory_drift_is_an_error() {
    let t = anyon_core::transforms::Trajectory::<f64>::new("x", Params64::default());
    assert!(drift_report(&t, &[]).is_err());
}

#[test]
fn time_reversal_returns_to_start() {
    let cases: Vec<(SystemKind, Params64, PhaseState<f64>, Method)> = vec![
        (
            SystemKind::Coulomb2D,
            Params64::default(),
            PhaseState::flat(c(1.0, 0.2), c(0.1, -1.1)),
            Method::ImplicitMidpoint,
        ),
        (
            SystemKind::Coulomb2D,
            Params64::default(),
            PhaseState::flat(c(1.0, 0.2), c(0.1, -1.1)),
            Method::SplitSymplectic,
        ),
        (
            SystemKind::Dyon3D,
            Params64 { s: 1.0, ..Default::default() },
            PhaseState::R3Monopole { q: [1.0, 0.2, 0.1], p: [0.0, 0.8, 0.1] },
            Method::ImplicitMidpoint,
        ),
        (
            SystemKind::PseudosphereMonopole,
            Params64 { s: 0.3, m: -1.0, ..Default::default() },
            PhaseState::Reduced { signature: Signature::Split, chart: 0, p: c(0.3, 0.1), w: c(0.2, -0.1) },
            Method::ImplicitMidpoint,
        ),
    ];
    for (kind, p, s0, method) in cases {
        let sys = HamiltonianSystem::new(kind, &p).unwrap();
        let fwd = flow(&sys, &s0, &IntegratorConfig::new(method, 0.01, 1.0)).unwrap();
        let end = *fwd.last().unwrap();
        // reverse momenta: p → −p for flat and R³ states, w → −w on reduced ones
        let flip = |s: PhaseState<f64>| match s {
            PhaseState::FlatC { z, pi } => PhaseState::flat(z.conj(), -pi.conj()),
            PhaseState::R3Monopole { q, p } => PhaseState::R3Monopole { q, p: [-p[0], -p[1], -p[2]] },
            other => other,
        };
        let back = match kind {
            SystemKind::PseudosphereMonopole => {
                // the twist is odd under w → −w; reverse by integrating with −dt instead
                let mut x = end;
                let h = 0.01;
                let sysr = HamiltonianSystem::new(kind, &p).unwrap();
                let bwd = flow_backward(&sysr, &x, h, 100);
                x = bwd;
                x
            }
            _ => {
                // a magnetic charge reverses with the momenta
                let rev = HamiltonianSystem::new(kind, &Params64 { s: -p.s, ..p.clone() }).unwrap();
                flip(*flow(&rev, &flip(end), &IntegratorConfig::new(method, 0.01, 1.0)).unwrap().last().unwrap())
            }
        };
        let err = back.coords().iter().zip(s0.coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{kind:?} {method:?}: {err}");
    }
}

/// Backward midpoint steps computed by solving the forward step from the
/// unknown start with fixed-point iteration on the flow map itself.
fn flow_backward(sys: &HamiltonianSystem<f64>, end: &PhaseState<f64>, h: f64, n: usize) -> PhaseState<f64> {
    let mut x = *end;
    for _ in 0..n {
        let mut guess = x;
        for _ in 0..60 {
            let f = flow(sys, &guess, &IntegratorConfig::new(Method::ImplicitMidpoint, h, h)).unwrap();
            let y = f.last().unwrap().coords();
            let g: Vec<f64> = guess.coords().iter().zip(&y).zip(x.coords()).map(|((g, y), t)| g - (y - t)).collect();
            guess = guess.with_coords(&g);
        }
        x = guess;
    }
    x
}

#[test]
fn vortex_at_zero_sigma_is_coulomb_bit_for_bit() {
    let p = Params64 { sigma: Rational64::new(0, 1), ..Default::default() };
    let s0 = PhaseState::flat(c(1.2, 0.0), c(0.0, -1.5));
    for method in [Method::SplitSymplectic, Method::ImplicitMidpoint] {
        let cfg = IntegratorConfig::new(method, 0.005, 2.0);
        let a = flow(&HamiltonianSystem::new(SystemKind::Vortex2D, &p).unwrap(), &s0, &cfg).unwrap();
        let b = flow(&HamiltonianSystem::new(SystemKind::Coulomb2D, &p).unwrap(), &s0, &cfg).unwrap();
        assert_eq!(a.samples, b.samples);
    }
}

#[test]
fn circular_coulomb_period_follows_kepler_law() {
    let p = Params64 { mu: 0.8, alpha: 1.3, ..Default::default() };
    for r0 in [0.5, 1.0, 2.0] {
        let (s0, period) = circular_coulomb(&p, r0);
        // force balance for H = pp̄/2μ − α/|w| with effective mass 4μ: 4μ v²/r = α/r²
        let expected = std::f64::consts::TAU * (4.0 * 0.8 * r0.powi(3) / 1.3).sqrt();
        assert!((period - expected).abs() < 1e-12 * expected);
        let sys = HamiltonianSystem::new(SystemKind::Coulomb2D, &p).unwrap();
        let traj =
            flow(&sys, &s0, &IntegratorConfig::new(Method::KeplerRegularized, period / 500.0, 1.5 * period)).unwrap();
        let est = period_estimate(&traj).unwrap();
        assert!((est - period).abs() < 1e-6 * period, "{est} vs {period}");
        for z in traj.positions() {
            assert!((z.norm() - r0).abs() < 1e-10);
        }
    }
}

#[test]
fn runge_lenz_conserved_over_a_hundred_periods() {
    let p = Params64::default();
    let sys = HamiltonianSystem::new(SystemKind::Coulomb2D, &p).unwrap();
    let (s0, period) = circular_coulomb(&p, 1.0);
    let s0 = match s0 {
        PhaseState::FlatC { z, pi } => PhaseState::flat(z, pi * 0.8),
        _ => unreachable!(),
    };
    let traj =
        flow(&sys, &s0, &IntegratorConfig::new(Method::KeplerRegularized, period / 200.0, 100.0 * period)).unwrap();
    let rep = drift_report(&traj, &[runge_lenz(p.mu, p.alpha)]).unwrap();
    assert!(rep.entries[0].relative < 1e-7, "{rep:?}");
    let rep = system_drift(&sys, &traj).unwrap();
    assert!(rep.max_relative() < 1e-7, "{rep:?}");
}

#[test]
fn kepler_regularized_agrees_with_midpoint() {
    let p = Params64::default();
    let sys = HamiltonianSystem::new(SystemKind::Coulomb2D, &p).unwrap();
    let s0 = PhaseState::flat(c(1.0, 0.0), c(0.0, -1.2));
    let a = flow(&sys, &s0, &IntegratorConfig::new(Method::KeplerRegularized, 1e-3, 1.0)).unwrap();
    let b = flow(&sys, &s0, &IntegratorConfig::new(Method::ImplicitMidpoint, 1e-3, 1.0)).unwrap();
    let d = a
        .last()
        .unwrap()
        .coords()
        .iter()
        .zip(b.last().unwrap().coords())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(d < 1e-5, "{d}");
    assert!(flow(
        &HamiltonianSystem::new(SystemKind::Oscillator2D, &p).unwrap(),
        &s0,
        &IntegratorConfig::new(Method::KeplerRegularized, 1e-3, 1.0)
    )
    .is_err());
}

#[test]
fn collision_halts_with_diagnostic() {
    let p = Params64::default();
    let sys = HamiltonianSystem::new(SystemKind::Coulomb2D, &p).unwrap();
    let s0 = PhaseState::flat(c(1.0, 0.0), c(0.0, 0.0));
    let r = flow(&sys, &s0, &IntegratorConfig::new(Method::SplitSymplectic, 1e-3, 5.0));
    assert!(matches!(r, Err(anyon_core::Error::Excluded { .. })), "{r:?}");
}

#[test]
fn dyon_generators_conserved_to_t_100() {
    let p = Params64 { s: 1.0, alpha: 1.0, ..Default::default() };
    let sys = HamiltonianSystem::new(SystemKind::Dyon3D, &p).unwrap();
    let s0 = PhaseState::R3Monopole { q: [1.0, 0.0, 0.1], p: [0.0, 0.9, 0.05] };
    let traj = flow(&sys, &s0, &IntegratorConfig::new(Method::LiftedMidpoint, 0.01, 100.0)).unwrap();
    let rep = system_drift(&sys, &traj).unwrap();
    for e in &rep.entries[1..] {
        assert!(e.max_abs < 1e-7, "{e:?}");
    }
}

#[test]
fn sphere_conserves_across_chart_switch() {
    let p = Params64 { s: 0.5, m: 1.0, ..Default::default() };
    let sys = HamiltonianSystem::new(SystemKind::SphereMonopole, &p).unwrap();
    let s0 = PhaseState::Reduced { signature: Signature::Euclidean, chart: 0, p: c(0.5, 0.0), w: c(3.0, 0.0) };
    let traj = flow(&sys, &s0, &IntegratorConfig::new(Method::LiftedMidpoint, 1e-3, 1.0)).unwrap();
    let charts: Vec<u8> = traj
        .samples
        .iter()
        .map(|(_, s)| match s {
            PhaseState::Reduced { chart, .. } => *chart,
            _ => 9,
        })
        .collect();
    let switches = charts.windows(2).filter(|w| w[0] != w[1]).count();
    assert!(switches >= 1);
    let rep = system_drift(&sys, &traj).unwrap();
    assert!(rep.max_relative() < 1e-7, "{rep:?}");
    // values straddling each switch agree to 1e-9
    for (k, w) in traj.samples.windows(2).enumerate() {
        if charts[k] != charts[k + 1] {
            let a = sys.evaluate(&w[0].1);
            let b = sys.evaluate(&w[1].1);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-9, "{x} vs {y}");
            }
        }
    }
}

#[test]
fn pseudosphere_midpoint_conserves() {
    let p = Params64 { s: 0.3, m: -1.0, ..Default::default() };
    let sys = HamiltonianSystem::new(SystemKind::PseudosphereMonopole, &p).unwrap();
    let s0 = PhaseState::Reduced { signature: Signature::Split, chart: 0, p: c(0.3, 0.1), w: c(0.2, -0.1) };
    let traj = flow(&sys, &s0, &IntegratorConfig::new(Method::ImplicitMidpoint, 1e-3, 1.0)).unwrap();
    let rep = system_drift(&sys, &traj).unwrap();
    assert!(rep.entries.iter().all(|e| e.max_abs < 1e-7), "{rep:?}");
}

#[test]
fn system_audits_pass() {
    let cases = [
        (SystemKind::Oscillator2D, Params64::default()),
        (SystemKind::Coulomb2D, Params64::default()),
        (SystemKind::Vortex2D, Params64 { sigma: Rational64::new(1, 2), ..Default::default() }),
        (SystemKind::Dyon3D, Params64 { s: 1.0, ..Default::default() }),
        (SystemKind::SphereMonopole, Params64 { s: 0.5, m: 1.0, ..Default::default() }),
        (SystemKind::PseudosphereMonopole, Params64 { s: 0.5, m: -1.0, ..Default::default() }),
    ];
    for (k, p) in cases {
        let rep = HamiltonianSystem::new(k, &p).unwrap().audit(50, 4).unwrap();
        assert!(rep.max_abs() < 1e-6, "{k:?}: {rep:?}");
    }
}

#[test]
fn config_validation() {
    let p = Params64::default();
    let sys = HamiltonianSystem::new(SystemKind::Oscillator2D, &p).unwrap();
    let s0 = PhaseState::flat(c(1.0, 0.0), c(0.0, 1.0));
    assert!(flow(&sys, &s0, &IntegratorConfig::new(Method::SplitSymplectic, 0.0, 1.0)).is_err());
    let mut cfg = IntegratorConfig::new(Method::ImplicitMidpoint, 0.1, 1.0);
    cfg.newton_tol = 1e-16;
    assert!(flow(&sys, &s0, &cfg).is_err());
    assert!(flow(&sys, &s0, &IntegratorConfig::new(Method::LiftedMidpoint, 0.1, 1.0)).is_err());
    let wrong = PhaseState::R3Monopole { q: [1.0, 0.0, 0.0], p: [0.0; 3] };
    assert!(flow(&sys, &wrong, &IntegratorConfig::new(Method::SplitSymplectic, 0.1, 1.0)).is_err());
    assert!(HamiltonianSystem::new(SystemKind::SphereMonopole, &Params64 { m: 0.0, ..Default::default() }).is_err());
    assert_eq!(SystemKind::parse("Dyon3D").unwrap(), SystemKind::Dyon3D);
    assert!(SystemKind::parse("kepler").is_err());
}

#[test]
fn dyon_circular_orbit_energy_drift_long_run() {
    let p = Params64 { s: 1.0, alpha: 1.0, ..Default::default() };
    let sys = HamiltonianSystem::new(SystemKind::Dyon3D, &p).unwrap();
    let (s0, period) = circular_dyon(&p, 3.0).unwrap();
    let start = std::time::Instant::now();
    let traj =
        flow(&sys, &s0, &IntegratorConfig::new(Method::LiftedMidpoint, period / 500.0, 1000.0 * period)).unwrap();
    let rep = system_drift(&sys, &traj).unwrap();
    eprintln!("dyon long run: {:?}, {:?}", start.elapsed(), rep.entries[0]);
    assert!(rep.entries[0].relative < 1e-8, "{rep:?}");
}
