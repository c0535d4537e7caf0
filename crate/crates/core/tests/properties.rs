use anyon_core::poisson::*;
use anyon_core::reduction::reduced_generators;
use anyon_core::spectra::{shell_degeneracies, vortex_levels, Prefactor};
use anyon_core::transforms::*;
use anyon_core::{Complex64, Params, Params64, PhaseState, Rational64, Signature};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn nonzero() -> impl Strategy<Value = Complex64> {
    (0.05f64..5.0, -3.2f64..3.2).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn any_c() -> impl Strategy<Value = Complex64> {
    (-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| c(a, b))
}

fn pair(s: &PhaseState<f64>) -> (Complex64, Complex64) {
    match *s {
        PhaseState::FlatC { z, pi } => (z, pi),
        _ => unreachable!(),
    }
}

proptest! {
    #[test]
    fn zn_forward_inverse_is_identity(z in nonzero(), pi in any_c(), n in 1u32..7) {
        let f = CanonicalMap::zn(n, Direction::Forward);
        let w = apply_map(&f, &PhaseState::flat(z, pi)).unwrap();
        let back = apply_map(&f.inverse(), &w).unwrap();
        // the principal branch returns z up to an N-th root of unity; pick the matching branch
        let mut best = f64::INFINITY;
        for b in 0..n {
            let bb = apply_map(&f.inverse().with_branch(b), &w).unwrap();
            let (z2, p2) = pair(&bb);
            best = best.min((z2 - z).norm() + (p2 - pi).norm());
        }
        prop_assert!(best < 1e-10 * (1.0 + z.norm() + pi.norm()).powi(n as i32));
        let (w1, p1) = pair(&w);
        let (w2, p2) = pair(&apply_map(&f, &back).unwrap());
        prop_assert!((w1 - w2).norm() < 1e-10 * (1.0 + w1.norm()));
        prop_assert!((p1 - p2).norm() < 1e-10 * (1.0 + p1.norm()));
    }

    #[test]
    fn bohlin_preserves_area_form_dz_dpi(z in nonzero(), pi in any_c()) {
        // w p = z π / 2 is the Liouville form's generating combination
        let (w, p) = pair(&apply_map(&CanonicalMap::bohlin(Direction::Forward), &PhaseState::flat(z, pi)).unwrap());
        prop_assert!((w * p - z * pi * 0.5).norm() < 1e-12 * (1.0 + (z * pi).norm()));
    }

    #[test]
    fn power_duality_is_an_involution(a in -1.99f64..10.0) {
        let (b, n) = power_duality(a).unwrap();
        let (a2, _) = power_duality(b).unwrap();
        prop_assert!((a2 - a).abs() < 1e-9 * (1.0 + a.abs()));
        prop_assert!(((a + 2.0) * (b + 2.0) - 4.0).abs() < 1e-12 * (a + 2.0).max(1.0));
        prop_assert!((n - (1.0 + a / 2.0)).abs() < 1e-15 * (1.0 + n.abs()));
    }

    #[test]
    fn winding_multiplies_by_order(cx in -1.0f64..1.0, cy in -1.0f64..1.0, radius in 0.3f64..1.5, n in 1u32..4) {
        let center = c(cx, cy);
        prop_assume!((center.norm() - radius).abs() > 0.3);
        let mut t = Trajectory::new("circle", Params64::default());
        for k in 0..=20000 {
            let phi = std::f64::consts::TAU * k as f64 / 20000.0;
            t.push(phi, PhaseState::flat(center + Complex64::from_polar(radius, phi), c(0.0, 0.0)));
        }
        let pre = winding_number(&t, c(0.0, 0.0)).unwrap();
        let img = map_trajectory(&CanonicalMap::zn(n, Direction::Forward), &t, false).unwrap();
        prop_assert_eq!(winding_number(&img, c(0.0, 0.0)).unwrap(), n as i64 * pre);
    }

    #[test]
    fn csv_round_trip_is_exact(values in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6, -1e-6f64..1e-6, -1e3f64..1e3), 1..40)) {
        let mut t = Trajectory::new("random", Params64::default());
        for (k, (a, b, d, e)) in values.iter().enumerate() {
            t.push(k as f64 * 0.37 + 1e-3, PhaseState::flat(c(*a, *b), c(*d, *e)));
        }
        let text = t.to_csv_string().unwrap();
        let back = Trajectory::read_csv(text.as_bytes(), "random", Params64::default()).unwrap();
        prop_assert_eq!(back.samples, t.samples);
    }

    #[test]
    fn canonical_bracket_is_antisymmetric(x in proptest::collection::vec(-3.0f64..3.0, 4), seed in 0u64..1000) {
        let st = BracketStructure::canonical_complex(Params64::default());
        let gens = [osc_hamiltonian(1.0), osc_rotation(), osc_i_plus(1.0), coulomb_rotation()];
        let f = &gens[(seed % 4) as usize];
        let g = &gens[((seed / 4) % 4) as usize];
        let a = st.bracket_coords(f, g, &x).unwrap();
        let b = st.bracket_coords(g, f, &x).unwrap();
        prop_assert!((a + b).norm() < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn reduced_casimirs_hold(px in -3.0f64..3.0, py in -3.0f64..3.0, w in any_c(), m in 0.2f64..3.0, s in -2.0f64..2.0, split in any::<bool>(), neg in any::<bool>()) {
        let sig = if split { Signature::Split } else { Signature::Euclidean };
        let p = c(px, py);
        let q = anyon_core::model::conformal_q(p, sig);
        prop_assume!(q.abs() > 0.05);
        let m = if neg { -m } else { m };
        let params = Params64 { m, s, ..Default::default() };
        let g = reduced_generators(p, w, 0, sig, &params).unwrap();
        let (pp, pj) = g.casimirs(sig);
        let scale = 1.0 + g.P_vec.iter().map(|v| v * v).sum::<f64>();
        prop_assert!((pp - m * m).abs() < 1e-10 * scale);
        let jscale = scale * (1.0 + g.J_vec.iter().map(|v| v.abs()).sum::<f64>());
        prop_assert!((pj - m * s).abs() < 1e-10 * jscale);
        let h = reduced_hamiltonian::<f64>(sig).eval(&[px, py, w.re, w.im]).re;
        prop_assert!((h - g.top(sig)).abs() < 1e-9 * jscale * jscale);
    }

    #[test]
    fn nonzero_sigma_shells_are_even(num in 1i64..12, den in 2i64..13) {
        prop_assume!(num < den);
        let sigma = Rational64::new(num, den);
        let lines = vortex_levels(sigma, 4, 4, &Params64::default(), Prefactor::Derived).unwrap();
        for (_, k) in shell_degeneracies(&lines) {
            prop_assert_eq!(k % 2, 0);
        }
        prop_assert!(lines.iter().all(|l| l.energy < 0.0));
    }

    #[test]
    fn params_json_round_trip(mu in 0.1f64..10.0, omega in 0.1f64..10.0, s in -3.0f64..3.0, num in 0i64..5, den in 1i64..6) {
        prop_assume!(num < den);
        let p = Params64 { mu, omega, s, sigma: Rational64::new(num, den), n: den as u32, ..Default::default() };
        let text = serde_json::to_string(&p).unwrap();
        let back: Params64 = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn single_precision_instantiation() {
    type C32 = num_complex::Complex<f32>;
    let p: Params<f32> = Params::default();
    let st = BracketStructure::canonical_complex(p.clone());
    let rep = audit_algebra(&st, &su2_spec(1.0f32), 50, 3).unwrap();
    assert!(rep.max_abs() < 1e-3, "{rep:?}");
    let (w, pm) = match apply_map(
        &CanonicalMap::bohlin(Direction::Forward),
        &PhaseState::flat(C32::new(1.0, 0.0), C32::new(2.0, 0.0)),
    )
    .unwrap()
    {
        PhaseState::FlatC { z, pi } => (z, pi),
        _ => unreachable!(),
    };
    assert_eq!((w, pm), (C32::new(1.0, 0.0), C32::new(1.0, 0.0)));
    let e: f32 = anyon_core::spectra::vortex_energy(0, Rational64::new(0, 1), &p, Prefactor::Derived);
    assert_eq!(e, -2.0);
    let sys = anyon_core::dynamics::HamiltonianSystem::new(anyon_core::dynamics::SystemKind::Oscillator2D, &p).unwrap();
    let cfg = anyon_core::dynamics::IntegratorConfig::new(anyon_core::dynamics::Method::SplitSymplectic, 0.01f32, 1.0);
    let traj =
        anyon_core::dynamics::flow(&sys, &PhaseState::flat(C32::new(1.0, 0.0), C32::new(0.0, 1.0)), &cfg).unwrap();
    let rep = anyon_core::dynamics::system_drift(&sys, &traj).unwrap();
    assert!(rep.entries[0].relative < 1e-4);
}
