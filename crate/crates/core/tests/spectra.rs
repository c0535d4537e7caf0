use anyon_core::spectra::*;
use anyon_core::{Params64, Rational64};
use num_traits::{Signed, ToPrimitive};
use std::collections::BTreeMap;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn unit() -> Params64 {
    Params64::default()
}

#[test]
fn oscillator_examples() {
    let levels = oscillator_levels(3, 6, &unit());
    let find = |nr: u32, m: i64| levels.iter().find(|l| l.nr == nr && l.m == m).unwrap().energy;
    assert_eq!(find(0, 0), 1.0);
    assert_eq!(find(1, 2), 5.0);
    let at3: Vec<_> = levels.iter().filter(|l| l.energy == 3.0).map(|l| (l.nr, l.m)).collect();
    assert_eq!(at3.len(), 3);
    for s in [(1, 0), (0, 2), (0, -2)] {
        assert!(at3.contains(&s));
    }
    let p = Params64 { hbar: 0.5, omega: 3.0, ..Default::default() };
    assert_eq!(oscillator_levels(0, 0, &p)[0].energy, 1.5);
}

#[test]
fn vortex_examples() {
    let p = unit();
    assert_eq!(vortex_energy(0, r(0, 1), &p, Prefactor::Derived), -2.0);
    assert_eq!(vortex_energy(0, r(1, 2), &p, Prefactor::Derived), -0.5);
    assert_eq!(vortex_energy(0, r(-1, 2), &p, Prefactor::Derived), -0.5);
    assert_eq!(vortex_energy(0, r(0, 1), &p, Prefactor::AsPrinted), -4.0);
    let lines = vortex_levels(r(0, 1), 3, 3, &p, Prefactor::Derived).unwrap();
    let shell1: Vec<_> = lines.iter().filter(|l| l.shell() == r(1, 1)).map(|l| (l.nr, l.m_sigma)).collect();
    assert_eq!(shell1.len(), 3);
    for s in [(1, r(0, 1)), (0, r(1, 1)), (0, r(-1, 1))] {
        assert!(shell1.contains(&s));
    }
    assert!(lines.iter().all(|l| l.energy < 0.0));
    assert!(vortex_levels::<f64>(r(1, 1), 1, 1, &p, Prefactor::Derived).is_err());
    assert!(vortex_levels::<f64>(r(-1, 2), 1, 1, &p, Prefactor::Derived).is_err());
}

#[test]
fn prefactor_flag_doubles_energies() {
    let p = Params64 { mu: 1.3, alpha: 0.7, hbar: 0.9, ..Default::default() };
    for l in vortex_levels(r(1, 3), 2, 2, &p, Prefactor::Derived).unwrap() {
        let printed = vortex_energy(l.nr, l.m_sigma, &p, Prefactor::AsPrinted);
        assert!((printed - 2.0 * l.energy).abs() < 1e-15);
    }
}

fn shells_up_to(lines: &[SpectralLine<f64>], k: Rational64) -> BTreeMap<Rational64, u32> {
    shell_degeneracies(lines).into_iter().filter(|(s, _)| *s <= k).collect()
}

#[test]
fn degeneracy_patterns() {
    let p = unit();
    let zero = vortex_levels(r(0, 1), 5, 5, &p, Prefactor::Derived).unwrap();
    let d = shells_up_to(&zero, r(5, 1));
    for k in 0..=5i64 {
        assert_eq!(d[&r(k, 1)], (2 * k + 1) as u32, "shell {k}");
    }
    let half = vortex_levels(r(1, 2), 5, 5, &p, Prefactor::Derived).unwrap();
    for (shell, n) in shells_up_to(&half, r(11, 2)) {
        assert!(n >= 2 && n % 2 == 0, "{shell}: {n}");
    }
    let ground: Vec<_> = half.iter().filter(|l| l.shell() == r(1, 2)).map(|l| l.m_sigma).collect();
    assert_eq!(ground, vec![r(-1, 2), r(1, 2)]);
    // tags enumerate each shell from zero
    for l in &half {
        assert!(l.degeneracy_tag < shell_degeneracies(&half)[&l.shell()]);
    }
}

#[test]
fn oscillator_parity_maps_onto_vortex_sectors() {
    let p = unit();
    let osc = oscillator_levels(3, 6, &p);
    let even = vortex_levels(r(0, 1), 3, 3, &p, Prefactor::Derived).unwrap();
    let odd = vortex_levels(r(1, 2), 3, 2, &p, Prefactor::Derived).unwrap();
    let mut seen_even = 0;
    let mut seen_odd = 0;
    for l in &osc {
        let (nr, m_sigma, sigma) = oscillator_to_vortex(l.nr, l.m);
        assert_eq!(nr, l.nr);
        assert_eq!(m_sigma.abs() * 2, Rational64::from_integer(l.m.abs()));
        let target = if sigma == r(0, 1) { &even } else { &odd };
        assert_eq!(target.iter().filter(|v| v.nr == nr && v.m_sigma == m_sigma).count(), 1, "{l:?}");
        if sigma == r(0, 1) {
            seen_even += 1;
        } else {
            seen_odd += 1;
        }
        // energy dictionary: E_osc = ħω(2N_r + 2|m_σ| + 1) = 2ħω ν
        let nu = nr as f64 + m_sigma.abs().to_f64().unwrap() + 0.5;
        assert!((l.energy - 2.0 * nu).abs() < 1e-14);
    }
    assert_eq!(seen_even, even.len());
    assert_eq!(seen_odd, odd.len());
}

#[test]
fn zn_split_examples() {
    assert_eq!(zn_split(2, 1).unwrap().sigma, r(1, 2));
    let f = zn_split(3, 2).unwrap();
    assert_eq!(f.sigma, r(2, 3));
    assert_eq!(f.members(1), vec![r(-5, 3), r(-2, 3), r(2, 3), r(5, 3)]);
    assert!(f.contains(r(-5, 3)) && !f.contains(r(1, 3)));
    let one = zn_split(1, 0).unwrap();
    assert_eq!(one.sigma, r(0, 1));
    assert_eq!(one.members(1), vec![r(-1, 1), r(0, 1), r(1, 1)]);
    assert!(zn_split(1, 1).is_err());
    assert!(zn_split(0, 0).is_err());
}

#[test]
fn aharonov_bohm_examples() {
    let p = unit();
    let a = aharonov_bohm_shift(r(0, 1), &p, Prefactor::Derived).unwrap();
    let b = aharonov_bohm_shift(r(1, 2), &p, Prefactor::Derived).unwrap();
    assert_eq!((a.ground_energy, b.ground_energy), (-2.0, -0.5));
    assert_eq!(a.spin, "0");
    assert_eq!(b.spin, "1/2");
    assert_eq!(b.ground_m_sigma, vec!["-1/2", "1/2"]);
    assert_eq!((a.ground_multiplicity, b.ground_multiplicity), (1, 2));
    for s in [r(0, 1), r(1, 2)] {
        assert!(aharonov_bohm_shift(s, &p, Prefactor::Derived).unwrap().reflection_symmetric);
    }
    // the ±(j+σ) family is mirrored onto itself only for σ ∈ {0, 1/2}
    assert!(!aharonov_bohm_shift(r(1, 3), &p, Prefactor::Derived).unwrap().reflection_symmetric);
    let q = aharonov_bohm_shift(r(1, 3), &p, Prefactor::Derived).unwrap();
    let q2 = aharonov_bohm_shift(r(2, 3), &p, Prefactor::Derived).unwrap();
    assert!(
        a.ground_energy < q.ground_energy && q.ground_energy < b.ground_energy && b.ground_energy < q2.ground_energy
    );
}

#[test]
fn tridiagonal_eigenvalues() {
    let n = 50;
    let t = Tridiagonal { diag: vec![2.0; n], off: vec![-1.0; n - 1] };
    for k in 0..n {
        let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
        assert!((t.eigenvalue(k) - exact).abs() < 1e-12);
    }
    let v = t.inverse_iteration(t.eigenvalue(0), 5);
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-10);
}

/// Independent shooting oracle on `R = r^{|m|} v`: `v'' + (2|m|+1) v'/r =
/// −2μ(α/r + E) v/ħ²`, started from the series `v = 1 + a₁r`,
/// `a₁ = −2μα/(ħ²(2|m|+1))`, integrated by RK4. The `n`-th level is where the
/// node count of `v` jumps from `n` to `n+1`.
fn shooting_energy(m: f64, n: usize, p: &Params64) -> f64 {
    let a0 = p.hbar * p.hbar / (p.mu * p.alpha);
    let nu = n as f64 + m.abs() + 0.5;
    let r_end = 8.0 * a0 * nu * nu + 20.0 * a0;
    let d1 = 2.0 * m.abs() + 1.0;
    let k = 2.0 * p.mu / (p.hbar * p.hbar);
    let nodes = |e: f64| -> usize {
        let rhs = |r: f64, v: f64, dv: f64| -> (f64, f64) { (dv, -d1 * dv / r - k * (p.alpha / r + e) * v) };
        let h = 1e-3 * a0;
        let mut r = 1e-6 * a0;
        let a1 = -k * p.alpha / d1;
        let (mut v, mut dv) = (1.0 + a1 * r, a1);
        let mut count = 0;
        while r < r_end {
            let (k1v, k1d) = rhs(r, v, dv);
            let (k2v, k2d) = rhs(r + 0.5 * h, v + 0.5 * h * k1v, dv + 0.5 * h * k1d);
            let (k3v, k3d) = rhs(r + 0.5 * h, v + 0.5 * h * k2v, dv + 0.5 * h * k2d);
            let (k4v, k4d) = rhs(r + h, v + h * k3v, dv + h * k3d);
            let nv = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            dv += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            if nv.signum() != v.signum() {
                count += 1;
            }
            let s = nv.abs().max(1.0);
            v = nv / s;
            dv /= s;
            r += h;
        }
        count
    };
    let (mut lo, mut hi) = (-4.0 * p.mu * p.alpha * p.alpha / (p.hbar * p.hbar) / (m.abs() + 0.5).powi(2), -1e-9);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if nodes(mid) > n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn shooting_oracle_confirms_derived_prefactor() {
    let p = unit();
    for (nr, m) in [(0usize, 0.0), (1, 0.0), (0, 0.5), (1, 0.5), (0, 1.5), (2, 1.0)] {
        let e = shooting_energy(m, nr, &p);
        let formula = -0.5 / (nr as f64 + m + 0.5).powi(2);
        assert!((e - formula).abs() < 5e-3 * formula.abs(), "({nr},{m}): {e} vs {formula}");
    }
}

#[test]
fn radial_oracle_anchors() {
    let p = unit();
    let g0 = radial_oracle(r(0, 1), r(0, 1), 2, &RadialGrid::for_levels(2, &p), &p).unwrap();
    assert!((g0.energies[0] + 2.0).abs() < 5e-3 * 2.0, "{:?}", g0.energies);
    let g1 = radial_oracle(r(1, 2), r(1, 2), 2, &RadialGrid::for_levels(2, &p), &p).unwrap();
    assert!((g1.energies[0] + 0.5).abs() < 5e-3 * 0.5, "{:?}", g1.energies);
    for (g, s) in [(&g0, 0.0), (&g1, 0.5)] {
        let want = (1.0f64 + s + 0.5).powi(2) / (s + 0.5).powi(2);
        let got = g.energies[0] / g.energies[1];
        assert!((got - want).abs() < 5e-3 * want, "{got} vs {want}");
    }
}

#[test]
fn oracle_table_matches_formula() {
    let p = unit();
    for sigma in [r(0, 1), r(1, 2)] {
        let table = oracle_table(sigma, 3, 3, &RadialGrid::for_levels(4, &p), &p).unwrap();
        for l in vortex_levels(sigma, 3, 3, &p, Prefactor::Derived).unwrap() {
            if l.shell() > r(3, 1) + sigma {
                continue;
            }
            let e = table[&l.m_sigma.abs()].energies[l.nr as usize];
            assert!((e - l.energy).abs() < 5e-3 * l.energy.abs(), "{l:?}: {e}");
        }
    }
}

#[test]
fn oracle_converges_at_second_order() {
    let p = unit();
    let grid = RadialGrid::new(80.0, 1000, GridScheme::LogStretched);
    for m in [0.0, 0.5, 1.0] {
        let e = |n: usize| radial_hamiltonian(m, n, &grid, &p).0.eigenvalue(0);
        let (e1, e2, e4) = (e(1000), e(2000), e(4000));
        let ratio = (e1 - e2) / (e2 - e4);
        assert!((ratio - 4.0).abs() < 0.4, "m={m}: ratio {ratio}");
        let rich_a = (4.0 * e2 - e1) / 3.0;
        let rich_b = (4.0 * e4 - e2) / 3.0;
        assert!((rich_a - rich_b).abs() < 0.1 * (e2 - rich_b).abs(), "m={m}");
    }
}

#[test]
fn oracle_errors() {
    let p = unit();
    let small = RadialGrid::new(5.0, 400, GridScheme::Uniform);
    assert!(radial_oracle(r(0, 1), r(0, 1), 2, &small, &p).is_err());
    let grid = RadialGrid::for_levels(1, &p);
    assert!(radial_oracle(r(1, 2), r(1, 1), 1, &grid, &p).is_err());
    let bad = Params64 { alpha: -1.0, ..Default::default() };
    assert!(radial_oracle(r(0, 1), r(0, 1), 1, &grid, &bad).is_err());
    let coarse = RadialGrid::new(grid.r_max, 100, GridScheme::Uniform);
    assert!(matches!(radial_oracle(r(0, 1), r(0, 1), 1, &coarse, &p), Err(anyon_core::Error::RefinementNeeded(_))));
}

#[test]
fn spectral_line_json() {
    let l = vortex_levels(r(1, 2), 0, 0, &unit(), Prefactor::Derived).unwrap();
    let s = serde_json::to_string(&l[0]).unwrap();
    assert!(s.contains("\"m_sigma\":\"-1/2\""), "{s}");
    let back: SpectralLine<f64> = serde_json::from_str(&s).unwrap();
    assert_eq!(back, l[0]);
}
