use anyon_core::poisson::*;
use anyon_core::reduction::reduced_twist;
use anyon_core::{Complex64, Params64, PhaseState, Signature};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn flat_structure() -> BracketStructure<f64> {
    BracketStructure::canonical_complex(Params64::default())
}

/// `{f,g} = f_π g_z − f_z g_π + f_π̄ g_z̄ − f_z̄ g_π̄` with Wirtinger derivatives
/// taken by central differences on the complex arguments.
fn wirtinger_bracket(
    f: &dyn Fn(Complex64, Complex64) -> Complex64,
    g: &dyn Fn(Complex64, Complex64) -> Complex64,
    z: Complex64,
    p: Complex64,
) -> Complex64 {
    let h = 1e-5;
    let d = |f: &dyn Fn(Complex64, Complex64) -> Complex64, which: usize| -> (Complex64, Complex64) {
        let shift = |dz: Complex64| if which == 0 { f(z + dz, p) } else { f(z, p + dz) };
        let dx = (shift(c(h, 0.0)) - shift(c(-h, 0.0))) / (2.0 * h);
        let dy = (shift(c(0.0, h)) - shift(c(0.0, -h))) / (2.0 * h);
        ((dx - c(0.0, 1.0) * dy) * 0.5, (dx + c(0.0, 1.0) * dy) * 0.5)
    };
    let (fz, fzb) = d(f, 0);
    let (fp, fpb) = d(f, 1);
    let (gz, gzb) = d(g, 0);
    let (gp, gpb) = d(g, 1);
    fp * gz - fz * gp + fpb * gzb - fzb * gpb
}

#[test]
fn canonical_pi_z_is_one() {
    let st = flat_structure();
    let pi = Observable::complex_coordinate("pi", 2, 3, 4);
    let z = Observable::complex_coordinate("z", 0, 1, 4);
    for at in [PhaseState::flat(c(0.3, -1.0), c(2.0, 0.5)), PhaseState::flat(c(5.0, 0.0), c(0.0, 0.0))] {
        let v = bracket(&st, &pi, &z, &at).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        let v = bracket(&st, &pi.conj(), &z.conj(), &at).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        let v = bracket(&st, &pi, &z.conj(), &at).unwrap();
        assert!(v.norm() < 1e-15);
    }
}

#[test]
fn twisted_north_pole_example() {
    let params = Params64 { s: 1.0, ..Default::default() };
    let st = BracketStructure::r3_twisted(params);
    let p1 = Observable::coordinate("p1", 3, 6);
    let p2 = Observable::coordinate("p2", 4, 6);
    let at = PhaseState::R3Monopole { q: [0.0, 0.0, 1.0], p: [0.3, -0.2, 0.1] };
    let v = bracket(&st, &p1, &p2, &at).unwrap();
    assert!((v.re - 1.0).abs() < 1e-15 && v.im == 0.0);
}

/// Poisson tensor by numerically inverting the twisted symplectic matrix
/// `dq^a∧dp_a + (s/2) ε_abc q^a/|q|³ dq^b∧dq^c`.
#[allow(clippy::needless_range_loop)]
fn inverted_symplectic(q: [f64; 3], s: f64) -> [[f64; 6]; 6] {
    let r3 = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).powf(1.5);
    let mut om = [[0.0; 6]; 6];
    for a in 0..3 {
        om[a][3 + a] = 1.0;
        om[3 + a][a] = -1.0;
    }
    let eps = |a: usize, b: usize, c: usize| -> f64 {
        ((b as f64 - a as f64) * (c as f64 - a as f64) * (c as f64 - b as f64)) / 2.0
    };
    for b in 0..3 {
        for cc in 0..3 {
            for a in 0..3 {
                om[b][cc] += s * eps(a, b, cc) * q[a] / r3;
            }
        }
    }
    // Gauss–Jordan
    let mut m = om;
    let mut inv = [[0.0; 6]; 6];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..6 {
        let piv = (col..6).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for k in 0..6 {
            m[col][k] /= d;
            inv[col][k] /= d;
        }
        for i in 0..6 {
            if i != col {
                let f = m[i][col];
                for k in 0..6 {
                    m[i][k] -= f * m[col][k];
                    inv[i][k] -= f * inv[col][k];
                }
            }
        }
    }
    inv
}

#[test]
fn twisted_tensor_matches_symplectic_inverse() {
    let params = Params64 { s: 0.8, ..Default::default() };
    let st = BracketStructure::r3_twisted(params);
    for k in 0..50 {
        let x = st.sample_point(11, k).unwrap();
        let t = st.tensor(&x).unwrap();
        let inv = inverted_symplectic([x[0], x[1], x[2]], 0.8);
        for i in 0..6 {
            for j in 0..6 {
                assert!((t[i * 6 + j] - inv[i][j]).abs() < 1e-12, "{i},{j}: {} vs {}", t[i * 6 + j], inv[i][j]);
            }
        }
    }
}

#[test]
fn antisymmetry_and_self_bracket() {
    let st = flat_structure();
    let gens = [osc_hamiltonian(1.3), osc_rotation(), osc_i_plus(1.3), osc_i_minus(1.3), runge_lenz(1.0, 2.0)];
    for k in 0..30 {
        let x = st.sample_point(5, k).unwrap();
        for f in &gens {
            assert!(st.bracket_coords(f, f, &x).unwrap().norm() < 1e-12);
            for g in &gens {
                let a = st.bracket_coords(f, g, &x).unwrap();
                let b = st.bracket_coords(g, f, &x).unwrap();
                assert!((a + b).norm() <= 1e-12 * (1.0 + a.norm()));
            }
        }
    }
}

#[test]
fn canonical_bracket_matches_wirtinger_form() {
    let st = flat_structure();
    let w = 1.3;
    let h = |z: Complex64, p: Complex64| c(w * (p.norm_sqr() + z.norm_sqr()), 0.0);
    let j = |z: Complex64, p: Complex64| c(0.0, 1.0) * (z * p - (z * p).conj());
    let ip = |z: Complex64, p: Complex64| (p * p + z.conj() * z.conj()) * w;
    let im = |z: Complex64, p: Complex64| (p.conj() * p.conj() + z * z) * w;
    let obs = [osc_hamiltonian(w), osc_rotation(), osc_i_plus_raw(w), osc_i_minus_raw(w)];
    let fns: [&dyn Fn(Complex64, Complex64) -> Complex64; 4] = [&h, &j, &ip, &im];
    for k in 0..20 {
        let x = st.sample_point(9, k).unwrap();
        let (z, p) = (c(x[0], x[1]), c(x[2], x[3]));
        for a in 0..4 {
            for b in 0..4 {
                let got = st.bracket_coords(&obs[a], &obs[b], &x).unwrap();
                let want = wirtinger_bracket(fns[a], fns[b], z, p);
                assert!((got - want).norm() < 1e-7 * (1.0 + want.norm()), "{a},{b}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn leibniz_rule() {
    let st = flat_structure();
    let f = osc_rotation::<f64>();
    let g = runge_lenz(1.0, 1.5);
    let h = osc_i_plus(0.7);
    let fg = f.mul(&g).without_grad();
    for k in 0..20 {
        let x = st.sample_point(3, k).unwrap();
        let lhs = st.bracket_coords(&fg, &h, &x).unwrap();
        let rhs =
            f.eval(&x) * st.bracket_coords(&g, &h, &x).unwrap() + g.eval(&x) * st.bracket_coords(&f, &h, &x).unwrap();
        assert!((lhs - rhs).norm() < 1e-6 * (1.0 + rhs.norm()), "{lhs} vs {rhs}");
    }
}

#[test]
fn jacobi_on_twisted_structure() {
    let params = Params64 { s: 1.7, ..Default::default() };
    let st = BracketStructure::r3_twisted(params.clone());
    for k in 0..50 {
        let x = st.sample_point(21, k).unwrap();
        assert!(st.jacobi_residual(&x).unwrap() < 1e-6);
    }
    // {p1,{p2,p3}} + cyclic with {p_b,p_c} = s ε q^a/|q|³ written out
    let p = |a: usize| Observable::coordinate(format!("p{a}"), 3 + a, 6);
    let pp = |a: usize| {
        let s = params.s;
        Observable::real(format!("pp{a}"), move |x: &[f64]| {
            s * x[a] / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).powf(1.5)
        })
    };
    for k in 0..50 {
        let x = st.sample_point(22, k).unwrap();
        for a in 0..3 {
            let (b, cc) = ((a + 1) % 3, (a + 2) % 3);
            let direct = st.bracket_coords(&p(b), &p(cc), &x).unwrap();
            assert!((direct - pp(a).eval(&x)).norm() < 1e-12);
        }
        let jac = st.bracket_coords(&p(0), &pp(0), &x).unwrap()
            + st.bracket_coords(&p(1), &pp(1), &x).unwrap()
            + st.bracket_coords(&p(2), &pp(2), &x).unwrap();
        assert!(jac.norm() < 1e-6, "{jac}");
    }
}

#[test]
fn jacobi_on_reduced_and_flat_structures() {
    for sig in [Signature::Euclidean, Signature::Split] {
        let params = Params64 { s: 0.4, m: -1.0, ..Default::default() };
        let st = BracketStructure::reduced(sig, params);
        for k in 0..20 {
            let x = st.sample_point(2, k).unwrap();
            assert!(st.jacobi_residual(&x).unwrap() < 1e-6);
        }
    }
}

#[test]
fn reduced_twist_definition_check() {
    for sig in [Signature::Euclidean, Signature::Split] {
        let params = Params64 { s: 0.6, m: -1.5, ..Default::default() };
        let st = BracketStructure::reduced(sig, params.clone());
        let w = Observable::complex_coordinate("w", 2, 3, 4);
        let p = Observable::complex_coordinate("p", 0, 1, 4);
        for k in 0..50 {
            let x = st.sample_point(4, k).unwrap();
            let pv = c(x[0], x[1]);
            let got = st.bracket_coords(&w, &w.conj(), &x).unwrap();
            let g = anyon_core::model::metric_g(pv, sig, params.m).unwrap();
            assert_eq!(got - c(0.0, 2.0 * params.s / params.m * g), c(0.0, 0.0));
            assert_eq!(got, reduced_twist(pv, sig, params.m, params.s).unwrap());
            assert!((st.bracket_coords(&p, &w, &x).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
            assert!(st.bracket_coords(&p, &p.conj(), &x).unwrap().norm() < 1e-15);
        }
    }
}

#[test]
fn analytic_gradients_match_finite_differences() {
    let params = Params64 { s: 0.9, alpha: 1.4, mu: 0.8, ..Default::default() };
    let flat = flat_structure();
    let r3 = BracketStructure::r3_twisted(params.clone());
    let red = BracketStructure::reduced(Signature::Euclidean, params.clone());
    let cases: Vec<(&BracketStructure<f64>, Observable<f64>)> = vec![
        (&flat, osc_hamiltonian(1.2)),
        (&flat, osc_rotation()),
        (&flat, osc_i_plus(1.2)),
        (&flat, osc_i_minus_raw(1.2)),
        (&flat, coulomb_hamiltonian(0.8, 1.4)),
        (&flat, coulomb_rotation()),
        (&r3, dyon_hamiltonian(&params)),
        (&r3, dyon_rotation(0, 0.9)),
        (&r3, dyon_rotation(2, 0.9)),
        (&red, reduced_hamiltonian(Signature::Euclidean)),
    ];
    for (st, o) in cases {
        assert!(o.has_grad(), "{}", o.name);
        for k in 0..40 {
            let x = st.sample_point(8, k).unwrap();
            let a = o.gradient(&x).unwrap();
            let b = o.fd_gradient(&x, FdMode::Central).unwrap();
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).norm() <= 1e-6 * (1.0 + u.norm()), "{}: {u} vs {v}", o.name);
            }
        }
    }
}

#[test]
fn su2_audit_with_analytic_gradients() {
    let rep = audit_algebra(&flat_structure(), &su2_spec(1.0), 100, 7).unwrap();
    assert!(rep.max_abs() < 1e-10, "{rep:?}");
    let raw = audit_algebra(&flat_structure(), &su2_raw_spec(2.5), 100, 7).unwrap();
    assert!(raw.max_rel() < 1e-10, "{raw:?}");
}

#[test]
fn audit_is_deterministic_and_seed_dependent() {
    let a = audit_algebra(&flat_structure(), &su2_spec(1.0), 40, 7).unwrap();
    let b = audit_algebra(&flat_structure(), &su2_spec(1.0), 40, 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let st = flat_structure();
    assert_ne!(st.sample_point(7, 0).unwrap(), st.sample_point(8, 0).unwrap());
    assert_ne!(st.sample_point(7, 0).unwrap(), st.sample_point(7, 1).unwrap());
}

#[test]
fn conservation_examples() {
    let st = flat_structure();
    let rep = check_conserved(&st, &osc_hamiltonian(1.0), &osc_rotation(), 100, 1).unwrap();
    assert!(rep.max_abs() < 1e-10);
    let rep = check_conserved(&st, &osc_hamiltonian(1.0), &osc_hamiltonian(1.0), 100, 1).unwrap();
    assert!(rep.max_abs() < 1e-14);
    let rep = check_conserved(&st, &coulomb_hamiltonian(1.0, 1.0), &coulomb_rotation(), 100, 1).unwrap();
    assert!(rep.max_abs() < 1e-10);
    let rep = audit_algebra(&st, &coulomb_conservation_spec(1.0, 1.0), 100, 1).unwrap();
    assert!(rep.max_rel() < 1e-7, "{rep:?}");
    let rep = audit_algebra(&st, &oscillator_conservation_spec(2.0), 100, 1).unwrap();
    assert!(rep.max_abs() < 1e-10);
}

#[test]
fn dyon_generators_and_conservation() {
    let params = Params64 { s: 1.0, alpha: 1.0, ..Default::default() };
    let st = BracketStructure::r3_twisted(params.clone());
    let rep = audit_algebra(&st, &so3_monopole_spec(1.0), 100, 3).unwrap();
    assert!(rep.max_abs() < 1e-10, "{rep:?}");
    let rep = audit_algebra(&st, &dyon_conservation_spec(&params), 100, 3).unwrap();
    assert!(rep.max_abs() < 1e-10, "{rep:?}");
}

#[test]
fn momentum_pair_commutes_exactly() {
    let params = Params64 { s: 0.5, m: 1.0, ..Default::default() };
    let st = BracketStructure::reduced(Signature::Euclidean, params.clone());
    let spec = AlgebraSpec::new(
        "p1p2",
        vec![reduced_p(0, Signature::Euclidean, 0, 1.0), reduced_p(1, Signature::Euclidean, 0, 1.0)],
    )
    .relation("P1", "P2", &[]);
    let rep = audit_algebra(&st, &spec, 100, 1).unwrap();
    assert!(rep.max_abs() < 1e-14);
}

#[test]
fn reduced_algebras_with_finite_differences() {
    for sig in [Signature::Euclidean, Signature::Split] {
        for m in [1.0, -1.0] {
            let params = Params64 { s: 0.7, m, ..Default::default() };
            let st = BracketStructure::reduced(sig, params.clone());
            let rep = audit_algebra(&st, &reduced_poincare_spec(sig, 0, &params), 200, 7).unwrap();
            assert!(rep.max_abs() < 1e-7, "{sig:?} m={m}: {:?}", rep.relations);
            let rep = audit_algebra(&st, &reduced_conservation_spec(sig, 0, &params), 100, 7).unwrap();
            assert!(rep.max_abs() < 1e-7, "{sig:?} m={m}: {rep:?}");
        }
    }
    let params = Params64 { s: 0.7, m: 1.0, ..Default::default() };
    let st = BracketStructure::reduced(Signature::Euclidean, params.clone());
    let rep = audit_algebra(&st, &reduced_poincare_spec(Signature::Euclidean, 1, &params), 200, 7).unwrap();
    assert!(rep.max_abs() < 1e-7);
}

#[test]
fn flat_c2_algebras() {
    for sig in [Signature::Euclidean, Signature::Split] {
        let st = BracketStructure::new(StructureKind::CanonicalC2(sig), Params64::default());
        assert!(audit_algebra(&st, &c2_poincare_spec(sig), 100, 3).unwrap().max_abs() < 1e-8);
        assert!(audit_algebra(&st, &c2_moment_spec(sig), 100, 3).unwrap().max_abs() < 1e-8);
    }
}

#[test]
fn algebra_spec_from_json() {
    let json = r#"{
        "name": "su2",
        "structure": "canonical-complex",
        "generators": ["J", "I+", "I-"],
        "bracket_factor": [0, -1],
        "relations": [
            { "lhs": ["I+", "I-"], "rhs": [{ "coeff": [2, 0], "scale": ["omega", "omega"], "gens": ["J"] }] },
            { "lhs": ["I+", "J"], "rhs": [{ "coeff": [2, 0], "gens": ["I+"] }] },
            { "lhs": ["I-", "J"], "rhs": [{ "coeff": [-2, 0], "gens": ["I-"] }] }
        ]
    }"#;
    let params = Params64 { omega: 1.7, ..Default::default() };
    let (st, spec) = load_algebra_spec(json, &params).unwrap();
    let rep = audit_algebra(&st, &spec, 50, 2).unwrap();
    assert!(rep.max_abs() < 1e-10, "{rep:?}");
    let bad = json.replace("\"gens\": [\"J\"]", "\"gens\": [\"K\"]");
    assert!(load_algebra_spec(&bad, &params).is_err());
    let bad = json.replace("canonical-complex", "nowhere");
    assert!(load_algebra_spec(&bad, &params).is_err());
}

#[test]
fn wrong_space_and_nan_are_errors() {
    let st = flat_structure();
    let at = PhaseState::R3Monopole { q: [1.0, 0.0, 0.0], p: [0.0; 3] };
    assert!(bracket(&st, &osc_rotation(), &osc_rotation(), &at).is_err());
    let nan = Observable::real("nan", |_x: &[f64]| f64::NAN);
    let at = PhaseState::flat(c(1.0, 0.0), c(0.0, 1.0));
    assert!(matches!(bracket(&st, &nan, &osc_rotation(), &at), Err(anyon_core::Error::Evaluation(_))));
}
