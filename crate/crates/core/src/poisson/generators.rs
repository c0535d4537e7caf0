//! Built-in observables and algebra specifications.
//!
//! Coordinate layouts follow [`crate::model::PhaseState::coords`]:
//! `FlatC` is `(re z, im z, re π, im π)` (on the Coulomb side `z → w`,
//! `π → p`), `R3Monopole` is `(q, p)`, reduced charts are `(re p, im p, re w, im w)`.

use super::observable::{wirtinger, FdMode, Observable};
use super::AlgebraSpec;
use crate::model::{Params, Signature};
use crate::reduction;
use crate::scalar::Real;
use num_complex::Complex;

fn cz<T: Real>(x: &[T], i: usize) -> Complex<T> {
    Complex::new(x[i], x[i + 1])
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Gradient on `FlatC` from Wirtinger derivatives `(∂z, ∂z̄, ∂π, ∂π̄)`.
fn flat_grad<T: Real>(dz: Complex<T>, dzb: Complex<T>, dp: Complex<T>, dpb: Complex<T>) -> Vec<Complex<T>> {
    let [a, b] = wirtinger(dz, dzb);
    let [e, f] = wirtinger(dp, dpb);
    vec![a, b, e, f]
}

/// Levi-Civita: for `(a, b)` returns `(c, ε_abc)`, or `None` when `a == b`.
pub fn levi(a: usize, b: usize) -> Option<(usize, f64)> {
    if a == b {
        return None;
    }
    let c = 3 - a - b;
    let sign = if (a + 1) % 3 == b { 1.0 } else { -1.0 };
    Some((c, sign))
}

// --- oscillator -----------------------------------------------------------

/// `H_osc = ω(π π̄ + z z̄)`.
pub fn osc_hamiltonian<T: Real>(omega: T) -> Observable<T> {
    Observable::real("H_osc", move |x: &[T]| omega * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]))
        .with_grad(move |x| x.iter().map(|v| Complex::new(T::lit(2.0) * omega * *v, T::zero())).collect())
}

/// Rotation generator `J = i(zπ − z̄π̄)`.
pub fn osc_rotation<T: Real>() -> Observable<T> {
    let i = Complex::new(T::zero(), T::one());
    Observable::new("J", move |x: &[T]| {
        let (z, p) = (cz(x, 0), cz(x, 2));
        i * (z * p - (z * p).conj())
    })
    .with_grad(move |x| {
        let (z, p) = (cz(x, 0), cz(x, 2));
        flat_grad(i * p, -i * p.conj(), i * z, -i * z.conj())
    })
}

/// `I⁺ = ω(π² + z̄²)`, the conserved quadratic integral.
pub fn osc_i_plus_raw<T: Real>(omega: T) -> Observable<T> {
    let zero = Complex::new(T::zero(), T::zero());
    Observable::new("I+raw", move |x: &[T]| {
        let (z, p) = (cz(x, 0), cz(x, 2));
        (p * p + z.conj() * z.conj()) * omega
    })
    .with_grad(move |x| {
        let (z, p) = (cz(x, 0), cz(x, 2));
        let two = T::lit(2.0) * omega;
        flat_grad(zero, z.conj() * two, p * two, zero)
    })
}

/// `I⁻ = ω(π̄² + z²)`.
pub fn osc_i_minus_raw<T: Real>(omega: T) -> Observable<T> {
    osc_i_plus_raw(omega).conj().renamed("I-raw")
}

/// `I⁺ = iω(π² + z̄²)/√2`, normalized so that `−i{I⁺, I⁻} = 2ω²J`.
pub fn osc_i_plus<T: Real>(omega: T) -> Observable<T> {
    osc_i_plus_raw(omega).scale(Complex::new(T::zero(), T::one() / T::lit(2.0).sqrt())).renamed("I+")
}

/// `I⁻ = iω(π̄² + z²)/√2`.
pub fn osc_i_minus<T: Real>(omega: T) -> Observable<T> {
    osc_i_minus_raw(omega).scale(Complex::new(T::zero(), T::one() / T::lit(2.0).sqrt())).renamed("I-")
}

/// `{I⁺, I⁻} = 2ω²J`, `{I±, J} = ±2I±` with bracket factor `−i`.
pub fn su2_spec<T: Real>(omega: T) -> AlgebraSpec<T> {
    let w2 = omega * omega;
    AlgebraSpec::new("su2", vec![osc_rotation(), osc_i_plus(omega), osc_i_minus(omega)])
        .with_factor(c(0.0, -1.0))
        .relation("I+", "I-", &[(Complex::new(T::lit(2.0) * w2, T::zero()), &["J"])])
        .relation("I+", "J", &[(c(2.0, 0.0), &["I+"])])
        .relation("I-", "J", &[(c(-2.0, 0.0), &["I-"])])
        .relation("J", "J", &[])
}

/// The same algebra for the unnormalized integrals:
/// `{I⁺, I⁻} = −4iω²J`, `{I±, J} = ±2i I±`.
pub fn su2_raw_spec<T: Real>(omega: T) -> AlgebraSpec<T> {
    let w2 = omega * omega;
    AlgebraSpec::new("su2-raw", vec![osc_rotation(), osc_i_plus_raw(omega), osc_i_minus_raw(omega)])
        .relation("I+raw", "I-raw", &[(Complex::new(T::zero(), -T::lit(4.0) * w2), &["J"])])
        .relation("I+raw", "J", &[(c(0.0, 2.0), &["I+raw"])])
        .relation("I-raw", "J", &[(c(0.0, -2.0), &["I-raw"])])
}

/// Conservation of `J, I⁺, I⁻` under `H_osc`.
pub fn oscillator_conservation_spec<T: Real>(omega: T) -> AlgebraSpec<T> {
    AlgebraSpec::new(
        "oscillator-integrals",
        vec![osc_hamiltonian(omega), osc_rotation(), osc_i_plus(omega), osc_i_minus(omega)],
    )
    .relation("H_osc", "J", &[])
    .relation("H_osc", "I+", &[])
    .relation("H_osc", "I-", &[])
}

// --- Coulomb / vortex ------------------------------------------------------

/// `H_C = p p̄/(2μ) − α/|w|`.
pub fn coulomb_hamiltonian<T: Real>(mu: T, alpha: T) -> Observable<T> {
    vortex_term_hamiltonian("H_C", mu, alpha, T::zero())
}

/// `H_σ = p p̄/(2μ) + ħ²σ²/(2μ|w|²) − α/|w|`.
pub fn vortex_hamiltonian<T: Real>(params: &Params<T>) -> Observable<T> {
    let sig = params.sigma_real();
    let c = params.hbar * params.hbar * sig * sig / (T::lit(2.0) * params.mu);
    vortex_term_hamiltonian("H_vortex", params.mu, params.alpha, c)
}

fn vortex_term_hamiltonian<T: Real>(name: &str, mu: T, alpha: T, c: T) -> Observable<T> {
    Observable::real(name, move |x: &[T]| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let r = r2.sqrt();
        let kin = (x[2] * x[2] + x[3] * x[3]) / (T::lit(2.0) * mu);
        kin - alpha / r + c / r2
    })
    .with_grad(move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let r = r2.sqrt();
        let r3 = r2 * r;
        let coul = |v: T| alpha * v / r3;
        let cent = |v: T| -T::lit(2.0) * c * v / (r2 * r2);
        let z = T::zero();
        vec![
            Complex::new(coul(x[0]) + cent(x[0]), z),
            Complex::new(coul(x[1]) + cent(x[1]), z),
            Complex::new(x[2] / mu, z),
            Complex::new(x[3] / mu, z),
        ]
    })
}

/// Rotation generator `J̃ = i(w p − w̄ p̄)`.
pub fn coulomb_rotation<T: Real>() -> Observable<T> {
    osc_rotation().renamed("Jt")
}

/// Runge–Lenz vector (complex form) `Ĩ = i J̃ p − 2μα w̄/|w|`.
pub fn runge_lenz<T: Real>(mu: T, alpha: T) -> Observable<T> {
    let i = Complex::new(T::zero(), T::one());
    Observable::new("It", move |x: &[T]| {
        let (w, p) = (cz(x, 0), cz(x, 2));
        let jt = i * (w * p - (w * p).conj());
        i * jt * p - w.conj() * (T::lit(2.0) * mu * alpha / w.norm())
    })
}

/// Conservation of `J̃` and both components of `Ĩ` under `H_C`.
pub fn coulomb_conservation_spec<T: Real>(mu: T, alpha: T) -> AlgebraSpec<T> {
    AlgebraSpec::new(
        "coulomb-integrals",
        vec![coulomb_hamiltonian(mu, alpha), coulomb_rotation(), runge_lenz(mu, alpha)],
    )
    .relation("H_C", "Jt", &[])
    .relation("H_C", "It", &[])
}

// --- charge–dyon on R³ -----------------------------------------------------

/// `H = |p|²/(2μ) + s²/(2μ|q|²) − α/|q|`.
pub fn dyon_hamiltonian<T: Real>(params: &Params<T>) -> Observable<T> {
    let (mu, alpha, s) = (params.mu, params.alpha, params.s);
    let two = T::lit(2.0);
    Observable::real("H", move |x: &[T]| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let p2 = x[3] * x[3] + x[4] * x[4] + x[5] * x[5];
        p2 / (two * mu) + s * s / (two * mu * r2) - alpha / r2.sqrt()
    })
    .with_grad(move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let r = r2.sqrt();
        let k = -s * s / (mu * r2 * r2) + alpha / (r2 * r);
        let mut g: Vec<Complex<T>> = x[..3].iter().map(|&q| Complex::new(k * q, T::zero())).collect();
        g.extend(x[3..6].iter().map(|&p| Complex::new(p / mu, T::zero())));
        g
    })
}

/// Rotation generator `J^a = ε^{abc} p_b q_c − s q^a/|q|`.
pub fn dyon_rotation<T: Real>(a: usize, s: T) -> Observable<T> {
    let (b, c) = ((a + 1) % 3, (a + 2) % 3);
    Observable::real(format!("J{}", a + 1), move |x: &[T]| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        x[3 + b] * x[c] - x[3 + c] * x[b] - s * x[a] / r
    })
    .with_grad(move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let r = r2.sqrt();
        let z = T::zero();
        let mut g = vec![Complex::new(z, z); 6];
        for (k, gk) in g.iter_mut().enumerate().take(3) {
            let delta = if k == a { T::one() } else { z };
            gk.re = -s * (delta / r - x[a] * x[k] / (r2 * r));
        }
        g[c].re = g[c].re + x[3 + b];
        g[b].re = g[b].re - x[3 + c];
        g[3 + b].re = x[c];
        g[3 + c].re = -x[b];
        g
    })
}

/// `{J^a, J^b} = ε^{abc} J^c` for the monopole rotation generators.
pub fn so3_monopole_spec<T: Real>(s: T) -> AlgebraSpec<T> {
    let gens = (0..3).map(|a| dyon_rotation(a, s)).collect();
    let mut spec = AlgebraSpec::new("so3-monopole", gens);
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        let (cc, sign) = levi(a, b).expect("distinct");
        spec = spec.relation(
            &format!("J{}", a + 1),
            &format!("J{}", b + 1),
            &[(c(sign, 0.0), &[format!("J{}", cc + 1).as_str()])],
        );
    }
    spec
}

/// Conservation of `J^a` under the dyon Hamiltonian.
pub fn dyon_conservation_spec<T: Real>(params: &Params<T>) -> AlgebraSpec<T> {
    let mut gens = vec![dyon_hamiltonian(params)];
    gens.extend((0..3).map(|a| dyon_rotation(a, params.s)));
    AlgebraSpec::new("dyon-integrals", gens).relation("H", "J1", &[]).relation("H", "J2", &[]).relation("H", "J3", &[])
}

// --- reduced sphere / pseudosphere ----------------------------------------

/// `P^a` on a reduced chart.
pub fn reduced_p<T: Real>(a: usize, signature: Signature, chart: u8, m: T) -> Observable<T> {
    Observable::real(format!("P{}", a + 1), move |x: &[T]| {
        reduction::chart_p_vec(Complex::new(x[0], x[1]), signature, chart, m)[a]
    })
    .with_fd(FdMode::Richardson)
}

/// `J^a` on a reduced chart.
pub fn reduced_j<T: Real>(a: usize, signature: Signature, chart: u8, m: T, s: T) -> Observable<T> {
    Observable::real(format!("J{}", a + 1), move |x: &[T]| {
        reduction::chart_j_vec(Complex::new(x[0], x[1]), Complex::new(x[2], x[3]), signature, chart, m, s)[a]
    })
    .with_fd(FdMode::Richardson)
}

/// Reduced Hamiltonian `H = ε m g⁻¹ w w̄ = J^a J_a − s²` (`ε = ±1` by signature).
pub fn reduced_hamiltonian<T: Real>(signature: Signature) -> Observable<T> {
    let eps = signature.eta1::<T>();
    Observable::real("H", move |x: &[T]| {
        let q = T::one() + eps * (x[0] * x[0] + x[1] * x[1]);
        eps * q * q * (x[2] * x[2] + x[3] * x[3])
    })
    .with_grad(move |x| {
        let q = T::one() + eps * (x[0] * x[0] + x[1] * x[1]);
        let ww = x[2] * x[2] + x[3] * x[3];
        let two = T::lit(2.0);
        let dq = |v: T| eps * two * q * eps * two * v * ww;
        let z = T::zero();
        vec![
            Complex::new(dq(x[0]), z),
            Complex::new(dq(x[1]), z),
            Complex::new(eps * q * q * two * x[2], z),
            Complex::new(eps * q * q * two * x[3], z),
        ]
    })
}

fn poincare_spec<T: Real>(name: &str, gens: Vec<Observable<T>>, signature: Signature) -> AlgebraSpec<T> {
    let g = signature.metric3::<f64>();
    let mut spec = AlgebraSpec::new(name, gens);
    for a in 0..3 {
        for b in 0..3 {
            let (pa, pb) = (format!("P{}", a + 1), format!("P{}", b + 1));
            let (ja, jb) = (format!("J{}", a + 1), format!("J{}", b + 1));
            if a < b {
                spec = spec.relation(&pa, &pb, &[]);
            }
            match levi(a, b) {
                None => spec = spec.relation(&pa, &jb, &[]),
                Some((cc, sign)) => {
                    let pc = format!("P{}", cc + 1);
                    let jc = format!("J{}", cc + 1);
                    let k = c(sign * g[cc], 0.0);
                    spec = spec.relation(&pa, &jb, &[(k, &[pc.as_str()])]);
                    if a < b {
                        spec = spec.relation(&ja, &jb, &[(k, &[jc.as_str()])]);
                    }
                }
            }
        }
    }
    spec
}

/// `{P^a,P^b} = 0`, `{P^a,J^b} = ε^{abc} P_c`, `{J^a,J^b} = ε^{abc} J_c` on a
/// reduced chart: e(3) for the sphere, iso(1,2) for the pseudosphere.
pub fn reduced_poincare_spec<T: Real>(signature: Signature, chart: u8, params: &Params<T>) -> AlgebraSpec<T> {
    let mut gens: Vec<Observable<T>> = (0..3).map(|a| reduced_p(a, signature, chart, params.m)).collect();
    gens.extend((0..3).map(|a| reduced_j(a, signature, chart, params.m, params.s)));
    let name = match signature {
        Signature::Euclidean => "e3",
        Signature::Split => "iso12",
    };
    poincare_spec(name, gens, signature)
}

/// Conservation of `J^a` under the reduced Hamiltonian.
pub fn reduced_conservation_spec<T: Real>(signature: Signature, chart: u8, params: &Params<T>) -> AlgebraSpec<T> {
    let mut gens = vec![reduced_hamiltonian(signature)];
    gens.extend((0..3).map(|a| reduced_j(a, signature, chart, params.m, params.s)));
    AlgebraSpec::new("reduced-integrals", gens).relation("H", "J1", &[]).relation("H", "J2", &[]).relation(
        "H",
        "J3",
        &[],
    )
}

// --- T*C² ----------------------------------------------------------------

/// `P = π^α η_αβ π̄^β`.
pub fn c2_p<T: Real>(signature: Signature) -> Observable<T> {
    Observable::real("P", move |x: &[T]| reduction::moment_map_coords(x, signature).0)
}

/// `J = −Im(π^α ω_α)`.
pub fn c2_j<T: Real>(signature: Signature) -> Observable<T> {
    Observable::real("J", move |x: &[T]| reduction::moment_map_coords(x, signature).1)
}

/// `P^a = π T^a π̄` on `T*C²`.
pub fn c2_p_vec<T: Real>(a: usize, signature: Signature) -> Observable<T> {
    Observable::real(format!("P{}", a + 1), move |x: &[T]| reduction::flat_p_vec_coords(x, signature)[a])
}

/// `J^a` on `T*C²`.
pub fn c2_j_vec<T: Real>(a: usize, signature: Signature) -> Observable<T> {
    Observable::real(format!("J{}", a + 1), move |x: &[T]| reduction::flat_j_vec_coords(x, signature)[a])
}

/// The Poincaré-type algebra realized directly on `T*C²`.
pub fn c2_poincare_spec<T: Real>(signature: Signature) -> AlgebraSpec<T> {
    let mut gens: Vec<Observable<T>> = (0..3).map(|a| c2_p_vec(a, signature)).collect();
    gens.extend((0..3).map(|a| c2_j_vec(a, signature)));
    let name = match signature {
        Signature::Euclidean => "e3-flat",
        Signature::Split => "iso12-flat",
    };
    poincare_spec(name, gens, signature)
}

/// `{P, J} = 0` and invariance of `P^a`, `J^a` under `P` and `J`.
pub fn c2_moment_spec<T: Real>(signature: Signature) -> AlgebraSpec<T> {
    let mut gens = vec![c2_p(signature), c2_j(signature)];
    gens.extend((0..3).map(|a| c2_p_vec(a, signature)));
    gens.extend((0..3).map(|a| c2_j_vec(a, signature)));
    let mut spec = AlgebraSpec::new("moment-map", gens).relation("P", "J", &[]);
    for gen in ["P", "J"] {
        for a in 1..=3 {
            spec = spec.relation(gen, &format!("P{a}"), &[]);
            spec = spec.relation(gen, &format!("J{a}"), &[]);
        }
    }
    spec
}
