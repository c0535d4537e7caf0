//! Reduction of `T*C²` (Euclidean or split signature) by the generators
//! `P = π η π̄` and `J = −Im(π^α ω_α)` to the sphere or pseudosphere with a
//! monopole field.
//!
//! Chart 0 uses `p = π¹/π⁰`, chart 1 (sphere only) uses `p = π⁰/π¹`. With
//! `p⁺ = η₁ p̄` and `q = 1 + p p⁺` the reduced coordinates are
//! `w = π⁰ (ω₁ − p⁺ ω₀) / q` (indices exchanged in chart 1). The level values
//! are `m = P` and `s = η₁ J`.

use crate::error::{Error, Result};
use crate::model::{conformal_q, metric_g, p_plus, Params, Signature};
use crate::poisson::REDUCED_TWIST;
use crate::scalar::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use crate::model::FlatC2State;

type C<T> = Complex<T>;
type Mat2<T> = [[C<T>; 2]; 2];

fn cc<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Generator matrices `T^a`: Pauli `(σ¹, σ², σ³)` for the Euclidean
/// signature, `(σ⁰, σ¹, σ²)` for the split one. Chart 1 conjugates by σ¹.
pub fn t_matrices<T: Real>(signature: Signature, chart: u8) -> [Mat2<T>; 3] {
    let z = cc(0.0, 0.0);
    let one = cc(1.0, 0.0);
    let s0 = [[one, z], [z, one]];
    let s1 = [[z, one], [one, z]];
    let s2 = [[z, cc(0.0, -1.0)], [cc(0.0, 1.0), z]];
    let s3 = [[one, z], [z, -one]];
    let base = match signature {
        Signature::Euclidean => [s1, s2, s3],
        Signature::Split => [s0, s1, s2],
    };
    if chart == 0 {
        base
    } else {
        base.map(|t| [[t[1][1], t[1][0]], [t[0][1], t[0][0]]])
    }
}

fn bilinear<T: Real>(u: [C<T>; 2], t: &Mat2<T>, v: [C<T>; 2]) -> C<T> {
    let mut acc = cc(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            acc = acc + u[a] * t[a][b] * v[b];
        }
    }
    acc
}

fn eta<T: Real>(signature: Signature) -> [T; 2] {
    [T::one(), signature.eta1()]
}

/// `(P, J)` for a flat state.
pub fn moment_map<T: Real>(state: &FlatC2State<T>) -> (T, T) {
    let [e0, e1] = eta::<T>(state.signature);
    let p = state.pi0.norm_sqr() * e0 + state.pi1.norm_sqr() * e1;
    let j = -(state.pi0 * state.om0 + state.pi1 * state.om1).im;
    (p, j)
}

pub fn moment_map_coords<T: Real>(x: &[T], signature: Signature) -> (T, T) {
    moment_map(&FlatC2State::from_coords(x, signature))
}

/// `P^a = π T^a π̄`.
pub fn flat_p_vec<T: Real>(state: &FlatC2State<T>) -> [T; 3] {
    let pi = state.pi();
    let pib = pi.map(|c| c.conj());
    t_matrices::<T>(state.signature, 0).map(|t| bilinear(pi, &t, pib).re)
}

pub fn flat_p_vec_coords<T: Real>(x: &[T], signature: Signature) -> [T; 3] {
    flat_p_vec(&FlatC2State::from_coords(x, signature))
}

/// `J^a = −η₁ Im(π T^a η ω)`.
pub fn flat_j_vec<T: Real>(state: &FlatC2State<T>) -> [T; 3] {
    let [e0, e1] = eta::<T>(state.signature);
    let pi = state.pi();
    let eom = [state.om0 * e0, state.om1 * e1];
    t_matrices::<T>(state.signature, 0).map(|t| -e1 * bilinear(pi, &t, eom).im)
}

pub fn flat_j_vec_coords<T: Real>(x: &[T], signature: Signature) -> [T; 3] {
    flat_j_vec(&FlatC2State::from_coords(x, signature))
}

/// Generator values of a point (flat or reduced).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
#[allow(non_snake_case)]
pub struct GeneratorValues<T> {
    pub P: T,
    pub J: T,
    /// Spin value `s = η₁ J`; `P_a J^a = P s`.
    pub s: T,
    pub P_vec: [T; 3],
    pub J_vec: [T; 3],
}

impl<T: Real> GeneratorValues<T> {
    /// `(P^a P_a, P_a J^a)` in the metric of `signature`.
    pub fn casimirs(&self, signature: Signature) -> (T, T) {
        let g = signature.metric3::<T>();
        let pp = (0..3).map(|a| g[a] * self.P_vec[a] * self.P_vec[a]).sum();
        let pj = (0..3).map(|a| g[a] * self.P_vec[a] * self.J_vec[a]).sum();
        (pp, pj)
    }

    /// `J^a J_a − s²`.
    pub fn top(&self, signature: Signature) -> T {
        let g = signature.metric3::<T>();
        (0..3).map(|a| g[a] * self.J_vec[a] * self.J_vec[a]).sum::<T>() - self.s * self.s
    }
}

/// All generators of a flat state.
pub fn flat_generators<T: Real>(state: &FlatC2State<T>) -> GeneratorValues<T> {
    let (p, j) = moment_map(state);
    GeneratorValues {
        P: p,
        J: j,
        s: state.signature.eta1::<T>() * j,
        P_vec: flat_p_vec(state),
        J_vec: flat_j_vec(state),
    }
}

/// Reduced coordinates of a flat state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Projection<T> {
    pub p: C<T>,
    pub w: C<T>,
    pub chart: u8,
    pub m: T,
    pub s: T,
}

/// Projects in the preferred chart: chart 0 for the split signature, and on
/// the sphere whichever of `π⁰`, `π¹` is larger in modulus.
pub fn project<T: Real>(state: &FlatC2State<T>) -> Result<Projection<T>> {
    if state.pi0.norm() == T::zero() && state.pi1.norm() == T::zero() {
        return Err(Error::Singular("pi0 and pi1 both vanish".into()));
    }
    let chart = match state.signature {
        Signature::Split => 0,
        Signature::Euclidean => u8::from(state.pi1.norm() > state.pi0.norm()),
    };
    project_chart(state, chart)
}

/// Projects in a given chart.
pub fn project_chart<T: Real>(state: &FlatC2State<T>, chart: u8) -> Result<Projection<T>> {
    if chart == 1 && state.signature == Signature::Split {
        return Err(Error::Domain("the pseudosphere uses chart 0 only".into()));
    }
    let (a, b, oa, ob) = if chart == 0 {
        (state.pi0, state.pi1, state.om0, state.om1)
    } else {
        (state.pi1, state.pi0, state.om1, state.om0)
    };
    if a.norm() == T::zero() {
        return Err(Error::Singular(format!("pi{} vanishes; chart {chart} unavailable", chart)));
    }
    let p = b / a;
    let pp = p_plus(p, state.signature);
    let q = conformal_q(p, state.signature);
    if q == T::zero() {
        return Err(Error::Domain("state on the null cone".into()));
    }
    let w = a * (ob - pp * oa) / q;
    let (m, j) = moment_map(state);
    Ok(Projection { p, w, chart, m, s: state.signature.eta1::<T>() * j })
}

/// A representative of the fiber over `(p, w)` on the level set `P = m`,
/// `s = η₁ J`.
pub fn lift<T: Real>(p: C<T>, w: C<T>, chart: u8, signature: Signature, m: T, s: T) -> Result<FlatC2State<T>> {
    if chart == 1 && signature == Signature::Split {
        return Err(Error::Domain("the pseudosphere uses chart 0 only".into()));
    }
    let q = conformal_q(p, signature);
    let r = m / q;
    if !(r > T::zero()) {
        return Err(Error::Domain(format!("no lift: m/(1 + p p+) = {r} must be positive at |p| = {}", p.norm())));
    }
    let a = Complex::new(r.sqrt(), T::zero());
    let b = p * a;
    let (pi0, pi1) = if chart == 0 { (a, b) } else { (b, a) };
    let [e0, e1] = eta::<T>(signature);
    let j = signature.eta1::<T>() * s;
    let big_a = Complex::new(T::zero(), -j);
    let om_gauge = [big_a * e0 * pi0.conj() / m, big_a * e1 * pi1.conj() / m];
    // w-part: (ω_a, ω_b) = (w/a)(−p, 1) in the chart's ordering
    let (wa, wb) = (-(w * p) / a, w / a);
    let (om0, om1) =
        if chart == 0 { (om_gauge[0] + wa, om_gauge[1] + wb) } else { (om_gauge[0] + wb, om_gauge[1] + wa) };
    Ok(FlatC2State { pi0, pi1, om0, om1, signature })
}

/// Re-expresses a sphere point in the other chart via lift and projection.
pub fn switch_chart<T: Real>(p: C<T>, w: C<T>, chart: u8, m: T, s: T) -> Result<(C<T>, C<T>)> {
    let st = lift(p, w, chart, Signature::Euclidean, m, s)?;
    let pr = project_chart(&st, 1 - chart)?;
    Ok((pr.p, pr.w))
}

/// `P^a = m (T₀₀ + T₁₀ p + T₀₁ p̄ + T₁₁ p p̄) / q` on a chart.
pub fn chart_p_vec<T: Real>(p: C<T>, signature: Signature, chart: u8, m: T) -> [T; 3] {
    let q = conformal_q(p, signature);
    t_matrices::<T>(signature, chart)
        .map(|t| (t[0][0] + t[1][0] * p + t[0][1] * p.conj() + t[1][1] * p * p.conj()).re * m / q)
}

/// `V^a(p) = (i/2) g⁻¹ ∂_p̄ P^a = (i/2)(T₀₁ + (T₁₁ − η₁T₀₀) p − η₁ T₁₀ p²)`.
pub fn chart_v_vec<T: Real>(p: C<T>, signature: Signature, chart: u8) -> [C<T>; 3] {
    let e1: T = signature.eta1();
    let half_i = cc::<T>(0.0, 0.5);
    t_matrices::<T>(signature, chart).map(|t| half_i * (t[0][1] + (t[1][1] - t[0][0] * e1) * p - t[1][0] * p * p * e1))
}

/// `J^a = V^a w + V̄^a w̄ + (s/m) P^a`.
pub fn chart_j_vec<T: Real>(p: C<T>, w: C<T>, signature: Signature, chart: u8, m: T, s: T) -> [T; 3] {
    let pv = chart_p_vec(p, signature, chart, m);
    let v = chart_v_vec(p, signature, chart);
    let two = T::lit(2.0);
    [0, 1, 2].map(|a| two * (v[a] * w).re + s / m * pv[a])
}

/// All generators at a reduced point.
pub fn reduced_generators<T: Real>(
    p: C<T>,
    w: C<T>,
    chart: u8,
    signature: Signature,
    params: &Params<T>,
) -> Result<GeneratorValues<T>> {
    metric_g(p, signature, params.m)?;
    if params.m == T::zero() {
        return Err(Error::InvalidParams("m must be nonzero".into()));
    }
    Ok(GeneratorValues {
        P: params.m,
        J: signature.eta1::<T>() * params.s,
        s: params.s,
        P_vec: chart_p_vec(p, signature, chart, params.m),
        J_vec: chart_j_vec(p, w, signature, chart, params.m, params.s),
    })
}

/// The reduced `{w, w̄}` bracket value `i·2(s/m)g`.
pub fn reduced_twist<T: Real>(p: C<T>, signature: Signature, m: T, s: T) -> Result<C<T>> {
    let g = metric_g(p, signature, m)?;
    Ok(Complex::new(T::zero(), T::lit(REDUCED_TWIST) * s / m * g))
}

/// Partially reduced (by `J` only) coordinates `(Q^a, P^a)` with
/// `Q^a = G_a Re(π T^a η ω) / P` and `{P^a, Q^b} = δ^{ab}`.
pub fn charge_monopole_coords<T: Real>(state: &FlatC2State<T>) -> Result<([T; 3], [T; 3])> {
    let (big_p, _) = moment_map(state);
    let scale = state.pi0.norm_sqr() + state.pi1.norm_sqr();
    if scale == T::zero() || big_p.abs() <= T::lit(1e-12) * scale {
        return Err(Error::Singular("degenerate level set: pi pibar = 0".into()));
    }
    let [e0, e1] = eta::<T>(state.signature);
    let g = state.signature.metric3::<T>();
    let pi = state.pi();
    let eom = [state.om0 * e0, state.om1 * e1];
    let ts = t_matrices::<T>(state.signature, 0);
    let q = [0, 1, 2].map(|a| g[a] * bilinear(pi, &ts[a], eom).re / big_p);
    Ok((q, flat_p_vec(state)))
}

/// Image of a Euclidean state in `R³` after the exchange `(q, p) = (P_vec, −Q)`,
/// together with the monopole charge `s = −J` of the twisted structure there.
pub fn to_monopole_r3<T: Real>(state: &FlatC2State<T>) -> Result<([T; 3], [T; 3], T)> {
    if state.signature != Signature::Euclidean {
        return Err(Error::Domain("the R3 image is defined for the Euclidean signature".into()));
    }
    let (q, pv) = charge_monopole_coords(state)?;
    let (_, j) = moment_map(state);
    Ok((pv, q.map(|v| -v), -j))
}

/// A Euclidean flat state over the `R³` point `(q, p)` with monopole charge
/// `s`: inverse of [`to_monopole_r3`] up to the `J`-phase.
pub fn lift_monopole_r3<T: Real>(q: [T; 3], p: [T; 3], s: T) -> Result<FlatC2State<T>> {
    let r = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
    if !(r > T::zero()) {
        return Err(Error::Singular("q at the origin has no lift".into()));
    }
    let half = T::lit(0.5);
    // Hopf inverse: |π⁰|² − |π¹|² = q₃, π⁰ π̄¹ = (q₁ + i q₂)/2.
    let c = Complex::new(q[0], q[1]) * half;
    let (pi0, pi1) = if q[2] >= T::zero() {
        let a = ((r + q[2]) * half).sqrt();
        (Complex::new(a, T::zero()), c.conj() / a)
    } else {
        let b = ((r - q[2]) * half).sqrt();
        (c / b, Complex::new(b, T::zero()))
    };
    let sig = Signature::Euclidean;
    let zero = cc::<T>(0.0, 0.0);
    // ω enters Q^a and J linearly: solve the 4×4 real system.
    let image = |om: [C<T>; 2]| -> [T; 4] {
        let st = FlatC2State { pi0, pi1, om0: om[0], om1: om[1], signature: sig };
        let ts = t_matrices::<T>(sig, 0);
        let (big_p, j) = moment_map(&st);
        let pi = st.pi();
        let qv = ts.map(|t| bilinear(pi, &t, om).re / big_p);
        [qv[0], qv[1], qv[2], j]
    };
    let basis = [[cc(1.0, 0.0), zero], [cc(0.0, 1.0), zero], [zero, cc(1.0, 0.0)], [zero, cc(0.0, 1.0)]];
    let mut a = vec![T::zero(); 16];
    for (k, e) in basis.iter().enumerate() {
        let col = image(*e);
        for i in 0..4 {
            a[i * 4 + k] = col[i];
        }
    }
    // Q = −p and J = −s.
    let mut b = vec![-p[0], -p[1], -p[2], -s];
    crate::linalg::solve_in_place(&mut a, &mut b, 4)?;
    let om0 = Complex::new(b[0], b[1]);
    let om1 = Complex::new(b[2], b[3]);
    Ok(FlatC2State { pi0, pi1, om0, om1, signature: sig })
}

/// Gauge choices for the monopole potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeChoice {
    /// Regular at `p = 0` (gauge function `γ₊ = i log(π⁰/π̄⁰)`).
    #[serde(alias = "gammaplus")]
    Plus,
    /// Regular at `p = ∞` (`γ₋ = i log(π¹/π̄¹)`).
    #[serde(alias = "gammaminus")]
    Minus,
    /// `(γ₊ + γ₋)/2`: singular at both poles (Schwinger form).
    #[serde(alias = "gammamean")]
    Mean,
}

/// Holomorphic component `A` of the potential 1-form `A dp + Ā dp̄`:
/// `A₊ = i ∂_p K = i m p⁺/q`, `A₋ = A₊ − i m/p`, `A_mean = A₊ − i m/(2p)`,
/// with Kähler potential `K = m log(1 + p p⁺)`.
pub fn gauge_potential<T: Real>(gauge: GaugeChoice, p: C<T>, signature: Signature, m: T) -> Result<C<T>> {
    let q = conformal_q(p, signature);
    if q.abs() <= T::epsilon() * T::lit(16.0) {
        return Err(Error::Domain("potential singular on the boundary 1 + p p+ = 0".into()));
    }
    let i = cc::<T>(0.0, 1.0);
    let a_plus = i * p_plus(p, signature) * m / q;
    match gauge {
        GaugeChoice::Plus => Ok(a_plus),
        GaugeChoice::Minus | GaugeChoice::Mean => {
            if p.norm() == T::zero() {
                return Err(Error::Singular(format!("{gauge:?} gauge is singular at p = 0")));
            }
            let k = if gauge == GaugeChoice::Minus { T::one() } else { T::lit(0.5) };
            Ok(a_plus - i * m * k / p)
        }
    }
}

/// Gauge function `γ₊ = −2 arg π⁰` or `γ₋ = −2 arg π¹` of a flat state.
pub fn gauge_function<T: Real>(gauge: GaugeChoice, state: &FlatC2State<T>) -> T {
    let two = T::lit(2.0);
    match gauge {
        GaugeChoice::Plus => -two * state.pi0.arg(),
        GaugeChoice::Minus => -two * state.pi1.arg(),
        GaugeChoice::Mean => -(state.pi0.arg() + state.pi1.arg()),
    }
}

/// Line integral of `2 Re((A_a − A_b) dp)` around the circle
/// `p = center + radius·e^{iθ}` (trapezoid rule, spectrally accurate).
pub fn circle_loop_integral<T: Real>(
    a: GaugeChoice,
    b: GaugeChoice,
    center: C<T>,
    radius: T,
    n: usize,
    signature: Signature,
    m: T,
) -> Result<T> {
    let mut acc = T::zero();
    let dth = T::TAU() / T::from_usize_lossy(n);
    for k in 0..n {
        let th = dth * T::from_usize_lossy(k);
        let e = Complex::new(th.cos(), th.sin());
        let p = center + e * radius;
        let dp = Complex::new(T::zero(), radius) * e;
        let diff = gauge_potential(a, p, signature, m)? - gauge_potential(b, p, signature, m)?;
        acc = acc + T::lit(2.0) * (diff * dp).re;
    }
    Ok(acc * dth)
}

/// Flux unit of the Kähler potential 1-form: loop integrals of `A₊ − A₋`
/// are integer multiples of `2π · 2m`.
pub fn flux_unit<T: Real>(m: T) -> T {
    T::lit(2.0) * m
}

/// Curvature `F = ∂_x 𝒜_y − ∂_y 𝒜_x` of `𝒜 = 2 Re(A dp)`, by central differences.
pub fn curvature<T: Real>(gauge: GaugeChoice, p: C<T>, signature: Signature, m: T) -> Result<T> {
    let h = T::lit(1e-5) * p.norm().max(T::one());
    let comp = |z: C<T>| -> Result<(T, T)> {
        let a = gauge_potential(gauge, z, signature, m)?;
        Ok((T::lit(2.0) * a.re, -T::lit(2.0) * a.im))
    };
    let (_, ay_p) = comp(p + Complex::new(h, T::zero()))?;
    let (_, ay_m) = comp(p - Complex::new(h, T::zero()))?;
    let (ax_p, _) = comp(p + Complex::new(T::zero(), h))?;
    let (ax_m, _) = comp(p - Complex::new(T::zero(), h))?;
    Ok((ay_p - ay_m - (ax_p - ax_m)) / (T::lit(2.0) * h))
}

/// Total flux of the curvature of `A₊` over the sphere: `∫ F dx dy`, with the
/// plane compactified by `|p| = tan(θ/2)` and midpoint quadrature in `(θ, φ)`.
/// The exact value is `−4πm`.
pub fn sphere_flux<T: Real>(m: T, n_theta: usize, n_phi: usize) -> Result<T> {
    let half = T::lit(0.5);
    let dth = T::PI() / T::from_usize_lossy(n_theta);
    let dph = T::TAU() / T::from_usize_lossy(n_phi);
    let mut acc = T::zero();
    for i in 0..n_theta {
        let th = (T::from_usize_lossy(i) + half) * dth;
        let r = (th * half).tan();
        let sec = T::one() / (th * half).cos();
        let jac = r * half * sec * sec;
        for k in 0..n_phi {
            let ph = (T::from_usize_lossy(k) + half) * dph;
            let p = Complex::new(r * ph.cos(), r * ph.sin());
            acc = acc + curvature(GaugeChoice::Plus, p, Signature::Euclidean, m)? * jac;
        }
    }
    Ok(acc * dth * dph)
}

/// Physical monopole flux `−(s/m) ∫F = 4πs` (ħ = e = c = 1).
pub fn monopole_flux<T: Real>(s: T, m: T, n_theta: usize, n_phi: usize) -> Result<T> {
    Ok(-(s / m) * sphere_flux(m, n_theta, n_phi)?)
}

/// Outcome of the single-valuedness check for the spin `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub s: f64,
    pub space: Signature,
    pub gauge: GaugeChoice,
    pub admissible: bool,
    /// Number of charts the level set needs (2 for the sphere, 1 for the pseudosphere).
    pub charts: u8,
    /// Phase `s·∮ d(γ₋ − γ₊)` of the transition function around one loop, reduced mod 2π.
    pub transition_phase: f64,
    /// Exchange phase `2πs` of two identical particles.
    pub exchange_phase: f64,
}

/// Sphere: admissible iff the transition function `e^{i s(γ₋ − γ₊)}` is single
/// valued, i.e. `2s ∈ ℤ`. Pseudosphere: one chart, always admissible.
pub fn spin_quantization_check(s: f64, space: Signature, gauge: GaugeChoice) -> Admissibility {
    let tau = std::f64::consts::TAU;
    let (charts, phase) = match space {
        Signature::Euclidean => {
            // γ₋ − γ₊ = −2 arg p winds by −4π around the equator.
            let holonomy = -2.0 * tau * s;
            (2u8, holonomy.rem_euclid(tau))
        }
        Signature::Split => (1u8, 0.0),
    };
    let dist = phase.min(tau - phase);
    Admissibility { s, space, gauge, admissible: dist < 1e-9, charts, transition_phase: phase, exchange_phase: tau * s }
}
