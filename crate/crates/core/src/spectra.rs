//! Oscillator and charge–vortex spectra, Z_N angular families, and a radial
//! finite-volume eigensolver used as an independent oracle.
//!
//! Vortex energies: `E(N_r, m_σ) = −C μ α² / (ħ² (N_r + |m_σ| + 1/2)²)` with
//! `C = 1/2` (the value fixed by the oscillator dictionary `ℰ = μω²/8`,
//! `α = E_osc/4`, and reproduced by the oracle); `C = 1` reproduces the
//! display as printed.

use crate::error::{Error, Result};
use crate::model::Params;
use crate::scalar::Real;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One bound level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SpectralLine<T> {
    pub nr: u32,
    /// Exact angular number `±(j + σ)`.
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub m_sigma: Rational64,
    pub energy: T,
    /// Position of the state within its degenerate shell `N_r + |m_σ|`.
    pub degeneracy_tag: u32,
}

impl<T: Real> SpectralLine<T> {
    /// `N_r + |m_σ|`.
    pub fn shell(&self) -> Rational64 {
        Rational64::from_integer(self.nr as i64) + self.m_sigma.abs()
    }
}

fn ser_rational<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

fn de_rational<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Rational64, D::Error> {
    let s = String::deserialize(d)?;
    crate::model::parse_rational(&s).map_err(serde::de::Error::custom)
}

/// `k` or `k/N`.
pub fn fmt_rational(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Spectrum prefactor policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prefactor {
    /// `C = 1/2`.
    Derived,
    /// `C = 1`, the display verbatim.
    AsPrinted,
}

impl Prefactor {
    pub fn value<T: Real>(self) -> T {
        match self {
            Prefactor::Derived => T::lit(0.5),
            Prefactor::AsPrinted => T::one(),
        }
    }
}

/// Oscillator level `E = ħω(2N_r + |M| + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct OscillatorLevel<T> {
    pub nr: u32,
    pub m: i64,
    pub energy: T,
}

pub fn oscillator_levels<T: Real>(nr_max: u32, m_max: u32, params: &Params<T>) -> Vec<OscillatorLevel<T>> {
    let hw = params.hbar * params.omega;
    let mut out = Vec::new();
    for nr in 0..=nr_max {
        for m in -(m_max as i64)..=(m_max as i64) {
            let n = T::lit((2 * nr as i64 + m.abs() + 1) as f64);
            out.push(OscillatorLevel { nr, m, energy: hw * n });
        }
    }
    out.sort_by(|a, b| {
        a.energy.partial_cmp(&b.energy).unwrap_or(std::cmp::Ordering::Equal).then(a.nr.cmp(&b.nr)).then(a.m.cmp(&b.m))
    });
    out
}

/// Vortex quantum numbers of an oscillator level: `N_r` kept, `m_σ = M/2`
/// (`σ = 0` for even `M`, `σ = 1/2` for odd `M`).
pub fn oscillator_to_vortex(nr: u32, m: i64) -> (u32, Rational64, Rational64) {
    let m_sigma = Rational64::new(m, 2);
    let sigma = if m % 2 == 0 { Rational64::zero() } else { Rational64::new(1, 2) };
    (nr, m_sigma, sigma)
}

/// Admissible angular numbers for a vortex parameter `σ = k/N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularFamily {
    pub n: u32,
    pub index: u32,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub sigma: Rational64,
}

impl AngularFamily {
    pub fn new(sigma: Rational64) -> Self {
        AngularFamily { n: *sigma.denom() as u32, index: *sigma.numer() as u32, sigma }
    }

    /// `±(j + σ)` for `j = 0..=j_max`, ascending; `0` appears once.
    pub fn members(&self, j_max: u32) -> Vec<Rational64> {
        let mut v = Vec::new();
        for j in 0..=j_max {
            let x = Rational64::from_integer(j as i64) + self.sigma;
            v.push(x);
            if !x.is_zero() {
                v.push(-x);
            }
        }
        v.sort();
        v
    }

    /// Whether `m` belongs to the family.
    pub fn contains(&self, m: Rational64) -> bool {
        let a = m.abs() - self.sigma;
        a.is_integer() && !a.is_negative()
    }
}

/// Splits the angular momentum lattice for `Z_N`: `σ = index/N`.
pub fn zn_split(n: u32, sigma_index: u32) -> Result<AngularFamily> {
    if n == 0 {
        return Err(Error::InvalidParams("N must be at least 1".into()));
    }
    if sigma_index >= n {
        return Err(Error::InvalidParams(format!("sigma index {sigma_index} must be below N = {n}")));
    }
    Ok(AngularFamily { n, index: sigma_index, sigma: Rational64::new(sigma_index as i64, n as i64) })
}

fn check_sigma(sigma: Rational64) -> Result<()> {
    if sigma.is_negative() || sigma >= Rational64::from_integer(1) {
        return Err(Error::InvalidParams(format!("sigma = {sigma} must lie in [0,1)")));
    }
    Ok(())
}

fn rat<T: Real>(r: Rational64) -> T {
    T::lit(r.to_f64().unwrap_or(f64::NAN))
}

/// Analytic energy of one state.
pub fn vortex_energy<T: Real>(nr: u32, m_sigma: Rational64, params: &Params<T>, prefactor: Prefactor) -> T {
    let nu = T::lit(nr as f64) + rat::<T>(m_sigma.abs()) + T::lit(0.5);
    -prefactor.value::<T>() * params.mu * params.alpha * params.alpha / (params.hbar * params.hbar * nu * nu)
}

/// All levels with `N_r ≤ nr_max` and `m_σ = ±(j + σ)`, `j ≤ m_max`,
/// sorted by shell, with degeneracy tags.
pub fn vortex_levels<T: Real>(
    sigma: Rational64,
    nr_max: u32,
    m_max: u32,
    params: &Params<T>,
    prefactor: Prefactor,
) -> Result<Vec<SpectralLine<T>>> {
    check_sigma(sigma)?;
    let fam = AngularFamily::new(sigma);
    let mut lines = Vec::new();
    for nr in 0..=nr_max {
        for m in fam.members(m_max) {
            lines.push(SpectralLine {
                nr,
                m_sigma: m,
                energy: vortex_energy(nr, m, params, prefactor),
                degeneracy_tag: 0,
            });
        }
    }
    lines.sort_by(|a, b| a.shell().cmp(&b.shell()).then(b.nr.cmp(&a.nr)).then(a.m_sigma.cmp(&b.m_sigma)));
    let mut counts: BTreeMap<Rational64, u32> = BTreeMap::new();
    for l in &mut lines {
        let c = counts.entry(l.shell()).or_insert(0);
        l.degeneracy_tag = *c;
        *c += 1;
    }
    Ok(lines)
}

/// Multiplicity of every shell `N_r + |m_σ|` among `lines`.
pub fn shell_degeneracies<T: Real>(lines: &[SpectralLine<T>]) -> BTreeMap<Rational64, u32> {
    let mut m = BTreeMap::new();
    for l in lines {
        *m.entry(l.shell()).or_insert(0) += 1;
    }
    m
}

/// Spectrum dependence on the vortex parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AharonovBohmShift<T> {
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub sigma: Rational64,
    /// Vortex flux `σπħ/2` (e = c = 1), stored as written.
    pub flux: T,
    pub ground_energy: T,
    /// Angular numbers of the ground level (`±σ`).
    pub ground_m_sigma: Vec<String>,
    pub ground_multiplicity: u32,
    /// Spin carried by the ground level, `|m_σ|`.
    pub spin: String,
    /// Whether `σ → 1 − σ` maps the family `±(j+σ)` onto itself.
    pub reflection_symmetric: bool,
}

pub fn aharonov_bohm_shift<T: Real>(
    sigma: Rational64,
    params: &Params<T>,
    prefactor: Prefactor,
) -> Result<AharonovBohmShift<T>> {
    check_sigma(sigma)?;
    let fam = AngularFamily::new(sigma);
    let ground: Vec<Rational64> = fam.members(0);
    let reflected = AngularFamily::new((Rational64::from_integer(1) - sigma) % Rational64::from_integer(1));
    let a: Vec<Rational64> = fam.members(8).into_iter().map(|m| m.abs()).collect();
    let b: Vec<Rational64> = reflected.members(8).into_iter().map(|m| m.abs()).collect();
    let sym = a.iter().take(8).all(|m| b.contains(m)) && b.iter().take(8).all(|m| a.contains(m));
    Ok(AharonovBohmShift {
        sigma,
        flux: rat::<T>(sigma) * T::PI() * params.hbar / T::lit(2.0),
        ground_energy: vortex_energy(0, sigma, params, prefactor),
        ground_m_sigma: ground.iter().map(fmt_rational).collect(),
        ground_multiplicity: ground.len() as u32,
        spin: fmt_rational(&sigma),
        reflection_symmetric: sym,
    })
}

// --- radial oracle ---------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridScheme {
    Uniform,
    /// Faces at `r_max (e^{βk/N} − 1)/(e^β − 1)` with `β = ln(1 + r_max/a0)`, `a0` the Coulomb length.
    LogStretched,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RadialGrid<T> {
    pub r_max: T,
    pub n_points: usize,
    pub scheme: GridScheme,
    /// Largest accepted relative discretization error estimate.
    pub tolerance: T,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(r_max: T, n_points: usize, scheme: GridScheme) -> Self {
        RadialGrid { r_max, n_points, scheme, tolerance: T::lit(5e-3) }
    }

    /// A grid satisfying the `r_max` precondition for `n_levels` levels.
    pub fn for_levels(n_levels: usize, params: &Params<T>) -> Self {
        let a0 = params.hbar * params.hbar / (params.mu * params.alpha);
        let k = T::lit((n_levels + 1) as f64);
        Self::new(T::lit(20.0) * a0 * k * k, 4000, GridScheme::LogStretched)
    }

    fn check(&self) -> Result<()> {
        if !(self.r_max > T::zero()) || self.n_points < 100 {
            return Err(Error::InvalidParams("grid needs r_max > 0 and at least 100 points".into()));
        }
        Ok(())
    }

    /// Cell faces `0 = f_0 < … < f_N = r_max` for `n` cells.
    fn faces(&self, n: usize, a0: T) -> Vec<T> {
        let nn = T::from_usize_lossy(n);
        match self.scheme {
            GridScheme::Uniform => (0..=n).map(|k| self.r_max * T::from_usize_lossy(k) / nn).collect(),
            GridScheme::LogStretched => {
                let beta = (T::one() + self.r_max / a0).ln();
                let den = beta.exp() - T::one();
                (0..=n).map(|k| self.r_max * ((beta * T::from_usize_lossy(k) / nn).exp() - T::one()) / den).collect()
            }
        }
    }
}

/// Symmetric tridiagonal matrix `(diag, off)` with `off[i]` coupling `i` and `i+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: T) -> usize {
        let n = self.diag.len();
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut d = T::one();
        for i in 0..n {
            let b2 = if i == 0 { T::zero() } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - if i == 0 { T::zero() } else { b2 / d };
            if d.abs() < tiny {
                d = -tiny;
            }
            if d < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds.
    pub fn bounds(&self) -> (T, T) {
        let n = self.diag.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let r = (if i > 0 { self.off[i - 1].abs() } else { T::zero() })
                + (if i + 1 < n { self.off[i].abs() } else { T::zero() });
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> T {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) * T::lit(0.5)
    }

    /// Eigenvector for an eigenvalue estimate by inverse iteration (Thomas
    /// algorithm on the shifted matrix).
    pub fn inverse_iteration(&self, lambda: T, iters: usize) -> Vec<T> {
        let n = self.diag.len();
        let shift = lambda + (lambda.abs() + T::one()) * T::epsilon() * T::lit(64.0);
        let mut v = vec![T::one(); n];
        for _ in 0..iters {
            // solve (A − shift) y = v
            let mut c = vec![T::zero(); n];
            let mut d = vec![T::zero(); n];
            let mut denom = self.diag[0] - shift;
            let tiny = T::min_positive_value().sqrt();
            if denom.abs() < tiny {
                denom = tiny;
            }
            if n > 1 {
                c[0] = self.off[0] / denom;
            }
            d[0] = v[0] / denom;
            for i in 1..n {
                let mut m = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
                if m.abs() < tiny {
                    m = tiny;
                }
                if i + 1 < n {
                    c[i] = self.off[i] / m;
                }
                d[i] = (v[i] - self.off[i - 1] * d[i - 1]) / m;
            }
            let mut y = vec![T::zero(); n];
            y[n - 1] = d[n - 1];
            for i in (0..n - 1).rev() {
                y[i] = d[i] - c[i] * y[i + 1];
            }
            let norm = y.iter().map(|a| *a * *a).sum::<T>().sqrt();
            v = y.into_iter().map(|a| a / norm).collect();
        }
        v
    }
}

/// Builds the symmetrized finite-volume Hamiltonian of
/// `−(ħ²/2μ)(R'' + R'/r − m²R/r²) − αR/r` on `n` cells, written for
/// `R = r^{|m|} v` as the flux form `−(ħ²/2μ) r^{−d}(r^d v')' − αv/r`,
/// `d = 2|m| + 1`, so that `v` is smooth at the origin for every `m`.
/// Cell volumes carry the weight `r^d`; the face at the origin has zero flux
/// and `r_max` is Dirichlet through a mirrored ghost value. Returns the
/// symmetrized matrix and the cell centers.
pub fn radial_hamiltonian<T: Real>(
    m_sigma: T,
    n: usize,
    grid: &RadialGrid<T>,
    params: &Params<T>,
) -> (Tridiagonal<T>, Vec<T>) {
    let a0 = params.hbar * params.hbar / (params.mu * params.alpha);
    let f = grid.faces(n, a0);
    let half = T::lit(0.5);
    let d = T::lit(2.0) * m_sigma.abs() + T::one();
    let c: Vec<T> = (0..n).map(|i| (f[i] + f[i + 1]) * half).collect();
    let d1 = d + T::one();
    // ∫ r^d dr over each cell, scaled by r_max^{−d} against overflow
    let rs = grid.r_max;
    let w = |r: T| (r / rs).powf(d);
    let vol: Vec<T> = (0..n).map(|i| (w(f[i + 1]) * f[i + 1] - w(f[i]) * f[i]) / d1).collect();
    let kin = params.hbar * params.hbar / (T::lit(2.0) * params.mu);
    // potential averaged over the cell with the same weight
    let pot: Vec<T> = (0..n)
        .map(|i| {
            let num = (w(f[i + 1]) - w(f[i])) / d;
            -params.alpha * num / vol[i]
        })
        .collect();
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n.saturating_sub(1)];
    for i in 0..n {
        let right = if i + 1 < n { w(f[i + 1]) / (c[i + 1] - c[i]) } else { w(f[n]) / (f[n] - c[n - 1]) };
        let left = if i > 0 { w(f[i]) / (c[i] - c[i - 1]) } else { T::zero() };
        diag[i] = kin * (right + left) / vol[i] + pot[i];
        if i + 1 < n {
            off[i] = -kin * right / (vol[i] * vol[i + 1]).sqrt();
        }
    }
    (Tridiagonal { diag, off }, c)
}

/// Oracle output for one angular channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct OracleResult<T> {
    pub m_sigma: f64,
    /// Richardson-extrapolated energies, lowest first.
    pub energies: Vec<T>,
    pub coarse: Vec<T>,
    pub fine: Vec<T>,
    /// Estimated relative error of the fine grid, `|E_fine − E_coarse| / (3|E|)`.
    pub error_estimate: Vec<T>,
}

/// Lowest `n_levels` radial eigenvalues for angular number `m_sigma`, on
/// `grid.n_points` and twice as many cells, Richardson-extrapolated.
pub fn radial_oracle<T: Real>(
    sigma: Rational64,
    m_sigma: Rational64,
    n_levels: usize,
    grid: &RadialGrid<T>,
    params: &Params<T>,
) -> Result<OracleResult<T>> {
    check_sigma(sigma)?;
    if !AngularFamily::new(sigma).contains(m_sigma) && !(m_sigma - sigma).is_integer() {
        return Err(Error::InvalidParams(format!("m_sigma = {m_sigma} is not in the family of sigma = {sigma}")));
    }
    params.check()?;
    if !(params.alpha > T::zero()) {
        return Err(Error::InvalidParams("the oracle needs alpha > 0 (bound states)".into()));
    }
    grid.check()?;
    let a0 = params.hbar * params.hbar / (params.mu * params.alpha);
    let k = T::lit((n_levels + 1) as f64);
    let need = T::lit(20.0) * a0 * k * k;
    if grid.r_max < need {
        return Err(Error::InvalidParams(format!("r_max = {} below the required {}", grid.r_max, need)));
    }
    let m = rat::<T>(m_sigma);
    let solve = |n: usize| -> Vec<T> {
        let (h, _) = radial_hamiltonian(m, n, grid, params);
        (0..n_levels).map(|k| h.eigenvalue(k)).collect()
    };
    let coarse = solve(grid.n_points);
    let fine = solve(2 * grid.n_points);
    let mut energies = Vec::with_capacity(n_levels);
    let mut errs = Vec::with_capacity(n_levels);
    for (ec, ef) in coarse.iter().zip(&fine) {
        let e = (T::lit(4.0) * *ef - *ec) / T::lit(3.0);
        let est = (*ef - *ec).abs() / (T::lit(3.0) * e.abs());
        if !(e < T::zero()) {
            return Err(Error::RefinementNeeded(format!(
                "level not bound on this grid (E = {e}); enlarge r_max or n_points"
            )));
        }
        if !(est <= grid.tolerance) {
            return Err(Error::RefinementNeeded(format!(
                "estimated relative error {est:e} exceeds tolerance {:e}",
                grid.tolerance
            )));
        }
        energies.push(e);
        errs.push(est);
    }
    Ok(OracleResult { m_sigma: m.as_f64(), energies, coarse, fine, error_estimate: errs })
}

/// Oracle energies for every `|m_σ|` channel with `N_r ≤ nr_max`, `j ≤ m_max`,
/// solved in parallel; keyed by `|m_σ|`.
pub fn oracle_table<T: Real>(
    sigma: Rational64,
    nr_max: u32,
    m_max: u32,
    grid: &RadialGrid<T>,
    params: &Params<T>,
) -> Result<BTreeMap<Rational64, OracleResult<T>>> {
    check_sigma(sigma)?;
    let chans: Vec<Rational64> = (0..=m_max).map(|j| Rational64::from_integer(j as i64) + sigma).collect();
    let res: Vec<Result<(Rational64, OracleResult<T>)>> = chans
        .par_iter()
        .map(|m| radial_oracle(sigma, *m, nr_max as usize + 1, grid, params).map(|r| (*m, r)))
        .collect();
    res.into_iter().collect()
}
