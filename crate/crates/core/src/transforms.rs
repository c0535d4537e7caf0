//! Bohlin (`w = z²`) and Z_N (`w = z^N`) maps between the oscillator and
//! Coulomb sides, trajectory mapping with Levi-Civita time, Zhukovski ellipses,
//! winding numbers and the power-law duality.

use crate::error::{Error, Result};
use crate::model::{Params, PhaseState, Signature};
use crate::scalar::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

type C<T> = Complex<T>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Bohlin,
    #[serde(rename = "zn")]
    ZN(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Oscillator `(z, π)` to Coulomb `(w, p)`.
    Forward,
    Inverse,
}

/// `w = z^N`, `p = π / (N z^{N−1})` and its inverse on a chosen root branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalMap {
    pub kind: MapKind,
    pub direction: Direction,
    /// Root branch `0..N−1` of the inverse (fixes the first sample only when
    /// mapping trajectories).
    pub branch: u32,
}

impl CanonicalMap {
    pub fn bohlin(direction: Direction) -> Self {
        CanonicalMap { kind: MapKind::Bohlin, direction, branch: 0 }
    }

    pub fn zn(n: u32, direction: Direction) -> Self {
        CanonicalMap { kind: MapKind::ZN(n), direction, branch: 0 }
    }

    pub fn with_branch(mut self, branch: u32) -> Self {
        self.branch = branch;
        self
    }

    pub fn order(&self) -> u32 {
        match self.kind {
            MapKind::Bohlin => 2,
            MapKind::ZN(n) => n,
        }
    }

    pub fn inverse(&self) -> Self {
        let direction = match self.direction {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        };
        CanonicalMap { direction, ..*self }
    }

    fn check(&self) -> Result<u32> {
        let n = self.order();
        if n == 0 {
            return Err(Error::InvalidParams("map order N must be at least 1".into()));
        }
        if self.branch >= n {
            return Err(Error::InvalidParams(format!("branch {} out of range 0..{}", self.branch, n - 1)));
        }
        Ok(n)
    }
}

fn flat_pair<T: Real>(state: &PhaseState<T>) -> Result<(C<T>, C<T>)> {
    match *state {
        PhaseState::FlatC { z, pi } => Ok((z, pi)),
        _ => Err(Error::Domain("canonical maps act on FlatC states".into())),
    }
}

fn root<T: Real>(w: C<T>, n: u32, theta: T) -> C<T> {
    let r = w.norm().powf(T::one() / T::from_u32(n).expect("order"));
    let a = theta / T::from_u32(n).expect("order");
    Complex::new(r * a.cos(), r * a.sin())
}

/// Applies the map pointwise.
pub fn apply_map<T: Real>(map: &CanonicalMap, state: &PhaseState<T>) -> Result<PhaseState<T>> {
    let n = map.check()?;
    let (x, y) = flat_pair(state)?;
    if x.norm() == T::zero() {
        return Err(Error::Singular("the origin is excluded".into()));
    }
    let nn = T::from_u32(n).expect("order");
    match map.direction {
        Direction::Forward => {
            let zn1 = x.powu(n - 1);
            Ok(PhaseState::flat(zn1 * x, y / (zn1 * nn)))
        }
        Direction::Inverse => {
            let theta = x.arg() + T::TAU() * T::from_u32(map.branch).expect("branch");
            let z = root(x, n, theta);
            Ok(PhaseState::flat(z, y * z.powu(n - 1) * nn))
        }
    }
}

/// `w → w √(2μω)`, `p → p / √(2μω)`.
pub fn rescale_kepler<T: Real>(state: &PhaseState<T>, params: &Params<T>) -> Result<PhaseState<T>> {
    let (w, p) = flat_pair(state)?;
    let k = (T::lit(2.0) * params.mu * params.omega).sqrt();
    Ok(PhaseState::flat(w * k, p / k))
}

/// Normalization of the Coulomb image of `H_osc = ω(π π̄ + z z̄)` under the
/// Bohlin map: `W = λ w`, `P = c p`, `dT/ds = k |z|²`.
///
/// The image solves Hamilton's equations of `H_C = P P̄/(2μ) − α/|W|` with
/// `c = 8μλω/k`, `α = 8μλ³ωE/k²` and energy `−8μλ²ω²/k²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CoulombImage<T> {
    pub position_scale: T,
    pub time_factor: T,
}

impl<T: Real> CoulombImage<T> {
    /// The canonical Bohlin map itself: `λ = 1`, `k = 8μω`.
    pub fn canonical(params: &Params<T>) -> Self {
        CoulombImage { position_scale: T::one(), time_factor: T::lit(8.0) * params.mu * params.omega }
    }

    /// Kepler dictionary: coupling `α = E_osc`, energy `−2μω²`
    /// (`λ = 1/(2μω)`, `k = 1/(μω)`, momentum factor `4μω`).
    pub fn kepler(params: &Params<T>) -> Self {
        let mw = params.mu * params.omega;
        CoulombImage { position_scale: T::one() / (T::lit(2.0) * mw), time_factor: T::one() / mw }
    }

    /// The canonical rescaling `w √(2μω)`, `p / √(2μω)` with the time factor
    /// that keeps Hamilton's equations: `k = 16μ²ω²`.
    pub fn rescaled(params: &Params<T>) -> Self {
        let mw = params.mu * params.omega;
        CoulombImage { position_scale: (T::lit(2.0) * mw).sqrt(), time_factor: T::lit(16.0) * mw * mw }
    }

    pub fn momentum_scale(&self, params: &Params<T>) -> T {
        T::lit(8.0) * params.mu * self.position_scale * params.omega / self.time_factor
    }

    /// Coulomb coupling of the image of an orbit with oscillator energy `e_osc`.
    pub fn coupling(&self, params: &Params<T>, e_osc: T) -> T {
        let l = self.position_scale;
        T::lit(8.0) * params.mu * l * l * l * params.omega * e_osc / (self.time_factor * self.time_factor)
    }

    /// Coulomb energy of every image orbit.
    pub fn energy(&self, params: &Params<T>) -> T {
        let l = self.position_scale;
        let w = params.omega;
        -T::lit(8.0) * params.mu * l * l * w * w / (self.time_factor * self.time_factor)
    }

    /// Coulomb-side parameters (`alpha` set from `e_osc`).
    pub fn coulomb_params(&self, params: &Params<T>, e_osc: T) -> Params<T> {
        Params { alpha: self.coupling(params, e_osc), ..params.clone() }
    }
}

/// Ordered samples of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Trajectory<T> {
    pub samples: Vec<(T, PhaseState<T>)>,
    pub system: String,
    pub params: Params<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(system: impl Into<String>, params: Params<T>) -> Self {
        Trajectory { samples: Vec::new(), system: system.into(), params }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn push(&mut self, t: T, state: PhaseState<T>) {
        self.samples.push((t, state));
    }

    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|(t, _)| *t).collect()
    }

    pub fn first(&self) -> Option<&PhaseState<T>> {
        self.samples.first().map(|(_, s)| s)
    }

    pub fn last(&self) -> Option<&PhaseState<T>> {
        self.samples.last().map(|(_, s)| s)
    }

    /// Strictly increasing times.
    pub fn check(&self) -> Result<()> {
        for w in self.samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Input(format!("times not strictly increasing at t = {}", w[1].0)));
            }
        }
        Ok(())
    }

    /// Planar position of every sample: `z` (or `w`) for flat states, `p` on
    /// reduced charts, `(q1, q2)` in `R³`.
    pub fn positions(&self) -> Vec<C<T>> {
        self.samples.iter().map(|(_, s)| planar_position(s)).collect()
    }

    /// CSV with header `t,<coordinate names>`; reduced states carry an extra
    /// `chart` column on the sphere. Values use 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Input(format!("write failed: {e}"));
        let first = self.first().ok_or_else(|| Error::Input("empty trajectory".into()))?;
        let mut header = String::from("t");
        if matches!(first, PhaseState::Reduced { signature: Signature::Euclidean, .. }) {
            header.push_str(",chart");
        }
        for n in first.coord_names() {
            header.push(',');
            header.push_str(n);
        }
        header.push('\n');
        out.write_all(header.as_bytes()).map_err(io)?;
        let mut line = String::new();
        for (t, s) in &self.samples {
            line.clear();
            line.push_str(&fmt17(*t));
            if let PhaseState::Reduced { signature: Signature::Euclidean, chart, .. } = s {
                line.push_str(&format!(",{chart}"));
            }
            for v in s.coords() {
                line.push(',');
                line.push_str(&fmt17(v));
            }
            line.push('\n');
            out.write_all(line.as_bytes()).map_err(io)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Input(e.to_string()))
    }

    /// Reads a CSV written by [`Trajectory::write_csv`]. The layout is
    /// recognized from the header.
    pub fn read_csv<R: Read>(input: R, system: &str, params: Params<T>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Input(format!("csv header: {e}")))?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let cols: Vec<&str> = header.iter().map(String::as_str).collect();
        let z = Complex::new(T::zero(), T::zero());
        let (template, offset) = match cols.as_slice() {
            ["t", "re", "im", "pre", "pim"] => (PhaseState::flat(z, z), 1),
            ["t", "q1", "q2", "q3", "p1", "p2", "p3"] => {
                (PhaseState::R3Monopole { q: [T::zero(); 3], p: [T::zero(); 3] }, 1)
            }
            ["t", "chart", "pre", "pim", "wre", "wim"] => {
                (PhaseState::Reduced { signature: Signature::Euclidean, chart: 0, p: z, w: z }, 2)
            }
            ["t", "pre", "pim", "wre", "wim"] => {
                (PhaseState::Reduced { signature: Signature::Split, chart: 0, p: z, w: z }, 1)
            }
            _ => return Err(Error::Input(format!("unrecognized csv header {:?}", header.join(",")))),
        };
        let mut traj = Trajectory::new(system, params);
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Input(format!("csv row {}: {e}", k + 1)))?;
            let parse = |s: &str| -> Result<T> {
                let v: f64 =
                    s.trim().parse().map_err(|_| Error::Input(format!("csv row {}: bad number {s:?}", k + 1)))?;
                Ok(T::lit(v))
            };
            if rec.len() != cols.len() {
                return Err(Error::Input(format!("csv row {}: expected {} fields", k + 1, cols.len())));
            }
            let t = parse(&rec[0])?;
            let x = rec.iter().skip(offset).map(parse).collect::<Result<Vec<T>>>()?;
            let mut st = template.with_coords(&x);
            if offset == 2 {
                let chart: u8 = rec[1].trim().parse().map_err(|_| Error::Input("bad chart".into()))?;
                if let PhaseState::Reduced { chart: c, .. } = &mut st {
                    *c = chart;
                }
            }
            traj.push(t, st);
        }
        traj.check()?;
        Ok(traj)
    }
}

fn fmt17<T: Real>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

/// Position used for planar analysis of a state.
pub fn planar_position<T: Real>(s: &PhaseState<T>) -> C<T> {
    match *s {
        PhaseState::FlatC { z, .. } => z,
        PhaseState::Reduced { p, .. } => p,
        PhaseState::R3Monopole { q, .. } => Complex::new(q[0], q[1]),
        PhaseState::FlatC2(st) => st.pi0,
    }
}

/// Maps a trajectory pointwise, with the canonical Levi-Civita time when
/// `reparametrize` is set (see [`map_trajectory_scaled`]).
pub fn map_trajectory<T: Real>(map: &CanonicalMap, traj: &Trajectory<T>, reparametrize: bool) -> Result<Trajectory<T>> {
    let image = if reparametrize { Some(CoulombImage::canonical(&traj.params)) } else { None };
    map_trajectory_scaled(map, traj, image.as_ref())
}

/// Maps a trajectory pointwise.
///
/// Inverse maps follow the continuous root branch (argument unwrapping), the
/// branch index fixing only the first sample. With `image` set (forward Bohlin
/// only) the image is scaled to `(λw, cp)` and its time is `T = k ∫ |z|² ds`,
/// integrated with a fourth-order rule on the sample times.
pub fn map_trajectory_scaled<T: Real>(
    map: &CanonicalMap,
    traj: &Trajectory<T>,
    image: Option<&CoulombImage<T>>,
) -> Result<Trajectory<T>> {
    let n = map.check()?;
    if traj.is_empty() {
        return Err(Error::Input("empty trajectory".into()));
    }
    traj.check()?;
    let pairs = traj.samples.iter().map(|(_, s)| flat_pair(s)).collect::<Result<Vec<_>>>()?;
    check_avoids_origin(&pairs.iter().map(|p| p.0).collect::<Vec<_>>())?;
    let mut out = Trajectory::new(format!("{}-image", traj.system), traj.params.clone());
    let mapped: Vec<(C<T>, C<T>)> = match map.direction {
        Direction::Forward => pairs
            .iter()
            .map(|&(z, pi)| match apply_map(map, &PhaseState::flat(z, pi))? {
                PhaseState::FlatC { z, pi } => Ok((z, pi)),
                _ => unreachable!(),
            })
            .collect::<Result<_>>()?,
        Direction::Inverse => {
            let nn = T::from_u32(n).expect("order");
            let mut theta = pairs[0].0.arg() + T::TAU() * T::from_u32(map.branch).expect("branch");
            let mut prev = pairs[0].0.arg();
            let mut v = Vec::with_capacity(pairs.len());
            for &(w, p) in &pairs {
                let a = w.arg();
                theta = theta + wrap_angle(a - prev);
                prev = a;
                let z = root(w, n, theta);
                v.push((z, p * z.powu(n - 1) * nn));
            }
            v
        }
    };
    match image {
        None => {
            for ((t, _), (a, b)) in traj.samples.iter().zip(mapped) {
                out.push(*t, PhaseState::flat(a, b));
            }
        }
        Some(img) => {
            if n != 2 || map.direction != Direction::Forward {
                return Err(Error::InvalidParams(
                    "time reparametrization is defined for the forward Bohlin map".into(),
                ));
            }
            let lam = img.position_scale;
            let c = img.momentum_scale(&traj.params);
            let s = traj.times();
            let f: Vec<T> = pairs.iter().map(|(z, _)| z.norm_sqr() * img.time_factor).collect();
            let big_t = cumulative_integral(&s, &f);
            for (tt, (w, p)) in big_t.iter().zip(mapped) {
                out.push(*tt, PhaseState::flat(w * lam, p * c));
            }
        }
    }
    Ok(out)
}

/// Rejects paths that touch or pass through the origin.
fn check_avoids_origin<T: Real>(pts: &[C<T>]) -> Result<()> {
    let scale = pts.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let tol = scale * T::lit(1e-9);
    for (k, z) in pts.iter().enumerate() {
        if z.norm() <= tol {
            return Err(Error::Singular(format!("sample {k} is at the origin")));
        }
    }
    for (k, w) in pts.windows(2).enumerate() {
        let d = w[1] - w[0];
        let l2 = d.norm_sqr();
        if l2 == T::zero() {
            continue;
        }
        let t = (-(w[0].conj() * d).re / l2).max(T::zero()).min(T::one());
        if (w[0] + d * t).norm() <= tol {
            return Err(Error::Singular(format!("segment {k} passes through the origin")));
        }
    }
    Ok(())
}

/// Wraps an angle difference into `(−π, π]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let tau = T::TAU();
    let mut x = a % tau;
    if x > T::PI() {
        x = x - tau;
    } else if x <= -T::PI() {
        x = x + tau;
    }
    x
}

/// `∫ f ds` from `s_0` to every `s_i`, exact for piecewise cubics through
/// four neighbouring samples (three-point Gauss rule per interval).
pub fn cumulative_integral<T: Real>(s: &[T], f: &[T]) -> Vec<T> {
    let n = s.len();
    let mut out = vec![T::zero(); n];
    if n < 2 {
        return out;
    }
    let gx = [-(T::lit(0.6)).sqrt(), T::zero(), T::lit(0.6).sqrt()];
    let gw = [T::lit(5.0 / 9.0), T::lit(8.0 / 9.0), T::lit(5.0 / 9.0)];
    for i in 0..n - 1 {
        let lo = if n < 4 { 0 } else { i.saturating_sub(1).min(n - 4) };
        let hi = (lo + 4).min(n);
        let (a, b) = (s[i], s[i + 1]);
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = T::zero();
        for (x, wgt) in gx.iter().zip(gw) {
            let u = mid + half * *x;
            let mut val = T::zero();
            for j in lo..hi {
                let mut l = T::one();
                for k in lo..hi {
                    if k != j {
                        l = l * (u - s[k]) / (s[j] - s[k]);
                    }
                }
                val = val + l * f[j];
            }
            acc = acc + val * wgt;
        }
        out[i + 1] = out[i] + acc * half;
    }
    out
}

/// Samples `z = u + 1/u`, `u = ρ e^{iφ}`, at `φ_k = 2πk/n` for `k = 0..=n`
/// (the last sample closes the curve). The momentum is that of the harmonic
/// motion `φ ↦ z(φ)` at `ω = 1`, `π = conj(dz/dφ)`.
pub fn zhukovski_ellipse<T: Real>(u_modulus: T, n_samples: usize) -> Result<Trajectory<T>> {
    if !(u_modulus > T::zero()) || (u_modulus - T::one()).abs() <= T::epsilon() * T::lit(8.0) {
        return Err(Error::InvalidParams(format!(
            "|u| = {u_modulus} gives a degenerate segment; need |u| > 0 and |u| != 1"
        )));
    }
    if n_samples < 3 {
        return Err(Error::InvalidParams("need at least 3 samples".into()));
    }
    let a = u_modulus + T::one() / u_modulus;
    let b = u_modulus - T::one() / u_modulus;
    let mut traj = Trajectory::new("zhukovski", Params::default());
    for k in 0..=n_samples {
        let phi = T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(n_samples);
        let (s, c) = phi.sin_cos();
        let z = Complex::new(a * c, b * s);
        let dz = Complex::new(-a * s, b * c);
        traj.push(phi, PhaseState::flat(z, dz.conj()));
    }
    Ok(traj)
}

/// Winding number of a closed planar trajectory about `center`.
///
/// Requires first and last samples within `1e-6` and every sample at least
/// twice the largest step away from `center` (so each increment is unambiguous).
pub fn winding_number<T: Real>(traj: &Trajectory<T>, center: C<T>) -> Result<i64> {
    let pts = traj.positions();
    winding_of_points(&pts, center)
}

pub fn winding_of_points<T: Real>(pts: &[C<T>], center: C<T>) -> Result<i64> {
    winding_with_gap(pts, center, T::lit(1e-6))
}

/// [`winding_of_points`] accepting an end gap up to `closure_tol`; the gap is
/// closed by a chord, which counts as one more step.
pub fn winding_with_gap<T: Real>(pts: &[C<T>], center: C<T>, closure_tol: T) -> Result<i64> {
    if pts.len() < 3 {
        return Err(Error::Input("need at least 3 samples".into()));
    }
    let gap = (pts[0] - pts[pts.len() - 1]).norm();
    if !(gap <= closure_tol) {
        return Err(Error::NotClosed(gap.as_f64()));
    }
    let min_d = pts.iter().map(|z| (*z - center).norm()).fold(T::infinity(), T::min);
    if min_d == T::zero() {
        return Err(Error::Singular("a sample coincides with the center".into()));
    }
    let max_step = pts.windows(2).map(|w| (w[1] - w[0]).norm()).fold(gap, T::max);
    if min_d < T::lit(2.0) * max_step {
        return Err(Error::Input(format!(
            "under-resolved: closest approach {min_d} is below twice the largest step {max_step}"
        )));
    }
    let mut total = T::zero();
    for w in pts.windows(2) {
        total = total + ((w[1] - center) / (w[0] - center)).arg();
    }
    total = total + ((pts[0] - center) / (pts[pts.len() - 1] - center)).arg();
    let turns = total / T::TAU();
    turns.round().to_i64().ok_or_else(|| Error::Evaluation("winding number overflow".into()))
}

/// Dual exponent `b = 4/(a+2) − 2` of the potential `r^a`, and the map order
/// `N = 1 + a/2`, from `(a+2)(b+2) = 4`.
pub fn power_duality<T: Real>(a: T) -> Result<(T, T)> {
    let two = T::lit(2.0);
    if !(a > -two) {
        return Err(Error::InvalidParams(format!("power a = {a} must exceed -2")));
    }
    Ok((T::lit(4.0) / (a + two) - two, T::one() + a / two))
}
