//! Poisson brackets of the canonical and twisted structures, and numerical
//! audits of algebra relations over sampled points.
//!
//! Brackets act on the real coordinate vector of a [`PhaseState`]; complex
//! observables are handled by bilinearity. For a complex pair `(π, z)` with
//! `{π, z} = 1` the real components satisfy `{π_re, z_re} = 1/2`,
//! `{π_im, z_im} = −1/2`.

mod generators;
mod observable;
mod spec_json;

pub use generators::*;
pub use observable::{wirtinger, EvalFn, FdMode, GradFn, Observable};
pub use spec_json::{load_algebra_spec, AlgebraSpecFile};

use crate::error::{Error, Result};
use crate::model::{metric_g, Params, PhaseState, Signature, Space};
use crate::scalar::Real;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The fixed families of Poisson tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    /// `{π, z} = 1` on `C` (coordinates `z, π`).
    CanonicalComplex,
    /// `{π^α, ω_α} = 1` on `C²`.
    CanonicalC2(Signature),
    /// `{p_a, q^b} = δ`, `{p_a, p_b} = s ε_abc q^c / |q|³`.
    R3Twisted,
    /// `{p, w} = 1`, `{w, w̄} = 2i (s/m) g(p, p̄)`.
    ReducedChart(Signature),
}

/// A Poisson tensor together with the parameters its twist depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketStructure<T> {
    pub kind: StructureKind,
    pub params: Params<T>,
}

/// Coefficient of the reduced twist: `{w, w̄} = i · TWIST · (s/m) g`.
pub const REDUCED_TWIST: f64 = 2.0;

impl<T: Real> BracketStructure<T> {
    pub fn new(kind: StructureKind, params: Params<T>) -> Self {
        BracketStructure { kind, params }
    }

    pub fn canonical_complex(params: Params<T>) -> Self {
        Self::new(StructureKind::CanonicalComplex, params)
    }

    pub fn r3_twisted(params: Params<T>) -> Self {
        Self::new(StructureKind::R3Twisted, params)
    }

    pub fn reduced(signature: Signature, params: Params<T>) -> Self {
        Self::new(StructureKind::ReducedChart(signature), params)
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            StructureKind::CanonicalComplex | StructureKind::ReducedChart(_) => 4,
            StructureKind::CanonicalC2(_) => 8,
            StructureKind::R3Twisted => 6,
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            StructureKind::CanonicalComplex => "canonical-complex".into(),
            StructureKind::CanonicalC2(s) => format!("canonical-c2-{}", s.name()),
            StructureKind::R3Twisted => "r3-twisted".into(),
            StructureKind::ReducedChart(s) => format!("reduced-chart-{}", s.name()),
        }
    }

    /// Checks that a phase-space point belongs to this structure's space.
    pub fn accepts(&self, at: &PhaseState<T>) -> bool {
        matches!(
            (self.kind, at.space()),
            (StructureKind::CanonicalComplex, Space::FlatC)
                | (StructureKind::CanonicalC2(_), Space::FlatC2)
                | (StructureKind::R3Twisted, Space::R3Monopole)
                | (StructureKind::ReducedChart(Signature::Euclidean), Space::SphereChart0 | Space::SphereChart1)
                | (StructureKind::ReducedChart(Signature::Split), Space::Pseudosphere)
        )
    }

    /// Template state used to wrap raw coordinates.
    pub fn template(&self) -> PhaseState<T> {
        let z = Complex::new(T::zero(), T::zero());
        match self.kind {
            StructureKind::CanonicalComplex => PhaseState::flat(z, z),
            StructureKind::CanonicalC2(sig) => PhaseState::FlatC2(crate::model::FlatC2State::new([z, z], [z, z], sig)),
            StructureKind::R3Twisted => PhaseState::R3Monopole { q: [T::zero(); 3], p: [T::zero(); 3] },
            StructureKind::ReducedChart(signature) => PhaseState::Reduced { signature, chart: 0, p: z, w: z },
        }
    }

    /// Poisson tensor `Π^{ij} = {x_i, x_j}` (row-major, `dim × dim`).
    pub fn tensor(&self, x: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::Domain(format!("{} expects {n} coordinates, got {}", self.name(), x.len())));
        }
        let mut t = vec![T::zero(); n * n];
        let half = T::lit(0.5);
        let mut set = |i: usize, j: usize, v: T| {
            t[i * n + j] = v;
            t[j * n + i] = -v;
        };
        match self.kind {
            StructureKind::CanonicalComplex => {
                // x = (z_re, z_im, π_re, π_im)
                set(2, 0, half);
                set(3, 1, -half);
            }
            StructureKind::CanonicalC2(_) => {
                // x = (π⁰, π¹, ω₀, ω₁) split into (re, im)
                for a in 0..2 {
                    set(2 * a, 4 + 2 * a, half);
                    set(2 * a + 1, 4 + 2 * a + 1, -half);
                }
            }
            StructureKind::R3Twisted => {
                let q = [x[0], x[1], x[2]];
                let r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                if !(r2 > T::zero()) {
                    return Err(Error::Domain("R3 twist is singular at q = 0".into()));
                }
                let r3 = r2 * r2.sqrt();
                for a in 0..3 {
                    set(3 + a, a, T::one());
                }
                let s = self.params.s;
                // {p_a, p_b} = s ε_abc q^c / r³
                set(3, 4, s * q[2] / r3);
                set(4, 5, s * q[0] / r3);
                set(5, 3, s * q[1] / r3);
            }
            StructureKind::ReducedChart(sig) => {
                // x = (p_re, p_im, w_re, w_im)
                set(0, 2, half);
                set(1, 3, -half);
                let g = metric_g(Complex::new(x[0], x[1]), sig, self.params.m)?;
                let m = self.params.m;
                if m == T::zero() {
                    return Err(Error::Domain("reduced structure needs m != 0".into()));
                }
                // {w_re, w_im} = −(TWIST/2) (s/m) g
                set(2, 3, -T::lit(REDUCED_TWIST * 0.5) * self.params.s / m * g);
            }
        }
        Ok(t)
    }

    /// `{f, g}` evaluated from gradients at raw coordinates.
    pub fn bracket_grads(&self, df: &[Complex<T>], dg: &[Complex<T>], x: &[T]) -> Result<Complex<T>> {
        let n = self.dim();
        let t = self.tensor(x)?;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            if df[i] == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let mut row = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                let tij = t[i * n + j];
                if tij != T::zero() {
                    row = row + dg[j] * tij;
                }
            }
            acc = acc + df[i] * row;
        }
        Ok(acc)
    }

    pub fn bracket_coords(&self, f: &Observable<T>, g: &Observable<T>, x: &[T]) -> Result<Complex<T>> {
        let df = f.gradient(x)?;
        let dg = g.gradient(x)?;
        self.bracket_grads(&df, &dg, x)
    }

    /// Hamiltonian vector field `ẋ_i = {H, x_i}` from the gradient of `H`.
    pub fn vector_field(&self, dh: &[Complex<T>], x: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        let t = self.tensor(x)?;
        let mut v = vec![T::zero(); n];
        for (i, vi) in v.iter_mut().enumerate() {
            let mut acc = T::zero();
            for j in 0..n {
                acc = acc + dh[j].re * t[j * n + i];
            }
            *vi = acc;
        }
        Ok(v)
    }

    /// Largest cyclic Jacobi residual `Π^{il}∂_lΠ^{jk} + cyc.` at a point,
    /// with the tensor derivatives taken by central differences.
    pub fn jacobi_residual(&self, x: &[T]) -> Result<T> {
        let n = self.dim();
        let mut dt = Vec::with_capacity(n);
        let mut y = x.to_vec();
        for l in 0..n {
            let h = T::fd_step() * x[l].abs().max(T::one());
            y[l] = x[l] + h;
            let tp = self.tensor(&y)?;
            y[l] = x[l] - h;
            let tm = self.tensor(&y)?;
            y[l] = x[l];
            dt.push(tp.iter().zip(&tm).map(|(a, b)| (*a - *b) / (T::lit(2.0) * h)).collect::<Vec<_>>());
        }
        let t = self.tensor(x)?;
        let term = |i: usize, j: usize, k: usize| {
            let mut acc = T::zero();
            for (l, d) in dt.iter().enumerate() {
                acc = acc + t[i * n + l] * d[j * n + k];
            }
            acc
        };
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = term(i, j, k) + term(j, k, i) + term(k, i, j);
                    worst = worst.max(r.abs());
                }
            }
        }
        Ok(worst)
    }

    /// Draws one admissible point for this structure, or `None` if rejected.
    fn try_sample(&self, rng: &mut ChaCha8Rng) -> Option<Vec<T>> {
        let radius = 2.0;
        let disk = |rng: &mut ChaCha8Rng| -> (f64, f64) {
            let r = radius * rng.gen::<f64>().sqrt();
            let th = std::f64::consts::TAU * rng.gen::<f64>();
            (r * th.cos(), r * th.sin())
        };
        let pt: Vec<f64> = match self.kind {
            StructureKind::CanonicalComplex => {
                let (a, b) = disk(rng);
                let (c, d) = disk(rng);
                if a.hypot(b) < 0.1 {
                    return None;
                }
                vec![a, b, c, d]
            }
            StructureKind::CanonicalC2(sig) => {
                let mut v = Vec::with_capacity(8);
                for _ in 0..4 {
                    let (a, b) = disk(rng);
                    v.push(a);
                    v.push(b);
                }
                let n0 = v[0].hypot(v[1]);
                let n1 = v[2].hypot(v[3]);
                if n0 * n0 + n1 * n1 < 0.01 {
                    return None;
                }
                if sig == Signature::Split && (n0 - n1).abs() < 0.1 {
                    return None;
                }
                v
            }
            StructureKind::R3Twisted => {
                let mut ball = || loop {
                    let v: [f64; 3] = [
                        rng.gen_range(-radius..radius),
                        rng.gen_range(-radius..radius),
                        rng.gen_range(-radius..radius),
                    ];
                    if v.iter().map(|c| c * c).sum::<f64>() <= radius * radius {
                        return v;
                    }
                };
                let q = ball();
                let p = ball();
                if q.iter().map(|c| c * c).sum::<f64>().sqrt() < 0.1 {
                    return None;
                }
                vec![q[0], q[1], q[2], p[0], p[1], p[2]]
            }
            StructureKind::ReducedChart(sig) => {
                let (a, b) = disk(rng);
                let (c, d) = disk(rng);
                if sig == Signature::Split {
                    let r = a.hypot(b);
                    let ok = if self.params.m < T::zero() { r < 0.9 } else { r > 1.1 };
                    if !ok {
                        return None;
                    }
                }
                vec![a, b, c, d]
            }
        };
        Some(pt.into_iter().map(T::lit).collect())
    }

    /// Deterministic sample for point `index` under `seed`.
    pub fn sample_point(&self, seed: u64, index: usize) -> Result<Vec<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        for _ in 0..10_000 {
            if let Some(x) = self.try_sample(&mut rng) {
                return Ok(x);
            }
        }
        Err(Error::Sampling(format!("no admissible point for {} after 10000 draws", self.name())))
    }
}

/// `{f, g}` at a phase-space point.
pub fn bracket<T: Real>(
    structure: &BracketStructure<T>,
    f: &Observable<T>,
    g: &Observable<T>,
    at: &PhaseState<T>,
) -> Result<Complex<T>> {
    if !structure.accepts(at) {
        return Err(Error::Domain(format!("point in {:?} is not on the space of {}", at.space(), structure.name())));
    }
    structure.bracket_coords(f, g, &at.coords())
}

/// One term `coeff · G_i · G_j …` of a relation's right-hand side
/// (zero, one or two generator factors).
#[derive(Debug, Clone, PartialEq)]
pub struct Term<T> {
    pub coeff: Complex<T>,
    pub factors: Vec<usize>,
}

/// `factor · {G_lhs.0, G_lhs.1} = Σ terms`.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation<T> {
    pub name: String,
    pub lhs: (usize, usize),
    pub rhs: Vec<Term<T>>,
}

#[derive(Debug, Clone)]
pub struct AlgebraSpec<T> {
    pub name: String,
    pub generators: Vec<Observable<T>>,
    pub relations: Vec<Relation<T>>,
    /// Multiplies every bracket before comparison with the right-hand side.
    pub bracket_factor: Complex<T>,
}

impl<T: Real> AlgebraSpec<T> {
    pub fn new(name: impl Into<String>, generators: Vec<Observable<T>>) -> Self {
        AlgebraSpec {
            name: name.into(),
            generators,
            relations: Vec::new(),
            bracket_factor: Complex::new(T::one(), T::zero()),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Adds `{a, b} = Σ coeff · product(gens)` by generator names.
    pub fn relation(mut self, a: &str, b: &str, rhs: &[(Complex<T>, &[&str])]) -> Self {
        let idx = |n: &str| self.index_of(n).unwrap_or_else(|| panic!("unknown generator {n}"));
        let lhs = (idx(a), idx(b));
        let terms = rhs
            .iter()
            .map(|(c, gens)| Term { coeff: *c, factors: gens.iter().map(|g| idx(g)).collect() })
            .collect::<Vec<_>>();
        let name = format!("{{{a},{b}}}");
        self.relations.push(Relation { name, lhs, rhs: terms });
        self
    }

    pub fn with_factor(mut self, f: Complex<T>) -> Self {
        self.bracket_factor = f;
        self
    }

    /// Every relation references declared generators, with at most two factors per term.
    pub fn check(&self) -> Result<()> {
        let n = self.generators.len();
        for r in &self.relations {
            if r.lhs.0 >= n || r.lhs.1 >= n {
                return Err(Error::Input(format!("relation {} references an undeclared generator", r.name)));
            }
            for t in &r.rhs {
                if t.factors.len() > 2 || t.factors.iter().any(|&i| i >= n) {
                    return Err(Error::Input(format!("relation {} has an invalid term", r.name)));
                }
            }
        }
        Ok(())
    }
}

/// Per-relation audit result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub name: String,
    pub max_abs: f64,
    /// `max |lhs − rhs| / (1 + |rhs|)`.
    pub max_rel: f64,
    pub worst_index: usize,
    pub worst_point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub structure: String,
    pub algebra: String,
    pub n_points: usize,
    pub seed: u64,
    pub relations: Vec<RelationReport>,
}

impl AuditReport {
    pub fn max_abs(&self) -> f64 {
        self.relations.iter().map(|r| r.max_abs).fold(0.0, f64::max)
    }

    pub fn max_rel(&self) -> f64 {
        self.relations.iter().map(|r| r.max_rel).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.relations.iter().all(|r| r.max_abs < tol)
    }
}

/// Audits every relation of `spec` at `n_points` deterministic samples.
///
/// Points are evaluated in parallel; each point has its own RNG stream so the
/// report does not depend on scheduling.
pub fn audit_algebra<T: Real>(
    structure: &BracketStructure<T>,
    spec: &AlgebraSpec<T>,
    n_points: usize,
    seed: u64,
) -> Result<AuditReport> {
    if n_points == 0 {
        return Err(Error::Input("n_points must be at least 1".into()));
    }
    spec.check()?;
    type PointResult<T> = Result<(Vec<T>, Vec<(T, T)>)>;
    let per_point: Vec<PointResult<T>> = (0..n_points)
        .into_par_iter()
        .map(|k| {
            let x = structure.sample_point(seed, k)?;
            let vals: Vec<Complex<T>> = spec.generators.iter().map(|g| g.eval(&x)).collect();
            let grads = spec.generators.iter().map(|g| g.gradient(&x)).collect::<Result<Vec<_>>>()?;
            let mut res = Vec::with_capacity(spec.relations.len());
            for r in &spec.relations {
                let lhs = structure.bracket_grads(&grads[r.lhs.0], &grads[r.lhs.1], &x)? * spec.bracket_factor;
                let mut rhs = Complex::new(T::zero(), T::zero());
                for t in &r.rhs {
                    let mut v = t.coeff;
                    for &i in &t.factors {
                        v = v * vals[i];
                    }
                    rhs = rhs + v;
                }
                let abs = (lhs - rhs).norm();
                if !abs.is_finite() {
                    return Err(Error::Evaluation(format!("non-finite residual in {}", r.name)));
                }
                res.push((abs, abs / (T::one() + rhs.norm())));
            }
            Ok((x, res))
        })
        .collect();
    let mut reports: Vec<RelationReport> = spec
        .relations
        .iter()
        .map(|r| RelationReport {
            name: r.name.clone(),
            max_abs: 0.0,
            max_rel: 0.0,
            worst_index: 0,
            worst_point: Vec::new(),
        })
        .collect();
    for (k, item) in per_point.into_iter().enumerate() {
        let (x, res) = item?;
        for (rep, (abs, rel)) in reports.iter_mut().zip(res) {
            let (abs, rel) = (abs.as_f64(), rel.as_f64());
            if k == 0 || abs > rep.max_abs {
                rep.max_abs = abs;
                rep.worst_index = k;
                rep.worst_point = x.iter().map(|v| v.as_f64()).collect();
            }
            rep.max_rel = rep.max_rel.max(rel);
        }
    }
    Ok(AuditReport { structure: structure.name(), algebra: spec.name.clone(), n_points, seed, relations: reports })
}

/// Audits `{h, f} = 0` at sampled points.
pub fn check_conserved<T: Real>(
    structure: &BracketStructure<T>,
    h: &Observable<T>,
    f: &Observable<T>,
    n_points: usize,
    seed: u64,
) -> Result<AuditReport> {
    let mut spec = AlgebraSpec::new(format!("conservation of {} under {}", f.name, h.name), vec![h.clone(), f.clone()]);
    spec.relations.push(Relation { name: format!("{{{},{}}}", h.name, f.name), lhs: (0, 1), rhs: vec![] });
    audit_algebra(structure, &spec, n_points, seed)
}
