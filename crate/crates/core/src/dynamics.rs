//! Hamiltonian systems, fixed-step symplectic/Poisson integrators, drift and
//! period measurements.
//!
//! Equations of motion are `ẋ_i = {H, x_i}`. For the oscillator this gives
//! `ż = ω π̄`, `π̇ = −ω z̄`.

use crate::error::{Error, Result};
use crate::linalg::solve_in_place;
use crate::model::{Params, PhaseState, Signature};
use crate::poisson::{self, BracketStructure, Observable, StructureKind};
use crate::reduction;
use crate::scalar::Real;
use crate::transforms::Trajectory;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemKind {
    Oscillator2D,
    Coulomb2D,
    Vortex2D,
    Dyon3D,
    SphereMonopole,
    PseudosphereMonopole,
}

impl SystemKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "oscillator2d" | "oscillator" => SystemKind::Oscillator2D,
            "coulomb2d" | "coulomb" => SystemKind::Coulomb2D,
            "vortex2d" | "vortex" => SystemKind::Vortex2D,
            "dyon3d" | "dyon" => SystemKind::Dyon3D,
            "spheremonopole" | "sphere" => SystemKind::SphereMonopole,
            "pseudospheremonopole" | "pseudosphere" => SystemKind::PseudosphereMonopole,
            _ => return Err(Error::Input(format!("unknown system {name:?}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Oscillator2D => "oscillator2d",
            SystemKind::Coulomb2D => "coulomb2d",
            SystemKind::Vortex2D => "vortex2d",
            SystemKind::Dyon3D => "dyon3d",
            SystemKind::SphereMonopole => "sphere",
            SystemKind::PseudosphereMonopole => "pseudosphere",
        }
    }
}

/// A Hamiltonian on one of the bracket structures, plus the integrals it is
/// expected to conserve.
#[derive(Debug, Clone)]
pub struct HamiltonianSystem<T> {
    pub kind: SystemKind,
    pub structure: BracketStructure<T>,
    pub h: Observable<T>,
    /// Conserved integrals in chart 0 (all charts agree except on the sphere).
    pub conserved: Vec<Observable<T>>,
    /// Same integrals in chart 1 (sphere only).
    pub conserved_chart1: Vec<Observable<T>>,
    /// `(kinetic, potential)` for separable flat systems.
    pub splitting: Option<(Observable<T>, Observable<T>)>,
    /// Collision radius at which integration halts.
    pub min_radius: T,
    /// Flat `T*C²` Hamiltonian whose reduction is this system (dyon, sphere).
    pub lift: Option<Observable<T>>,
}

fn flat_kinetic<T: Real>(coef: T) -> Observable<T> {
    Observable::real("T", move |x: &[T]| coef * (x[2] * x[2] + x[3] * x[3])).with_grad(move |x| {
        let z = T::zero();
        let two = T::lit(2.0) * coef;
        vec![Complex::new(z, z), Complex::new(z, z), Complex::new(two * x[2], z), Complex::new(two * x[3], z)]
    })
}

fn oscillator_potential<T: Real>(omega: T) -> Observable<T> {
    Observable::real("V", move |x: &[T]| omega * (x[0] * x[0] + x[1] * x[1])).with_grad(move |x| {
        let z = T::zero();
        let two = T::lit(2.0) * omega;
        vec![Complex::new(two * x[0], z), Complex::new(two * x[1], z), Complex::new(z, z), Complex::new(z, z)]
    })
}

/// `−α/|w| + c/|w|²`.
fn coulomb_potential<T: Real>(alpha: T, c: T) -> Observable<T> {
    Observable::real("V", move |x: &[T]| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        -alpha / r2.sqrt() + c / r2
    })
    .with_grad(move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let r3 = r2 * r2.sqrt();
        let coul = |v: T| alpha * v / r3;
        let cent = |v: T| -T::lit(2.0) * c * v / (r2 * r2);
        let z = T::zero();
        vec![
            Complex::new(coul(x[0]) + cent(x[0]), z),
            Complex::new(coul(x[1]) + cent(x[1]), z),
            Complex::new(z, z),
            Complex::new(z, z),
        ]
    })
}

/// Dyon Hamiltonian pulled back to `T*C²` through `(q, p) = (P_vec, −Q)`.
fn dyon_lift<T: Real>(params: &Params<T>) -> Observable<T> {
    let h = poisson::dyon_hamiltonian(params);
    Observable::real("H", move |x: &[T]| {
        let st = crate::model::FlatC2State::from_coords(x, Signature::Euclidean);
        match reduction::to_monopole_r3(&st) {
            Ok((q, p, _)) => h.eval(&[q[0], q[1], q[2], p[0], p[1], p[2]]).re,
            Err(_) => T::nan(),
        }
    })
    .with_fd(poisson::FdMode::Richardson)
}

/// `J^a J_a − J²` on Euclidean `T*C²`, which reduces to the sphere top.
fn sphere_lift<T: Real>() -> Observable<T> {
    Observable::real("H", move |x: &[T]| {
        let st = crate::model::FlatC2State::from_coords(x, Signature::Euclidean);
        let j = reduction::flat_j_vec(&st);
        let (_, s) = reduction::moment_map(&st);
        j[0] * j[0] + j[1] * j[1] + j[2] * j[2] - s * s
    })
    .with_fd(poisson::FdMode::Richardson)
}

impl<T: Real> HamiltonianSystem<T> {
    pub fn new(kind: SystemKind, params: &Params<T>) -> Result<Self> {
        params.check()?;
        let p = params.clone();
        let two = T::lit(2.0);
        let min_radius = T::lit(1e-9);
        let sys = match kind {
            SystemKind::Oscillator2D => HamiltonianSystem {
                kind,
                structure: BracketStructure::canonical_complex(p.clone()),
                h: poisson::osc_hamiltonian(p.omega),
                conserved: vec![poisson::osc_rotation(), poisson::osc_i_plus(p.omega), poisson::osc_i_minus(p.omega)],
                conserved_chart1: Vec::new(),
                splitting: Some((flat_kinetic(p.omega), oscillator_potential(p.omega))),
                min_radius: T::zero(),
                lift: None,
            },
            SystemKind::Coulomb2D => HamiltonianSystem {
                kind,
                structure: BracketStructure::canonical_complex(p.clone()),
                h: poisson::coulomb_hamiltonian(p.mu, p.alpha),
                conserved: vec![poisson::coulomb_rotation(), poisson::runge_lenz(p.mu, p.alpha)],
                conserved_chart1: Vec::new(),
                splitting: Some((flat_kinetic(T::one() / (two * p.mu)), coulomb_potential(p.alpha, T::zero()))),
                min_radius,
                lift: None,
            },
            SystemKind::Vortex2D => {
                let sig = p.sigma_real();
                let c = p.hbar * p.hbar * sig * sig / (two * p.mu);
                HamiltonianSystem {
                    kind,
                    structure: BracketStructure::canonical_complex(p.clone()),
                    h: poisson::vortex_hamiltonian(&p),
                    conserved: vec![poisson::coulomb_rotation()],
                    conserved_chart1: Vec::new(),
                    splitting: Some((flat_kinetic(T::one() / (two * p.mu)), coulomb_potential(p.alpha, c))),
                    min_radius,
                    lift: None,
                }
            }
            SystemKind::Dyon3D => HamiltonianSystem {
                kind,
                structure: BracketStructure::r3_twisted(p.clone()),
                h: poisson::dyon_hamiltonian(&p),
                conserved: (0..3).map(|a| poisson::dyon_rotation(a, p.s)).collect(),
                conserved_chart1: Vec::new(),
                splitting: None,
                min_radius,
                lift: Some(dyon_lift(&p)),
            },
            SystemKind::SphereMonopole | SystemKind::PseudosphereMonopole => {
                if p.m == T::zero() {
                    return Err(Error::InvalidParams("m must be nonzero for a reduced system".into()));
                }
                let sig = if kind == SystemKind::SphereMonopole { Signature::Euclidean } else { Signature::Split };
                let js = |chart: u8| (0..3).map(|a| poisson::reduced_j(a, sig, chart, p.m, p.s)).collect();
                HamiltonianSystem {
                    kind,
                    structure: BracketStructure::reduced(sig, p.clone()),
                    h: poisson::reduced_hamiltonian(sig),
                    conserved: js(0),
                    conserved_chart1: if sig == Signature::Euclidean { js(1) } else { Vec::new() },
                    splitting: None,
                    min_radius: T::zero(),
                    lift: if sig == Signature::Euclidean { Some(sphere_lift()) } else { None },
                }
            }
        };
        Ok(sys)
    }

    pub fn params(&self) -> &Params<T> {
        &self.structure.params
    }

    /// Audits `{H, f} = 0` for every conserved integral (chart 0).
    pub fn audit(&self, n_points: usize, seed: u64) -> Result<poisson::AuditReport> {
        let mut gens = vec![self.h.clone().renamed("H")];
        gens.extend(self.conserved.iter().cloned());
        let mut spec = poisson::AlgebraSpec::new(format!("{}-integrals", self.kind.name()), gens);
        for k in 1..spec.generators.len() {
            spec.relations.push(poisson::Relation {
                name: format!("{{H,{}}}", spec.generators[k].name),
                lhs: (0, k),
                rhs: Vec::new(),
            });
        }
        poisson::audit_algebra(&self.structure, &spec, n_points, seed)
    }

    /// Values `(H, integrals…)` at a state, using the integrals of its chart.
    pub fn evaluate(&self, state: &PhaseState<T>) -> Vec<Complex<T>> {
        let x = state.coords();
        let integrals = match state {
            PhaseState::Reduced { chart: 1, .. } if !self.conserved_chart1.is_empty() => &self.conserved_chart1,
            _ => &self.conserved,
        };
        std::iter::once(self.h.eval(&x)).chain(integrals.iter().map(|o| o.eval(&x))).collect()
    }

    pub fn tracked_names(&self) -> Vec<String> {
        std::iter::once("H".to_string()).chain(self.conserved.iter().map(|o| o.name.clone())).collect()
    }

    fn vector_field(&self, x: &[T]) -> Result<Vec<T>> {
        let g = self.h.gradient(x)?;
        self.structure.vector_field(&g, x)
    }

    /// Flat representative of a state of a system with a lift.
    pub fn lift_state(&self, state: &PhaseState<T>) -> Result<crate::model::FlatC2State<T>> {
        let p = self.params();
        match (*state, self.kind) {
            (PhaseState::R3Monopole { q, p: mom }, SystemKind::Dyon3D) => reduction::lift_monopole_r3(q, mom, p.s),
            (PhaseState::Reduced { signature: Signature::Euclidean, chart, p: pp, w }, SystemKind::SphereMonopole) => {
                reduction::lift(pp, w, chart, Signature::Euclidean, p.m, p.s)
            }
            _ => Err(Error::InvalidParams(format!("{} has no flat lift", self.kind.name()))),
        }
    }

    /// Projects a flat state back, staying in `chart` unless `|p|` exceeds the switch bound.
    pub fn project_state(&self, flat: &crate::model::FlatC2State<T>, chart: u8) -> Result<PhaseState<T>> {
        match self.kind {
            SystemKind::Dyon3D => {
                let (q, p, _) = reduction::to_monopole_r3(flat)?;
                Ok(PhaseState::R3Monopole { q, p })
            }
            SystemKind::SphereMonopole => {
                let mut pr = reduction::project_chart(flat, chart)?;
                if pr.p.norm() > T::lit(CHART_SWITCH) {
                    pr = reduction::project_chart(flat, 1 - chart)?;
                }
                Ok(PhaseState::Reduced { signature: Signature::Euclidean, chart: pr.chart, p: pr.p, w: pr.w })
            }
            _ => Err(Error::InvalidParams(format!("{} has no flat lift", self.kind.name()))),
        }
    }

    /// Admissibility of a state for this system.
    pub fn check_state(&self, state: &PhaseState<T>) -> Result<()> {
        if !self.structure.accepts(state) {
            return Err(Error::Domain(format!("{:?} state does not belong to {}", state.space(), self.kind.name())));
        }
        let x = state.coords();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite coordinates".into()));
        }
        match self.kind {
            SystemKind::Oscillator2D => Ok(()),
            SystemKind::Coulomb2D | SystemKind::Vortex2D => {
                if Complex::new(x[0], x[1]).norm() <= self.min_radius {
                    return Err(Error::Domain("collision: |w| at the origin".into()));
                }
                Ok(())
            }
            SystemKind::Dyon3D => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                if r <= self.min_radius {
                    return Err(Error::Domain("q at the origin".into()));
                }
                Ok(())
            }
            SystemKind::SphereMonopole => Ok(()),
            SystemKind::PseudosphereMonopole => crate::model::validate(state, self.params()).into_result(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Strang splitting (kick–drift–kick) for separable flat systems.
    SplitSymplectic,
    /// Implicit midpoint for any structure.
    ImplicitMidpoint,
    /// Implicit midpoint on the flat `T*C²` lift, projected back every step.
    /// The rotation generators are quadratic there and so conserved exactly.
    LiftedMidpoint,
    /// Coulomb2D only: the exact oscillator solution mapped through the
    /// Kepler dictionary, with Coulomb time from `k ∫ |z|² ds` inverted.
    KeplerRegularized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct IntegratorConfig<T> {
    pub method: Method,
    /// Nominal step; the actual step is `t_end / ceil(t_end/dt)`.
    pub dt: T,
    pub t_end: T,
    pub newton_tol: T,
    pub newton_max_iter: usize,
}

impl<T: Real> IntegratorConfig<T> {
    pub fn new(method: Method, dt: T, t_end: T) -> Self {
        IntegratorConfig { method, dt, t_end, newton_tol: T::lit(1e-14), newton_max_iter: 50 }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !(self.t_end > T::zero()) {
            return Err(Error::InvalidParams("dt and t_end must be positive".into()));
        }
        if !(self.newton_tol >= T::lit(1e-14)) {
            return Err(Error::InvalidParams("newton_tol must be at least 1e-14".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        let n = (self.t_end / self.dt - T::lit(1e-9)).ceil();
        n.to_usize().unwrap_or(1).max(1)
    }
}

/// Sphere chart switch threshold: `|p| > 1.1` in the current chart.
pub const CHART_SWITCH: f64 = 1.1;

/// Integrates `system` from `start`; the trajectory holds every step.
pub fn flow<T: Real>(
    system: &HamiltonianSystem<T>,
    start: &PhaseState<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    cfg.check()?;
    system.check_state(start)?;
    let n = cfg.steps();
    let h = cfg.t_end / T::from_usize_lossy(n);
    let mut traj = Trajectory::new(system.kind.name(), system.params().clone());
    let mut state = *start;
    traj.samples.reserve(n + 1);
    traj.push(T::zero(), state);
    if cfg.method == Method::LiftedMidpoint {
        let hl = system
            .lift
            .as_ref()
            .ok_or_else(|| Error::InvalidParams(format!("{} has no flat lift", system.kind.name())))?;
        let flat = StructureKind::CanonicalC2(Signature::Euclidean);
        let structure = BracketStructure::new(flat, system.params().clone());
        let vf = |x: &[T]| -> Result<Vec<T>> { structure.vector_field(&hl.gradient(x)?, x) };
        let mut y = system.lift_state(start)?.coords().to_vec();
        let mut solver = MidpointSolver::new();
        for k in 1..=n {
            let t = h * T::from_usize_lossy(k);
            y = solver.step(&vf, &y, h, cfg, t)?;
            let chart = match state {
                PhaseState::Reduced { chart, .. } => chart,
                _ => 0,
            };
            let st = crate::model::FlatC2State::from_coords(&y, Signature::Euclidean);
            state =
                system.project_state(&st, chart).map_err(|e| Error::Excluded { t: t.as_f64(), what: e.to_string() })?;
            if let Err(e) = system.check_state(&state) {
                return Err(Error::Excluded { t: t.as_f64(), what: e.to_string() });
            }
            traj.push(t, state);
        }
        return Ok(traj);
    }
    if cfg.method == Method::KeplerRegularized {
        return kepler_regularized(system, start, n, h, traj);
    }
    let vf = |x: &[T]| system.vector_field(x);
    let mut solver = MidpointSolver::new();
    for k in 1..=n {
        let t = h * T::from_usize_lossy(k);
        let x = state.coords();
        let y = match cfg.method {
            Method::SplitSymplectic => split_step(system, &x, h)?,
            Method::ImplicitMidpoint => solver.step(&vf, &x, h, cfg, t)?,
            Method::LiftedMidpoint | Method::KeplerRegularized => unreachable!(),
        };
        if matches!(system.kind, SystemKind::Coulomb2D | SystemKind::Vortex2D) {
            let (a, b) = (Complex::new(x[0], x[1]), Complex::new(y[0], y[1]));
            if segment_distance(a, b) <= system.min_radius {
                return Err(Error::Excluded { t: t.as_f64(), what: "collision: the step crosses |w| = 0".into() });
            }
        }
        state = state.with_coords(&y);
        if let Err(e) = system.check_state(&state) {
            return Err(Error::Excluded { t: t.as_f64(), what: e.to_string() });
        }
        if system.kind == SystemKind::SphereMonopole {
            state = maybe_switch_chart(&state, system.params())?;
        }
        traj.push(t, state);
    }
    Ok(traj)
}

/// Bound Coulomb motion through its oscillator preimage.
fn kepler_regularized<T: Real>(
    system: &HamiltonianSystem<T>,
    start: &PhaseState<T>,
    n: usize,
    h: T,
    mut traj: Trajectory<T>,
) -> Result<Trajectory<T>> {
    if system.kind != SystemKind::Coulomb2D {
        return Err(Error::InvalidParams("the regularized solver applies to coulomb2d only".into()));
    }
    let (w0, p0) = match *start {
        PhaseState::FlatC { z, pi } => (z, pi),
        _ => return Err(Error::Domain("coulomb2d needs a FlatC state".into())),
    };
    let params = system.params();
    let e = system.h.eval(&start.coords()).re;
    if !(e < T::zero()) || !(params.alpha > T::zero()) {
        return Err(Error::InvalidParams("regularized flow needs a bound orbit (alpha > 0, H < 0)".into()));
    }
    let two = T::lit(2.0);
    let omega = (-e / (two * params.mu)).sqrt();
    let op = Params { omega, alpha: params.alpha, ..params.clone() };
    let img = crate::transforms::CoulombImage::kepler(&op);
    let lam = img.position_scale;
    let c = img.momentum_scale(&op);
    let z0 = (w0 / lam).sqrt();
    let pi0 = z0 * p0 * two / c;
    // |z(s)|² = A + B cos 2ωs + C sin 2ωs
    let a = (z0.norm_sqr() + pi0.norm_sqr()) / two;
    let b = (z0.norm_sqr() - pi0.norm_sqr()) / two;
    let cc = (z0 * pi0).re;
    let w2 = two * omega;
    let big_t = |s: T| img.time_factor * (a * s + (b * (w2 * s).sin() + cc * (T::one() - (w2 * s).cos())) / w2);
    let rate = |s: T| img.time_factor * (a + b * (w2 * s).cos() + cc * (w2 * s).sin());
    let rmin = img.time_factor * (a - (b * b + cc * cc).sqrt());
    if !(rmin > T::zero()) {
        return Err(Error::Excluded { t: 0.0, what: "radial orbit through the origin".into() });
    }
    let mut s = T::zero();
    for k in 1..=n {
        let t = h * T::from_usize_lossy(k);
        // Newton on the increasing function T(s) − t, safeguarded by its bracket.
        let (mut lo, mut hi) = (s, s + (t - big_t(s)) / rmin);
        let mut x = s + (t - big_t(s)) / rate(s);
        for _ in 0..100 {
            if !(x > lo && x < hi) {
                x = (lo + hi) / two;
            }
            let f = big_t(x) - t;
            if f > T::zero() {
                hi = x;
            } else {
                lo = x;
            }
            let dx = f / rate(x);
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) * x.abs().max(T::one()) {
                break;
            }
        }
        s = x;
        let (sn, cs) = (omega * s).sin_cos();
        let z = z0 * cs + pi0.conj() * sn;
        let pi = pi0 * cs - z0.conj() * sn;
        let state = PhaseState::flat(z * z * lam, pi * c / (z * two));
        if let Err(err) = system.check_state(&state) {
            return Err(Error::Excluded { t: t.as_f64(), what: err.to_string() });
        }
        traj.push(t, state);
    }
    Ok(traj)
}

/// Moves a sphere state to the other chart when `|p|` exceeds the hysteresis bound.
pub fn maybe_switch_chart<T: Real>(state: &PhaseState<T>, params: &Params<T>) -> Result<PhaseState<T>> {
    if let PhaseState::Reduced { signature: Signature::Euclidean, chart, p, w } = *state {
        if p.norm() > T::lit(CHART_SWITCH) {
            let (p2, w2) = reduction::switch_chart(p, w, chart, params.m, params.s)?;
            return Ok(PhaseState::Reduced { signature: Signature::Euclidean, chart: 1 - chart, p: p2, w: w2 });
        }
    }
    Ok(*state)
}

/// Distance from the origin to the segment `a → b`.
fn segment_distance<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == T::zero() {
        return a.norm();
    }
    let t = (-(a.conj() * d).re / l2).max(T::zero()).min(T::one());
    (a + d * t).norm()
}

fn axpy<T: Real>(x: &mut [T], a: T, v: &[T]) {
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi = *xi + a * *vi;
    }
}

fn split_step<T: Real>(system: &HamiltonianSystem<T>, x: &[T], h: T) -> Result<Vec<T>> {
    let (kin, pot) = system.splitting.as_ref().ok_or_else(|| {
        Error::InvalidParams(format!("{} is not separable; use the implicit midpoint", system.kind.name()))
    })?;
    let half = h * T::lit(0.5);
    let mut y = x.to_vec();
    let kick = |y: &mut Vec<T>, a: T| -> Result<()> {
        let v = system.structure.vector_field(&pot.gradient(y)?, y)?;
        axpy(y, a, &v);
        Ok(())
    };
    kick(&mut y, half)?;
    let v = system.structure.vector_field(&kin.gradient(&y)?, &y)?;
    axpy(&mut y, h, &v);
    kick(&mut y, half)?;
    Ok(y)
}

/// Newton matrix `I − (h/2) DF` kept across steps and rebuilt only when a
/// simplified Newton iteration with it stalls.
struct MidpointSolver<T> {
    matrix: Option<Vec<T>>,
}

impl<T: Real> MidpointSolver<T> {
    fn new() -> Self {
        MidpointSolver { matrix: None }
    }

    /// Solves `y = x + h F((x+y)/2)`.
    fn step<F>(&mut self, vector_field: &F, x: &[T], h: T, cfg: &IntegratorConfig<T>, t: T) -> Result<Vec<T>>
    where
        F: Fn(&[T]) -> Result<Vec<T>>,
    {
        let f0 = vector_field(x)?;
        if let Some(a) = &self.matrix {
            if let Ok(y) = newton(vector_field, a, x, &f0, h, cfg, t, 8) {
                return Ok(y);
            }
        }
        let a = newton_matrix(vector_field, x, h)?;
        let y = newton(vector_field, &a, x, &f0, h, cfg, t, cfg.newton_max_iter)?;
        self.matrix = Some(a);
        Ok(y)
    }
}

/// `I − (h/2) DF(x)` with a central-difference Jacobian.
fn newton_matrix<T: Real, F>(vector_field: &F, x: &[T], h: T) -> Result<Vec<T>>
where
    F: Fn(&[T]) -> Result<Vec<T>>,
{
    let n = x.len();
    let half = h * T::lit(0.5);
    let mut a = vec![T::zero(); n * n];
    let mut xp = x.to_vec();
    for j in 0..n {
        let e = T::lit(1e-6) * x[j].abs().max(T::one());
        xp[j] = x[j] + e;
        let fp = vector_field(&xp)?;
        xp[j] = x[j] - e;
        let fm = vector_field(&xp)?;
        xp[j] = x[j];
        for i in 0..n {
            let d = if i == j { T::one() } else { T::zero() };
            a[i * n + j] = d - half * (fp[i] - fm[i]) / (T::lit(2.0) * e);
        }
    }
    Ok(a)
}

#[allow(clippy::too_many_arguments)]
fn newton<T: Real, F>(
    vector_field: &F,
    a: &[T],
    x: &[T],
    f0: &[T],
    h: T,
    cfg: &IntegratorConfig<T>,
    t: T,
    max_iter: usize,
) -> Result<Vec<T>>
where
    F: Fn(&[T]) -> Result<Vec<T>>,
{
    let n = x.len();
    let mut y = x.to_vec();
    axpy(&mut y, h, f0);
    let mut prev = T::infinity();
    let mut mid = vec![T::zero(); n];
    for it in 0..max_iter {
        for i in 0..n {
            mid[i] = (x[i] + y[i]) * T::lit(0.5);
        }
        let f = vector_field(&mid)?;
        let mut r: Vec<T> = (0..n).map(|i| -(y[i] - x[i] - h * f[i])).collect();
        solve_in_place(&mut a.to_vec(), &mut r, n)?;
        axpy(&mut y, T::one(), &r);
        let dn = r.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let scale = T::one() + y.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if !dn.is_finite() {
            break;
        }
        if dn <= cfg.newton_tol * scale || (it >= 2 && dn >= prev && dn <= T::lit(1e-11) * scale) {
            return Ok(y);
        }
        prev = dn;
    }
    Err(Error::NoConvergence { t: t.as_f64(), residual: prev.as_f64() })
}

/// Drift of one observable along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftEntry {
    pub name: String,
    pub initial: [f64; 2],
    pub max_abs: f64,
    /// `max_abs / |f(x_0)|` (equal to `max_abs` when `f(x_0) = 0`).
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub samples: usize,
    pub entries: Vec<DriftEntry>,
}

impl DriftReport {
    pub fn get(&self, name: &str) -> Option<&DriftEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn max_relative(&self) -> f64 {
        self.entries.iter().map(|e| e.relative).fold(0.0, f64::max)
    }
}

/// Drift of observables evaluated on the raw coordinates of each sample.
pub fn drift_report<T: Real>(traj: &Trajectory<T>, observables: &[Observable<T>]) -> Result<DriftReport> {
    let names: Vec<String> = observables.iter().map(|o| o.name.clone()).collect();
    drift_report_with(traj, &names, |s| {
        let x = s.coords();
        observables.iter().map(|o| o.eval(&x)).collect()
    })
}

/// Drift of a system's `H` and integrals, chart-aware on the sphere.
pub fn system_drift<T: Real>(system: &HamiltonianSystem<T>, traj: &Trajectory<T>) -> Result<DriftReport> {
    drift_report_with(traj, &system.tracked_names(), |s| system.evaluate(s))
}

pub fn drift_report_with<T: Real, F>(traj: &Trajectory<T>, names: &[String], f: F) -> Result<DriftReport>
where
    F: Fn(&PhaseState<T>) -> Vec<Complex<T>>,
{
    let first = traj.first().ok_or_else(|| Error::Input("empty trajectory".into()))?;
    let f0 = f(first);
    let mut max = vec![T::zero(); names.len()];
    for (_, s) in &traj.samples {
        for (k, v) in f(s).into_iter().enumerate() {
            max[k] = max[k].max((v - f0[k]).norm());
        }
    }
    let entries = names
        .iter()
        .zip(f0.iter().zip(max))
        .map(|(n, (v0, m))| {
            let a = v0.norm();
            DriftEntry {
                name: n.clone(),
                initial: [v0.re.as_f64(), v0.im.as_f64()],
                max_abs: m.as_f64(),
                relative: if a > T::zero() { (m / a).as_f64() } else { m.as_f64() },
            }
        })
        .collect();
    Ok(DriftReport { samples: traj.len(), entries })
}

/// First return time to the hyperplane through the start point normal to
/// the initial velocity, refined by cubic interpolation.
pub fn period_estimate<T: Real>(traj: &Trajectory<T>) -> Result<T> {
    if traj.len() < 4 {
        return Err(Error::NoReturn);
    }
    let xs: Vec<Vec<T>> = traj.samples.iter().map(|(_, s)| s.coords()).collect();
    let ts = traj.times();
    let x0 = &xs[0];
    let dt = ts[1] - ts[0];
    let v0: Vec<T> = xs[1].iter().zip(x0).map(|(a, b)| (*a - *b) / dt).collect();
    let phi: Vec<T> = xs.iter().map(|x| x.iter().zip(x0).zip(&v0).map(|((a, b), v)| (*a - *b) * *v).sum()).collect();
    let mut been_negative = false;
    for k in 1..phi.len() {
        if phi[k] < T::zero() {
            been_negative = true;
            continue;
        }
        if been_negative && phi[k - 1] < T::zero() && phi[k] >= T::zero() {
            // cubic through samples k−2..k+1 (clamped), root by bisection in [t_{k−1}, t_k]
            let lo = k.saturating_sub(2).min(phi.len().saturating_sub(4));
            let hi = (lo + 4).min(phi.len());
            let interp = |t: T| {
                let mut acc = T::zero();
                for j in lo..hi {
                    let mut l = T::one();
                    for m in lo..hi {
                        if m != j {
                            l = l * (t - ts[m]) / (ts[j] - ts[m]);
                        }
                    }
                    acc = acc + l * phi[j];
                }
                acc
            };
            let (mut a, mut b) = (ts[k - 1], ts[k]);
            for _ in 0..200 {
                let c = (a + b) * T::lit(0.5);
                if interp(c) < T::zero() {
                    a = c;
                } else {
                    b = c;
                }
            }
            return Ok((a + b) * T::lit(0.5) - ts[0]);
        }
    }
    Err(Error::NoReturn)
}

/// Initial data of the circular Coulomb orbit of radius `r0`
/// (`H_C = p p̄/(2μ) − α/|w|`, effective mass `4μ`) and its period
/// `2π √(4μ r0³/α)`.
pub fn circular_coulomb<T: Real>(params: &Params<T>, r0: T) -> (PhaseState<T>, T) {
    let four_mu = T::lit(4.0) * params.mu;
    let v = (params.alpha / (four_mu * r0)).sqrt();
    let w = Complex::new(r0, T::zero());
    // ẇ = p̄/(2μ) = i v
    let p = Complex::new(T::zero(), -T::lit(2.0) * params.mu * v);
    let period = T::TAU() * (four_mu * r0 * r0 * r0 / params.alpha).sqrt();
    (PhaseState::flat(w, p), period)
}

/// Uniform circular orbit of the charge–dyon system at radius `r0`
/// (force balance including the `s²/|q|²` term) and its period.
pub fn circular_dyon<T: Real>(params: &Params<T>, r0: T) -> Result<(PhaseState<T>, T)> {
    // μ v² / r = α/r² − s²/(μ r³)
    let mu = params.mu;
    let s2 = params.s * params.s;
    let v2 = (params.alpha / r0 - s2 / (mu * r0 * r0)) / mu;
    if !(v2 > T::zero()) {
        return Err(Error::InvalidParams("no circular orbit at this radius".into()));
    }
    let v = v2.sqrt();
    let state = PhaseState::R3Monopole { q: [r0, T::zero(), T::zero()], p: [T::zero(), mu * v, T::zero()] };
    // The orbit is a circle on the cone q·Ĵ = −s|q|/|J|, of radius r sinθ.
    let l = r0 * mu * v;
    let sin_theta = l / (l * l + s2).sqrt();
    Ok((state, T::TAU() * r0 * sin_theta / v))
}

/// Exact oscillator state at time `t`: `z = z₀ cos ωt + π̄₀ sin ωt`,
/// `π = π₀ cos ωt − z̄₀ sin ωt`.
pub fn oscillator_solution<T: Real>(params: &Params<T>, start: &PhaseState<T>, t: T) -> Result<PhaseState<T>> {
    let (z0, pi0) = match *start {
        PhaseState::FlatC { z, pi } => (z, pi),
        _ => return Err(Error::Domain("the oscillator needs a FlatC state".into())),
    };
    let (sn, cs) = (params.omega * t).sin_cos();
    Ok(PhaseState::flat(z0 * cs + pi0.conj() * sn, pi0 * cs - z0.conj() * sn))
}

/// `n + 1` exact samples at `t_k = k t_end / n`.
pub fn oscillator_orbit<T: Real>(
    params: &Params<T>,
    start: &PhaseState<T>,
    t_end: T,
    n: usize,
) -> Result<Trajectory<T>> {
    if n == 0 || !(t_end > T::zero()) {
        return Err(Error::InvalidParams("need n >= 1 and t_end > 0".into()));
    }
    let mut traj = Trajectory::new(SystemKind::Oscillator2D.name(), params.clone());
    for k in 0..=n {
        let t = t_end * T::from_usize_lossy(k) / T::from_usize_lossy(n);
        traj.push(t, oscillator_solution(params, start, t)?);
    }
    Ok(traj)
}

/// Default integrator of each system.
pub fn default_method(kind: SystemKind) -> Method {
    match kind {
        SystemKind::Oscillator2D | SystemKind::Coulomb2D | SystemKind::Vortex2D => Method::SplitSymplectic,
        SystemKind::Dyon3D | SystemKind::SphereMonopole => Method::LiftedMidpoint,
        SystemKind::PseudosphereMonopole => Method::ImplicitMidpoint,
    }
}
