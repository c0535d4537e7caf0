//! Shared value types: physical parameters, phase-space points, validation
//! and the Kähler metric of the reduced charts.
//!
//! Units: ħ = μ = 1 by default, and e = c = 1 wherever a charge or the speed
//! of light would appear (vortex flux, monopole flux).

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Physical parameters consumed by every module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default, deny_unknown_fields)]
pub struct Params<T> {
    pub mu: T,
    pub omega: T,
    pub alpha: T,
    pub hbar: T,
    /// Monopole charge, equivalently the spin value `J = s` on the level set.
    pub s: T,
    /// Level value `P = m` of the generator `P`.
    pub m: T,
    /// Vortex parameter `k/N`. Accepts `0.5` or `"1/2"` in JSON.
    #[serde(with = "sigma_serde")]
    pub sigma: Rational64,
    /// Order `N` of the Z_N map that `sigma` belongs to.
    pub n: u32,
}

impl<T: Real> Default for Params<T> {
    fn default() -> Self {
        Params {
            mu: T::one(),
            omega: T::one(),
            alpha: T::one(),
            hbar: T::one(),
            s: T::zero(),
            m: T::one(),
            sigma: Rational64::zero(),
            n: 2,
        }
    }
}

impl<T: Real> Params<T> {
    /// `sigma` as a floating-point value.
    pub fn sigma_real(&self) -> T {
        T::lit(self.sigma.to_f64().unwrap_or(f64::NAN))
    }

    /// Checks the record-level invariants; returns the violated ones.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut positive = |name: &str, v: T| {
            if !(v > T::zero()) || !v.is_finite() {
                out.push(Violation::new(
                    &format!("{name}-positive"),
                    format!("{name} must be positive and finite, got {v}"),
                    vec![v.as_f64()],
                    v.as_f64(),
                ));
            }
        };
        positive("mu", self.mu);
        positive("omega", self.omega);
        positive("hbar", self.hbar);
        if !self.alpha.is_finite() || !self.s.is_finite() || !self.m.is_finite() {
            out.push(Violation::new(
                "finite",
                "alpha, s and m must be finite".into(),
                vec![self.alpha.as_f64(), self.s.as_f64(), self.m.as_f64()],
                f64::NAN,
            ));
        }
        let sig = self.sigma;
        if sig.is_negative() || sig >= Rational64::from_integer(1) {
            out.push(Violation::new(
                "sigma-range",
                format!("sigma must lie in [0,1), got {sig}"),
                vec![sig.to_f64().unwrap_or(f64::NAN)],
                sig.to_f64().unwrap_or(f64::NAN),
            ));
        }
        if self.n == 0 {
            out.push(Violation::new("n-positive", "Z_N order must be at least 1".into(), vec![0.0], 0.0));
        } else if !(sig * Rational64::from_integer(self.n as i64)).is_integer() {
            out.push(Violation::new(
                "sigma-lattice",
                format!("sigma*N must be an integer, got sigma={sig}, N={}", self.n),
                vec![sig.to_f64().unwrap_or(f64::NAN), self.n as f64],
                0.0,
            ));
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        match self.violations().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidParams(v.message.clone())),
        }
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> Params<U> {
        let c = |x: T| U::lit(x.as_f64());
        Params {
            mu: c(self.mu),
            omega: c(self.omega),
            alpha: c(self.alpha),
            hbar: c(self.hbar),
            s: c(self.s),
            m: c(self.m),
            sigma: self.sigma,
            n: self.n,
        }
    }
}

/// Parses `"k/N"`, `"k"` or a decimal such as `"0.5"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let num: i64 = a.trim().parse().map_err(|_| Error::Input(format!("bad rational {t:?}")))?;
        let den: i64 = b.trim().parse().map_err(|_| Error::Input(format!("bad rational {t:?}")))?;
        if den == 0 {
            return Err(Error::Input(format!("zero denominator in {t:?}")));
        }
        return Ok(Rational64::new(num, den));
    }
    if let Ok(k) = t.parse::<i64>() {
        return Ok(Rational64::from_integer(k));
    }
    let x: f64 = t.parse().map_err(|_| Error::Input(format!("bad rational {t:?}")))?;
    rational_from_f64(x).ok_or_else(|| Error::Input(format!("cannot represent {t:?} as k/N")))
}

/// Nearest rational with denominator at most 10^6.
pub fn rational_from_f64(x: f64) -> Option<Rational64> {
    if !x.is_finite() {
        return None;
    }
    let r = Rational64::approximate_float(x)?;
    // Snap to small denominators so that 0.3333333333 reads as 1/3.
    for den in 1..=1000i64 {
        let num = (x * den as f64).round();
        if (num / den as f64 - x).abs() < 1e-9 {
            return Some(Rational64::new(num as i64, den));
        }
    }
    Some(r)
}

mod sigma_serde {
    use super::{parse_rational, rational_from_f64};
    use num_rational::Rational64;
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        if r.is_integer() {
            s.serialize_str(&r.numer().to_string())
        } else {
            s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rational64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string \"k/N\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational64, E> {
                rational_from_f64(v).ok_or_else(|| E::custom("sigma not representable"))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational64, E> {
                Ok(Rational64::from_integer(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational64, E> {
                Ok(Rational64::from_integer(v as i64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational64, E> {
                parse_rational(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// Signature of the flat space `C²`: Euclidean reduces to the sphere,
/// split (η = diag(1,−1)) to the pseudosphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    #[serde(alias = "sphere")]
    Euclidean,
    #[serde(alias = "pseudosphere")]
    Split,
}

impl Signature {
    /// Second diagonal entry of η (the first is always +1).
    pub fn eta1<T: Real>(self) -> T {
        match self {
            Signature::Euclidean => T::one(),
            Signature::Split => -T::one(),
        }
    }

    /// Diagonal of the metric `g_ab` on generator 3-vectors.
    pub fn metric3<T: Real>(self) -> [T; 3] {
        match self {
            Signature::Euclidean => [T::one(), T::one(), T::one()],
            Signature::Split => [T::one(), -T::one(), -T::one()],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Signature::Euclidean => "sphere",
            Signature::Split => "pseudosphere",
        }
    }
}

/// Point of `T*C²` with brackets `{π^α, ω_β} = δ^α_β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FlatC2State<T> {
    pub pi0: Complex<T>,
    pub pi1: Complex<T>,
    pub om0: Complex<T>,
    pub om1: Complex<T>,
    pub signature: Signature,
}

impl<T: Real> FlatC2State<T> {
    pub fn new(pi: [Complex<T>; 2], om: [Complex<T>; 2], signature: Signature) -> Self {
        FlatC2State { pi0: pi[0], pi1: pi[1], om0: om[0], om1: om[1], signature }
    }

    pub fn pi(&self) -> [Complex<T>; 2] {
        [self.pi0, self.pi1]
    }

    pub fn om(&self) -> [Complex<T>; 2] {
        [self.om0, self.om1]
    }

    pub fn coords(&self) -> [T; 8] {
        [self.pi0.re, self.pi0.im, self.pi1.re, self.pi1.im, self.om0.re, self.om0.im, self.om1.re, self.om1.im]
    }

    pub fn from_coords(x: &[T], signature: Signature) -> Self {
        FlatC2State {
            pi0: Complex::new(x[0], x[1]),
            pi1: Complex::new(x[2], x[3]),
            om0: Complex::new(x[4], x[5]),
            om1: Complex::new(x[6], x[7]),
            signature,
        }
    }
}

/// Tag of the phase space a point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    FlatC,
    FlatC2,
    R3Monopole,
    SphereChart0,
    SphereChart1,
    Pseudosphere,
}

/// A point of one of the phase spaces.
///
/// `FlatC` holds a complex position/momentum pair: `(z, π)` on the oscillator
/// side or `(w, p)` on the Coulomb side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub enum PhaseState<T> {
    FlatC { z: Complex<T>, pi: Complex<T> },
    FlatC2(FlatC2State<T>),
    R3Monopole { q: [T; 3], p: [T; 3] },
    Reduced { signature: Signature, chart: u8, p: Complex<T>, w: Complex<T> },
}

impl<T: Real> PhaseState<T> {
    pub fn flat(z: Complex<T>, pi: Complex<T>) -> Self {
        PhaseState::FlatC { z, pi }
    }

    pub fn space(&self) -> Space {
        match self {
            PhaseState::FlatC { .. } => Space::FlatC,
            PhaseState::FlatC2(_) => Space::FlatC2,
            PhaseState::R3Monopole { .. } => Space::R3Monopole,
            PhaseState::Reduced { signature: Signature::Split, .. } => Space::Pseudosphere,
            PhaseState::Reduced { chart: 0, .. } => Space::SphereChart0,
            PhaseState::Reduced { .. } => Space::SphereChart1,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PhaseState::FlatC { .. } | PhaseState::Reduced { .. } => 4,
            PhaseState::FlatC2(_) => 8,
            PhaseState::R3Monopole { .. } => 6,
        }
    }

    /// Real coordinate vector. Complex entries are split as (re, im);
    /// positions come before momenta.
    pub fn coords(&self) -> Vec<T> {
        match self {
            PhaseState::FlatC { z, pi } => vec![z.re, z.im, pi.re, pi.im],
            PhaseState::FlatC2(s) => s.coords().to_vec(),
            PhaseState::R3Monopole { q, p } => vec![q[0], q[1], q[2], p[0], p[1], p[2]],
            PhaseState::Reduced { p, w, .. } => vec![p.re, p.im, w.re, w.im],
        }
    }

    /// Same space and chart tag, new coordinates.
    pub fn with_coords(&self, x: &[T]) -> Self {
        match *self {
            PhaseState::FlatC { .. } => PhaseState::FlatC { z: Complex::new(x[0], x[1]), pi: Complex::new(x[2], x[3]) },
            PhaseState::FlatC2(s) => PhaseState::FlatC2(FlatC2State::from_coords(x, s.signature)),
            PhaseState::R3Monopole { .. } => PhaseState::R3Monopole { q: [x[0], x[1], x[2]], p: [x[3], x[4], x[5]] },
            PhaseState::Reduced { signature, chart, .. } => {
                PhaseState::Reduced { signature, chart, p: Complex::new(x[0], x[1]), w: Complex::new(x[2], x[3]) }
            }
        }
    }

    /// Names of the real coordinates, used as CSV columns.
    pub fn coord_names(&self) -> &'static [&'static str] {
        match self {
            PhaseState::FlatC { .. } => &["re", "im", "pre", "pim"],
            PhaseState::FlatC2(_) => &["pi0re", "pi0im", "pi1re", "pi1im", "om0re", "om0im", "om1re", "om1im"],
            PhaseState::R3Monopole { .. } => &["q1", "q2", "q3", "p1", "p2", "p3"],
            PhaseState::Reduced { .. } => &["pre", "pim", "wre", "wim"],
        }
    }

    pub fn cast<U: Real>(&self) -> PhaseState<U> {
        let c = |z: Complex<T>| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64()));
        let r = |x: T| U::lit(x.as_f64());
        match *self {
            PhaseState::FlatC { z, pi } => PhaseState::FlatC { z: c(z), pi: c(pi) },
            PhaseState::FlatC2(s) => PhaseState::FlatC2(FlatC2State {
                pi0: c(s.pi0),
                pi1: c(s.pi1),
                om0: c(s.om0),
                om1: c(s.om1),
                signature: s.signature,
            }),
            PhaseState::R3Monopole { q, p } => PhaseState::R3Monopole { q: q.map(r), p: p.map(r) },
            PhaseState::Reduced { signature, chart, p, w } => {
                PhaseState::Reduced { signature, chart, p: c(p), w: c(w) }
            }
        }
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
    pub coords: Vec<f64>,
    /// Signed distance to the admissible region (negative or zero = inside the violation).
    pub margin: f64,
}

impl Violation {
    fn new(code: &str, message: String, coords: Vec<f64>, margin: f64) -> Self {
        Violation { code: code.to_string(), message, coords, margin }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Domain(format!("{}: {}", v.code, v.message))),
        }
    }
}

/// Checks parameter and state invariants. Never fails; returns a report.
pub fn validate<T: Real>(state: &PhaseState<T>, params: &Params<T>) -> ValidationReport {
    let mut v = params.violations();
    let coords: Vec<f64> = state.coords().iter().map(|x| x.as_f64()).collect();
    match state {
        PhaseState::FlatC { z, .. } => {
            if z.norm() == T::zero() {
                v.push(Violation::new(
                    "origin-excluded",
                    "z = 0 is excluded from the transformation domain".into(),
                    coords,
                    0.0,
                ));
            }
        }
        PhaseState::FlatC2(s) => {
            if s.pi0.norm() == T::zero() && s.pi1.norm() == T::zero() {
                v.push(Violation::new("null-pi", "pi0 and pi1 both vanish".into(), coords, 0.0));
            }
        }
        PhaseState::R3Monopole { q, .. } => {
            let r = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
            if !(r > T::zero()) {
                v.push(Violation::new(
                    "origin-excluded",
                    "q = 0 is the singular point of the monopole twist".into(),
                    coords,
                    r.as_f64(),
                ));
            }
        }
        PhaseState::Reduced { signature, chart, p, .. } => {
            let m = params.m;
            if m == T::zero() {
                v.push(Violation::new("m-nonzero", "m must be nonzero".into(), coords.clone(), 0.0));
            }
            if *chart > 1 {
                v.push(Violation::new("chart", "chart must be 0 or 1".into(), coords.clone(), 0.0));
            }
            if *signature == Signature::Split {
                let r = p.norm();
                let margin = if m < T::zero() { T::one() - r } else { r - T::one() };
                if !(margin > T::zero()) {
                    let which = if m < T::zero() { "|p| < 1" } else { "|p| > 1" };
                    v.push(Violation::new(
                        "outside-disk",
                        format!("outside Poincaré disk domain: m = {m} requires {which}, |p| = {r}"),
                        coords,
                        margin.as_f64(),
                    ));
                }
            }
        }
    }
    ValidationReport { pass: v.is_empty(), violations: v }
}

/// `p⁺ = η₁ p̄`.
#[inline]
pub fn p_plus<T: Real>(p: Complex<T>, signature: Signature) -> Complex<T> {
    p.conj() * signature.eta1::<T>()
}

/// Conformal factor `q = 1 + p p⁺`.
#[inline]
pub fn conformal_q<T: Real>(p: Complex<T>, signature: Signature) -> T {
    T::one() + signature.eta1::<T>() * p.norm_sqr()
}

/// Kähler metric coefficient `g = m / (1 + p p⁺)²`.
pub fn metric_g<T: Real>(p: Complex<T>, signature: Signature, m: T) -> Result<T> {
    let q = conformal_q(p, signature);
    if q.abs() <= T::epsilon() * T::lit(16.0) || !q.is_finite() {
        return Err(Error::Domain(format!("metric singular at 1 + p p+ = {q} (|p| = {})", p.norm())));
    }
    Ok(m / (q * q))
}
