//! Declarative algebra specifications.
//!
//! ```json
//! {
//!   "name": "su2",
//!   "structure": "canonical-complex",
//!   "generators": ["J", "I+", "I-"],
//!   "bracket_factor": [0, -1],
//!   "relations": [
//!     { "lhs": ["I+", "I-"], "rhs": [{ "coeff": [2, 0], "scale": ["omega", "omega"], "gens": ["J"] }] }
//!   ]
//! }
//! ```
//!
//! Structures: `canonical-complex`, `c2-euclidean`, `c2-split`, `r3-twisted`,
//! `reduced-sphere`, `reduced-pseudosphere`. Coefficients are `[re, im]` pairs,
//! optionally multiplied by the named parameters in `scale`.

use super::generators::*;
use super::{AlgebraSpec, BracketStructure, Observable, Relation, StructureKind, Term};
use crate::error::{Error, Result};
use crate::model::{Params, Signature};
use crate::scalar::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpecFile {
    pub name: String,
    pub structure: String,
    #[serde(default)]
    pub chart: u8,
    pub generators: Vec<String>,
    #[serde(default = "unit")]
    pub bracket_factor: [f64; 2],
    pub relations: Vec<RelationFile>,
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationFile {
    pub lhs: [String; 2],
    #[serde(default)]
    pub rhs: Vec<TermFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub coeff: [f64; 2],
    #[serde(default)]
    pub scale: Vec<String>,
    #[serde(default)]
    pub gens: Vec<String>,
}

fn param<T: Real>(p: &Params<T>, name: &str) -> Result<T> {
    Ok(match name {
        "mu" => p.mu,
        "omega" => p.omega,
        "alpha" => p.alpha,
        "hbar" => p.hbar,
        "s" => p.s,
        "m" => p.m,
        "sigma" => p.sigma_real(),
        _ => return Err(Error::Input(format!("unknown parameter {name:?} in scale"))),
    })
}

fn resolve<T: Real>(kind: StructureKind, chart: u8, p: &Params<T>, name: &str) -> Result<Observable<T>> {
    let unknown = || Error::Input(format!("unknown generator {name:?} for structure {kind:?}"));
    let index = |prefix: &str| -> Option<usize> {
        name.strip_prefix(prefix).and_then(|d| d.parse::<usize>().ok()).filter(|k| (1..=3).contains(k)).map(|k| k - 1)
    };
    let o = match kind {
        StructureKind::CanonicalComplex => match name {
            "z" | "w" => Observable::complex_coordinate(name, 0, 1, 4),
            "pi" | "p" => Observable::complex_coordinate(name, 2, 3, 4),
            "zbar" | "wbar" => Observable::complex_coordinate(name, 0, 1, 4).conj(),
            "pibar" | "pbar" => Observable::complex_coordinate(name, 2, 3, 4).conj(),
            "H_osc" => osc_hamiltonian(p.omega),
            "J" => osc_rotation(),
            "I+" => osc_i_plus(p.omega),
            "I-" => osc_i_minus(p.omega),
            "I+raw" => osc_i_plus_raw(p.omega),
            "I-raw" => osc_i_minus_raw(p.omega),
            "H_C" => coulomb_hamiltonian(p.mu, p.alpha),
            "H_vortex" => vortex_hamiltonian(p),
            "Jt" => coulomb_rotation(),
            "It" => runge_lenz(p.mu, p.alpha),
            _ => return Err(unknown()),
        },
        StructureKind::R3Twisted => {
            if name == "H" {
                dyon_hamiltonian(p)
            } else if let Some(a) = index("J") {
                dyon_rotation(a, p.s)
            } else if let Some(a) = index("q") {
                Observable::coordinate(name, a, 6)
            } else if let Some(a) = index("p") {
                Observable::coordinate(name, 3 + a, 6)
            } else {
                return Err(unknown());
            }
        }
        StructureKind::ReducedChart(sig) => {
            if name == "H" {
                reduced_hamiltonian(sig)
            } else if name == "p" {
                Observable::complex_coordinate(name, 0, 1, 4)
            } else if name == "w" {
                Observable::complex_coordinate(name, 2, 3, 4)
            } else if name == "wbar" {
                Observable::complex_coordinate(name, 2, 3, 4).conj().renamed("wbar")
            } else if let Some(a) = index("P") {
                reduced_p(a, sig, chart, p.m)
            } else if let Some(a) = index("J") {
                reduced_j(a, sig, chart, p.m, p.s)
            } else {
                return Err(unknown());
            }
        }
        StructureKind::CanonicalC2(sig) => {
            if name == "P" {
                c2_p(sig)
            } else if name == "J" {
                c2_j(sig)
            } else if let Some(a) = index("P") {
                c2_p_vec(a, sig)
            } else if let Some(a) = index("J") {
                c2_j_vec(a, sig)
            } else {
                return Err(unknown());
            }
        }
    };
    Ok(o.renamed(name))
}

/// Parses a JSON algebra specification and resolves its generators.
pub fn load_algebra_spec<T: Real>(json: &str, params: &Params<T>) -> Result<(BracketStructure<T>, AlgebraSpec<T>)> {
    let file: AlgebraSpecFile = serde_json::from_str(json).map_err(|e| Error::Input(format!("algebra spec: {e}")))?;
    let kind = match file.structure.as_str() {
        "canonical-complex" => StructureKind::CanonicalComplex,
        "c2-euclidean" => StructureKind::CanonicalC2(Signature::Euclidean),
        "c2-split" => StructureKind::CanonicalC2(Signature::Split),
        "r3-twisted" => StructureKind::R3Twisted,
        "reduced-sphere" => StructureKind::ReducedChart(Signature::Euclidean),
        "reduced-pseudosphere" => StructureKind::ReducedChart(Signature::Split),
        other => return Err(Error::Input(format!("unknown structure {other:?}"))),
    };
    let generators =
        file.generators.iter().map(|g| resolve(kind, file.chart, params, g)).collect::<Result<Vec<_>>>()?;
    let mut spec = AlgebraSpec::new(file.name.clone(), generators);
    spec.bracket_factor = Complex::new(T::lit(file.bracket_factor[0]), T::lit(file.bracket_factor[1]));
    let idx = |spec: &AlgebraSpec<T>, n: &str| {
        spec.index_of(n).ok_or_else(|| Error::Input(format!("relation references undeclared generator {n:?}")))
    };
    for r in &file.relations {
        let lhs = (idx(&spec, &r.lhs[0])?, idx(&spec, &r.lhs[1])?);
        let mut rhs = Vec::new();
        for t in &r.rhs {
            let mut coeff = Complex::new(T::lit(t.coeff[0]), T::lit(t.coeff[1]));
            for s in &t.scale {
                coeff = coeff * param(params, s)?;
            }
            let factors = t.gens.iter().map(|g| idx(&spec, g)).collect::<Result<Vec<_>>>()?;
            rhs.push(Term { coeff, factors });
        }
        spec.relations.push(Relation { name: format!("{{{},{}}}", r.lhs[0], r.lhs[1]), lhs, rhs });
    }
    spec.check()?;
    Ok((BracketStructure::new(kind, params.clone()), spec))
}
