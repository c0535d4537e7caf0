use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "anyon", version, about = "Oscillator, Coulomb, monopole and anyon toolkit")]
pub struct Cli {
    /// JSON object whose keys fill options not given as flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the version and the verb to module map
    #[arg(long)]
    pub about: bool,
    #[command(subcommand)]
    pub verb: Option<Verb>,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Integrate a Hamiltonian flow
    Orbit(OrbitArgs),
    /// Map a trajectory through the Bohlin or Z_N map
    Transform(TransformArgs),
    /// Winding number of a closed trajectory
    Winding(WindingArgs),
    /// Audit the bracket relations of an algebra at sampled points
    BracketCheck(BracketArgs),
    /// Casimir, top, bracket and gauge checks on a reduced space
    Reduce(ReduceArgs),
    /// Vortex spectrum, optionally against the radial oracle
    Spectrum(SpectrumArgs),
}

/// Physical parameters; unset ones keep their defaults.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ParamArgs {
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Monopole charge / spin
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Level value of P
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Vortex parameter as k/N or decimal
    #[arg(long)]
    pub sigma: Option<String>,
    /// Order N of the Z_N map
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    Svg,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Split,
    Midpoint,
    Lifted,
    Kepler,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct OrbitArgs {
    /// oscillator2d, coulomb2d, vortex2d, dyon3d, sphere, pseudosphere
    #[arg(long)]
    pub system: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Planar start position re,im
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<String>,
    /// Planar start momentum re,im
    #[arg(long, allow_hyphen_values = true)]
    pub pi0: Option<String>,
    /// Start position x,y,z in 3-space
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<String>,
    /// Start momentum x,y,z in 3-space
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<String>,
    /// Reduced chart coordinate p as re,im
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Reduced momentum w as re,im
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    #[arg(long)]
    pub chart: Option<u8>,
    /// Start on the circular orbit of this radius (coulomb2d, dyon3d)
    #[arg(long)]
    pub circular: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapArg {
    Bohlin,
    Zn,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub map: Option<MapArg>,
    /// Order of the Z_N map
    #[arg(long)]
    pub order: Option<u32>,
    /// Apply the inverse map (continuous root branch)
    #[arg(long)]
    pub inverse: bool,
    /// Root branch of the first sample of an inverse map
    #[arg(long)]
    pub branch: Option<u32>,
    /// Trajectory CSV to map
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Map one round of the Zhukovski ellipse z = u + 1/u with |u| = RHO instead of a file
    #[arg(long)]
    pub zhukovski: Option<f64>,
    /// Samples of the Zhukovski round
    #[arg(long)]
    pub samples: Option<usize>,
    /// Replace the time by the Levi-Civita time of the image
    #[arg(long)]
    pub reparametrize: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct WindingArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// re,im
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    /// Largest accepted distance between the first and last sample; the gap
    /// is closed by a chord
    #[arg(long)]
    pub closure_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BracketArgs {
    /// su2, su2-raw, oscillator, coulomb, so3, dyon, e3, iso12, e3-flat, iso12-flat, moment, moment-split
    #[arg(long)]
    pub algebra: Option<String>,
    /// Algebra specification JSON (instead of --algebra)
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chart: Option<u8>,
    /// Pass threshold on the absolute residual
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceArg {
    Euclidean,
    Split,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeArg {
    Plus,
    Minus,
    Mean,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReduceArgs {
    #[arg(long, value_enum)]
    pub space: Option<SpaceArg>,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chart: Option<u8>,
    #[arg(long, value_enum)]
    pub gauge: Option<GaugeArg>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    /// Largest radial number
    #[arg(long)]
    pub nr_max: Option<u32>,
    /// Largest j in m_sigma = ±(j + sigma)
    #[arg(long)]
    pub m_max: Option<u32>,
    /// Keep only levels with N_r + |m_sigma| at most this
    #[arg(long)]
    pub shell_max: Option<f64>,
    /// Also solve the radial problem numerically
    #[arg(long)]
    pub oracle: bool,
    /// Use the prefactor exactly as displayed (C = 1) instead of C = 1/2
    #[arg(long)]
    pub as_printed: bool,
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
