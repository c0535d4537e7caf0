//! Command-line front end: argument parsing, config merging, verbs and the
//! exit-code contract (0 success, 2 invalid input, 3 numerical failure).

mod args;
mod commands;
pub mod svg;

pub use args::{Cli, Verb};

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use std::ffi::OsString;
use std::io::Write;

/// Failure of one invocation, mapped onto the exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("validation", m),
            CliError::Numerical(m) => ("numerical", m),
        };
        serde_json::json!({ "error": kind, "message": msg, "exit_code": self.exit_code() })
    }
}

impl From<anyon_core::Error> for CliError {
    fn from(e: anyon_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv`, runs the verb and writes artifacts; returns the exit code.
/// Errors go to stderr as one JSON object.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run_with(argv, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

/// [`run`] with an explicit sink for stdout artifacts.
pub fn run_with<I, A, W>(argv: I, out: &mut W) -> CliResult<()>
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
    W: Write,
{
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(out, "{e}")?;
                return Ok(());
            }
            return Err(CliError::Usage(e.kind().to_string() + ": " + e.render().to_string().trim()));
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;
    if cli.about {
        out.write_all(about().as_bytes())?;
        return Ok(());
    }
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => Map::new(),
    };
    let Some(verb) = cli.verb else {
        return Err(CliError::Usage("no verb given (see --help)".into()));
    };
    let (_, sub) = matches.subcommand().expect("verb present");
    commands::dispatch(verb, sub, &config, out)
}

fn load_config(path: &std::path::Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)?;
    let Value::Object(mut obj) = v else {
        return Err(CliError::Usage("config must be a JSON object".into()));
    };
    // a nested Params record fills the individual parameter keys
    if let Some(Value::Object(params)) = obj.remove("params") {
        for (k, v) in params {
            obj.entry(k).or_insert(v);
        }
    }
    Ok(obj)
}

/// Fills every option not given on the command line from `config`.
pub(crate) fn merge<A: Serialize + DeserializeOwned>(
    args: &A,
    m: &ArgMatches,
    config: &Map<String, Value>,
) -> CliResult<A> {
    let mut v = serde_json::to_value(args)?;
    let obj = v.as_object_mut().expect("argument structs serialize to objects");
    for (k, val) in config {
        let key = k.replace('-', "_");
        if !obj.contains_key(&key) {
            return Err(CliError::Usage(format!("config key {k:?} does not apply to this verb")));
        }
        if m.value_source(&key) == Some(ValueSource::CommandLine) {
            continue;
        }
        obj.insert(key, normalize(val));
    }
    serde_json::from_value(v).map_err(|e| CliError::Usage(format!("config: {e}")))
}

/// `[re, im]` and `[x, y, z]` arrays become the comma strings the flags use.
fn normalize(v: &Value) -> Value {
    match v {
        Value::Array(items) if items.iter().all(Value::is_number) => {
            Value::String(items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        }
        other => other.clone(),
    }
}

fn about() -> String {
    format!(
        "anyon {}\n\
         verbs and the library modules behind them:\n\
         \x20 orbit          dynamics (flows, drift reports), poisson (Hamiltonians)\n\
         \x20 transform      transforms (Bohlin and Z_N maps, Levi-Civita time)\n\
         \x20 winding        transforms (winding numbers)\n\
         \x20 bracket-check  poisson (algebra audits)\n\
         \x20 reduce         reduction (moment map, Casimirs, gauge potentials, spin)\n\
         \x20 spectrum       spectra (vortex levels, radial oracle)\n",
        env!("CARGO_PKG_VERSION")
    )
}
