use crate::args::*;
use crate::svg::{emit_svg, Panel};
use crate::{merge, CliError, CliResult};
use anyon_core::dynamics::{self, HamiltonianSystem, IntegratorConfig, Method, SystemKind};
use anyon_core::model::parse_rational;
use anyon_core::poisson::{self, AlgebraSpec, BracketStructure, StructureKind};
use anyon_core::reduction::{self, GaugeChoice};
use anyon_core::spectra::{self, Prefactor, RadialGrid};
use anyon_core::transforms::{self, CanonicalMap, Direction};
use anyon_core::{Complex64, Params64, PhaseState, Rational64, Signature, Trajectory64};
use clap::ArgMatches;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

pub(crate) fn dispatch<W: Write>(
    verb: Verb,
    m: &ArgMatches,
    config: &Map<String, Value>,
    out: &mut W,
) -> CliResult<()> {
    match verb {
        Verb::Orbit(a) => orbit(merge(&a, m, config)?, out),
        Verb::Transform(a) => transform(merge(&a, m, config)?, out),
        Verb::Winding(a) => winding(merge(&a, m, config)?, out),
        Verb::BracketCheck(a) => bracket_check(merge(&a, m, config)?, out),
        Verb::Reduce(a) => reduce(merge(&a, m, config)?, out),
        Verb::Spectrum(a) => spectrum(merge(&a, m, config)?, out),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn params(a: &ParamArgs) -> CliResult<Params64> {
    let mut p = Params64::default();
    if let Some(v) = a.mu {
        p.mu = v;
    }
    if let Some(v) = a.omega {
        p.omega = v;
    }
    if let Some(v) = a.alpha {
        p.alpha = v;
    }
    if let Some(v) = a.hbar {
        p.hbar = v;
    }
    if let Some(v) = a.s {
        p.s = v;
    }
    if let Some(v) = a.m {
        p.m = v;
    }
    if let Some(v) = &a.sigma {
        p.sigma = parse_rational(v)?;
    }
    if let Some(v) = a.n {
        p.n = v;
    }
    p.check()?;
    Ok(p)
}

/// Writes the resolved parameters back so the audit trail is complete.
fn resolved_params(p: &Params64) -> ParamArgs {
    ParamArgs {
        mu: Some(p.mu),
        omega: Some(p.omega),
        alpha: Some(p.alpha),
        hbar: Some(p.hbar),
        s: Some(p.s),
        m: Some(p.m),
        sigma: Some(spectra::fmt_rational(&p.sigma)),
        n: Some(p.n),
    }
}

fn numbers(text: &str, n: usize, what: &str) -> CliResult<Vec<f64>> {
    let v = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| usage(format!("{what}: expected {n} comma-separated numbers, got {text:?}")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(usage(format!("{what}: expected {n} finite comma-separated numbers, got {text:?}")));
    }
    Ok(v)
}

fn complex(text: &str, what: &str) -> CliResult<Complex64> {
    let v = numbers(text, 2, what)?;
    Ok(Complex64::new(v[0], v[1]))
}

fn vec3(text: &str, what: &str) -> CliResult<[f64; 3]> {
    let v = numbers(text, 3, what)?;
    Ok([v[0], v[1], v[2]])
}

fn emit<W: Write>(out: &mut W, path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => Ok(out.write_all(bytes)?),
    }
}

fn emit_json<W: Write>(out: &mut W, path: Option<&Path>, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit(out, path, text.as_bytes())
}

fn read_trajectory(path: &Path, system: &str, p: &Params64) -> CliResult<Trajectory64> {
    let f = std::fs::File::open(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(Trajectory64::read_csv(std::io::BufReader::new(f), system, p.clone())?)
}

fn points(t: &Trajectory64) -> Vec<[f64; 2]> {
    t.positions().iter().map(|z| [z.re, z.im]).collect()
}

fn svg(panels: &[Panel]) -> CliResult<String> {
    emit_svg(panels).map_err(|e| usage(e.0))
}

// --- orbit -------------------------------------------------------------------

fn method_of(m: MethodArg) -> Method {
    match m {
        MethodArg::Split => Method::SplitSymplectic,
        MethodArg::Midpoint => Method::ImplicitMidpoint,
        MethodArg::Lifted => Method::LiftedMidpoint,
        MethodArg::Kepler => Method::KeplerRegularized,
    }
}

fn method_arg(m: Method) -> MethodArg {
    match m {
        Method::SplitSymplectic => MethodArg::Split,
        Method::ImplicitMidpoint => MethodArg::Midpoint,
        Method::LiftedMidpoint => MethodArg::Lifted,
        Method::KeplerRegularized => MethodArg::Kepler,
    }
}

fn start_state(a: &OrbitArgs, kind: SystemKind, p: &Params64) -> CliResult<PhaseState<f64>> {
    if let Some(r0) = a.circular {
        return match kind {
            SystemKind::Coulomb2D => Ok(dynamics::circular_coulomb(p, r0).0),
            SystemKind::Dyon3D => Ok(dynamics::circular_dyon(p, r0)?.0),
            _ => Err(usage("--circular applies to coulomb2d and dyon3d")),
        };
    }
    let need =
        |v: &Option<String>, flag: &str| v.clone().ok_or_else(|| usage(format!("{} needs --{flag}", kind.name())));
    match kind {
        SystemKind::Oscillator2D | SystemKind::Coulomb2D | SystemKind::Vortex2D => {
            Ok(PhaseState::flat(complex(&need(&a.z0, "z0")?, "z0")?, complex(&need(&a.pi0, "pi0")?, "pi0")?))
        }
        SystemKind::Dyon3D => {
            Ok(PhaseState::R3Monopole { q: vec3(&need(&a.q0, "q0")?, "q0")?, p: vec3(&need(&a.p0, "p0")?, "p0")? })
        }
        SystemKind::SphereMonopole | SystemKind::PseudosphereMonopole => {
            let signature = if kind == SystemKind::SphereMonopole { Signature::Euclidean } else { Signature::Split };
            let chart = a.chart.unwrap_or(0);
            if chart > 1 || (signature == Signature::Split && chart != 0) {
                return Err(usage("chart must be 0 or 1 (0 on the pseudosphere)"));
            }
            Ok(PhaseState::Reduced {
                signature,
                chart,
                p: complex(&need(&a.p, "p")?, "p")?,
                w: complex(&need(&a.w, "w")?, "w")?,
            })
        }
    }
}

fn orbit<W: Write>(mut a: OrbitArgs, out: &mut W) -> CliResult<()> {
    let kind = SystemKind::parse(a.system.as_deref().ok_or_else(|| usage("orbit needs --system"))?)?;
    let p = params(&a.params)?;
    let system = HamiltonianSystem::new(kind, &p)?;
    let start = start_state(&a, kind, &p)?;
    let method = a.method.map(method_of).unwrap_or_else(|| dynamics::default_method(kind));
    let dt = a.dt.ok_or_else(|| usage("orbit needs --dt"))?;
    let t_end = a.t_end.ok_or_else(|| usage("orbit needs --t-end"))?;
    let cfg = IntegratorConfig::new(method, dt, t_end);
    let traj = dynamics::flow(&system, &start, &cfg)?;
    let format = a.format.unwrap_or(Format::Csv);
    a.system = Some(kind.name().into());
    a.params = resolved_params(&p);
    a.method = Some(method_arg(method));
    a.format = Some(format);
    let path = a.output.clone();
    match format {
        Format::Csv => emit(out, path.as_deref(), traj.to_csv_string()?.as_bytes()),
        Format::Svg => emit(out, path.as_deref(), svg(&[Panel::new(kind.name(), points(&traj))])?.as_bytes()),
        Format::Json => {
            let drift = dynamics::system_drift(&system, &traj)?;
            let period = dynamics::period_estimate(&traj).ok();
            let (t_last, last) = traj.samples.last().expect("flow keeps the start sample");
            let v = json!({
                "config": a,
                "samples": traj.len(),
                "t_final": t_last,
                "final_state": last.coords(),
                "closure_gap": distance(&start.coords(), &last.coords()),
                "period": period,
                "drift": drift,
            });
            emit_json(out, path.as_deref(), &v)
        }
        Format::Text => Err(usage("orbit writes csv, json or svg")),
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

// --- transform ---------------------------------------------------------------

fn transform<W: Write>(mut a: TransformArgs, out: &mut W) -> CliResult<()> {
    let p = params(&a.params)?;
    let kind = a.map.unwrap_or(MapArg::Bohlin);
    let dir = if a.inverse { Direction::Inverse } else { Direction::Forward };
    let mut map = match kind {
        MapArg::Bohlin => {
            if a.order.is_some_and(|n| n != 2) {
                return Err(usage("the Bohlin map has order 2"));
            }
            CanonicalMap::bohlin(dir)
        }
        MapArg::Zn => CanonicalMap::zn(a.order.ok_or_else(|| usage("--map zn needs --order"))?, dir),
    };
    if let Some(b) = a.branch {
        map = map.with_branch(b);
    }
    let input = match (&a.input, a.zhukovski) {
        (Some(path), None) => read_trajectory(path, "input", &p)?,
        (None, Some(rho)) => {
            let mut t = transforms::zhukovski_ellipse(rho, a.samples.unwrap_or(720))?;
            t.params = p.clone();
            t
        }
        _ => return Err(usage("transform needs exactly one of --input and --zhukovski")),
    };
    let image = transforms::map_trajectory(&map, &input, a.reparametrize)?;
    let format = a.format.unwrap_or(Format::Csv);
    a.map = Some(kind);
    a.order = Some(map.order());
    a.branch = Some(map.branch);
    if a.zhukovski.is_some() {
        a.samples = Some(input.len() - 1);
    }
    a.params = resolved_params(&p);
    a.format = Some(format);
    let path = a.output.clone();
    match format {
        Format::Csv => emit(out, path.as_deref(), image.to_csv_string()?.as_bytes()),
        Format::Svg => {
            let panels = [Panel::new("preimage", points(&input)), Panel::new("image", points(&image))];
            emit(out, path.as_deref(), svg(&panels)?.as_bytes())
        }
        Format::Json => {
            let origin = Complex64::new(0.0, 0.0);
            let v = json!({
                "config": a,
                "samples": image.len(),
                "winding_preimage": transforms::winding_number(&input, origin).ok(),
                "winding_image": transforms::winding_number(&image, origin).ok(),
                "t_final": image.samples.last().map(|s| s.0),
            });
            emit_json(out, path.as_deref(), &v)
        }
        Format::Text => Err(usage("transform writes csv, json or svg")),
    }
}

// --- winding -----------------------------------------------------------------

/// Default end gap for files: an orbit run for a rounded period (such as
/// `--t-end 6.2832`) misses closure by about the rounding.
const CLOSURE_TOL: f64 = 1e-4;

fn winding<W: Write>(mut a: WindingArgs, out: &mut W) -> CliResult<()> {
    let path = a.input.clone().ok_or_else(|| usage("winding needs --input"))?;
    let center = complex(a.center.as_deref().unwrap_or("0,0"), "center")?;
    let traj = read_trajectory(&path, "input", &Params64::default())?;
    let tol = a.closure_tol.unwrap_or(CLOSURE_TOL);
    if tol.is_nan() || tol < 0.0 {
        return Err(usage("closure-tol must be non-negative"));
    }
    let k = transforms::winding_with_gap(&traj.positions(), center, tol)?;
    let format = a.format.unwrap_or(Format::Text);
    a.closure_tol = Some(tol);
    a.center = Some(format!("{},{}", center.re, center.im));
    a.format = Some(format);
    let dest = a.output.clone();
    match format {
        Format::Text => emit(out, dest.as_deref(), format!("{k}\n").as_bytes()),
        Format::Json => emit_json(out, dest.as_deref(), &json!({ "config": a, "winding": k })),
        _ => Err(usage("winding writes text or json")),
    }
}

// --- bracket-check -----------------------------------------------------------

/// Structure, relations and the default pass threshold (analytic gradients
/// reach round-off, finite differences stop near h²).
fn named_algebra(name: &str, chart: u8, p: &Params64) -> CliResult<(BracketStructure<f64>, AlgebraSpec<f64>, f64)> {
    let flat = |sig| BracketStructure::new(StructureKind::CanonicalC2(sig), p.clone());
    let canonical = BracketStructure::canonical_complex(p.clone());
    Ok(match name {
        "su2" => (canonical, poisson::su2_spec(p.omega), 1e-8),
        "su2-raw" => (canonical, poisson::su2_raw_spec(p.omega), 1e-8),
        "oscillator" => (canonical, poisson::oscillator_conservation_spec(p.omega), 1e-8),
        "coulomb" => (canonical, poisson::coulomb_conservation_spec(p.mu, p.alpha), 1e-8),
        "so3" => (BracketStructure::r3_twisted(p.clone()), poisson::so3_monopole_spec(p.s), 1e-8),
        "dyon" => (BracketStructure::r3_twisted(p.clone()), poisson::dyon_conservation_spec(p), 1e-8),
        "e3" => (
            BracketStructure::reduced(Signature::Euclidean, p.clone()),
            poisson::reduced_poincare_spec(Signature::Euclidean, chart, p),
            1e-7,
        ),
        "iso12" => (
            BracketStructure::reduced(Signature::Split, p.clone()),
            poisson::reduced_poincare_spec(Signature::Split, chart, p),
            1e-7,
        ),
        "e3-flat" => (flat(Signature::Euclidean), poisson::c2_poincare_spec(Signature::Euclidean), 1e-7),
        "iso12-flat" => (flat(Signature::Split), poisson::c2_poincare_spec(Signature::Split), 1e-7),
        "moment" => (flat(Signature::Euclidean), poisson::c2_moment_spec(Signature::Euclidean), 1e-7),
        "moment-split" => (flat(Signature::Split), poisson::c2_moment_spec(Signature::Split), 1e-7),
        other => return Err(usage(format!("unknown algebra {other:?}"))),
    })
}

fn bracket_check<W: Write>(mut a: BracketArgs, out: &mut W) -> CliResult<()> {
    let p = params(&a.params)?;
    let chart = a.chart.unwrap_or(0);
    let (structure, spec, tol) = match (&a.algebra, &a.spec) {
        (Some(name), None) => named_algebra(name, chart, &p)?,
        (None, Some(path)) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let (st, spec) = poisson::load_algebra_spec(&text, &p)?;
            (st, spec, 1e-7)
        }
        _ => return Err(usage("bracket-check needs exactly one of --algebra and --spec")),
    };
    if chart > 1 {
        return Err(usage("chart must be 0 or 1"));
    }
    let points = a.points.unwrap_or(100);
    let seed = a.seed.unwrap_or(0);
    let tol = a.tolerance.unwrap_or(tol);
    let report = poisson::audit_algebra(&structure, &spec, points, seed)?;
    a.points = Some(points);
    a.seed = Some(seed);
    a.chart = Some(chart);
    a.tolerance = Some(tol);
    a.params = resolved_params(&p);
    let v = json!({
        "config": a,
        "max_abs": report.max_abs(),
        "max_rel": report.max_rel(),
        "pass": report.passes(tol),
        "report": report,
    });
    let dest = a.output.clone();
    emit_json(out, dest.as_deref(), &v)
}

// --- reduce ------------------------------------------------------------------

fn reduce<W: Write>(mut a: ReduceArgs, out: &mut W) -> CliResult<()> {
    let signature = match a.space.unwrap_or(SpaceArg::Euclidean) {
        SpaceArg::Euclidean => Signature::Euclidean,
        SpaceArg::Split => Signature::Split,
    };
    let p = params(&a.params)?;
    if p.m == 0.0 {
        return Err(usage("reduce needs m != 0"));
    }
    let chart = a.chart.unwrap_or(0);
    if chart > 1 || (signature == Signature::Split && chart != 0) {
        return Err(usage("chart must be 0 or 1 (0 on the pseudosphere)"));
    }
    let samples = a.samples.unwrap_or(200);
    let seed = a.seed.unwrap_or(0);
    let gauge = match a.gauge.unwrap_or(GaugeArg::Plus) {
        GaugeArg::Plus => GaugeChoice::Plus,
        GaugeArg::Minus => GaugeChoice::Minus,
        GaugeArg::Mean => GaugeChoice::Mean,
    };
    if samples == 0 {
        return Err(usage("samples must be at least 1"));
    }

    let structure = BracketStructure::reduced(signature, p.clone());
    let h = poisson::reduced_hamiltonian::<f64>(signature);
    let (mut pp, mut pj, mut top) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..samples {
        let x = structure.sample_point(seed, k)?;
        let (pc, wc) = (Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]));
        let g = reduction::reduced_generators(pc, wc, chart, signature, &p)?;
        let (c1, c2) = g.casimirs(signature);
        let rel = |v: f64, exact: f64| (v - exact).abs() / exact.abs().max(1.0);
        pp = pp.max(rel(c1, p.m * p.m));
        pj = pj.max(rel(c2, p.m * p.s));
        let hv = h.eval(&x).re;
        top = top.max(rel(g.top(signature), hv));
    }
    let audit =
        poisson::audit_algebra(&structure, &poisson::reduced_poincare_spec(signature, chart, &p), samples, seed)?;
    // A₊ − A_gauge around a loop about p = 0, in units of 2π · flux unit
    let radius = if signature == Signature::Split { 0.5 } else { 1.0 };
    let origin = Complex64::new(0.0, 0.0);
    let loop_units = if gauge == GaugeChoice::Plus {
        0.0
    } else {
        reduction::circle_loop_integral(GaugeChoice::Plus, gauge, origin, radius, 512, signature, p.m)?
            / (std::f64::consts::TAU * reduction::flux_unit(p.m))
    };
    let flux = if signature == Signature::Euclidean {
        let total = reduction::monopole_flux(p.s, p.m, 200, 200)?;
        Some(json!({ "monopole_flux": total, "expected": 4.0 * std::f64::consts::PI * p.s }))
    } else {
        None
    };
    let adm = reduction::spin_quantization_check(p.s, signature, gauge);
    a.space = Some(if signature == Signature::Euclidean { SpaceArg::Euclidean } else { SpaceArg::Split });
    a.samples = Some(samples);
    a.seed = Some(seed);
    a.chart = Some(chart);
    a.gauge = Some(match gauge {
        GaugeChoice::Plus => GaugeArg::Plus,
        GaugeChoice::Minus => GaugeArg::Minus,
        GaugeChoice::Mean => GaugeArg::Mean,
    });
    a.params = resolved_params(&p);
    let v = json!({
        "config": a,
        "space": signature.name(),
        "casimir_pp_max_rel": pp,
        "casimir_pj_max_rel": pj,
        "top_max_rel": top,
        "generator_audit": audit,
        "gauge_loop_flux_units": loop_units,
        "flux": flux,
        "spin": adm,
    });
    let dest = a.output.clone();
    emit_json(out, dest.as_deref(), &v)
}

// --- spectrum ----------------------------------------------------------------

fn spectrum<W: Write>(mut a: SpectrumArgs, out: &mut W) -> CliResult<()> {
    let p = params(&a.params)?;
    let nr_max = a.nr_max.unwrap_or(3);
    let m_max = a.m_max.unwrap_or(3);
    let prefactor = if a.as_printed { Prefactor::AsPrinted } else { Prefactor::Derived };
    let mut lines = spectra::vortex_levels(p.sigma, nr_max, m_max, &p, prefactor)?;
    if let Some(cap) = a.shell_max {
        let cap = parse_rational(&cap.to_string())?;
        lines.retain(|l| l.shell() <= cap);
    }
    let oracle = if a.oracle {
        let grid = RadialGrid::for_levels(nr_max as usize + 1, &p);
        Some(spectra::oracle_table(p.sigma, nr_max, m_max, &grid, &p)?)
    } else {
        None
    };
    let lookup = |nr: u32, m: Rational64| -> Option<f64> {
        let key = if m < Rational64::from_integer(0) { -m } else { m };
        oracle.as_ref()?.get(&key)?.energies.get(nr as usize).copied()
    };
    let json_out = a.json;
    a.nr_max = Some(nr_max);
    a.m_max = Some(m_max);
    a.csv = !json_out;
    a.params = resolved_params(&p);
    let dest = a.output.clone();
    if json_out {
        let rows: Vec<Value> = lines
            .iter()
            .map(|l| {
                let e = lookup(l.nr, l.m_sigma);
                json!({
                    "Nr": l.nr,
                    "m_sigma": spectra::fmt_rational(&l.m_sigma),
                    "E_formula": l.energy,
                    "E_oracle": e,
                    "rel_err": e.map(|e| ((l.energy - e) / e).abs()),
                    "degeneracy_tag": l.degeneracy_tag,
                })
            })
            .collect();
        let shells: Map<String, Value> = spectra::shell_degeneracies(&lines)
            .into_iter()
            .map(|(k, v)| (spectra::fmt_rational(&k), json!(v)))
            .collect();
        let v = json!({ "config": a, "prefactor": prefactor, "levels": rows, "degeneracies": shells });
        return emit_json(out, dest.as_deref(), &v);
    }
    let mut text = String::from("Nr,m_sigma,E_formula,E_oracle,rel_err\n");
    for l in &lines {
        let (eo, rel) = match lookup(l.nr, l.m_sigma) {
            Some(e) => (format!("{e:.16e}"), format!("{:.6e}", ((l.energy - e) / e).abs())),
            None => (String::new(), String::new()),
        };
        text.push_str(&format!("{},{},{:.16e},{eo},{rel}\n", l.nr, spectra::fmt_rational(&l.m_sigma), l.energy));
    }
    emit(out, dest.as_deref(), text.as_bytes())
}
