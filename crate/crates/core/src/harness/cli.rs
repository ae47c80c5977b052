use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use super::document::OperatorDocument;
use super::report::VerificationReport;
use super::suite::{run_suite, SuiteConfig};
use super::{exit_code, HarnessError};
use crate::checks::Check;
use crate::generators::{build_normal_with_types, GeneratorSpec};
use crate::json::{matrix_from_json, matrix_to_json, JsonComplex, JsonMatrix};
use crate::numerics::{c64, identity, norm2, solve_sylvester, Complex64};
use crate::projections::{
    local_spectral_function, resolvent_probe, riesz_projection_contour, riesz_projection_oracle,
    strong_stability_check, verify_lsf_axioms, verify_maximality, verify_spectral_set_theorem,
    BorelSetDescriptor,
};
use crate::spectral::classify;

#[derive(Debug, Parser)]
#[command(
    name = "krein-spectra",
    version,
    about = "Spectral analysis of normal operators in Krein spaces"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// List passing checks in text output.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct Regions {
    /// Disk `cx,cy,r`; repeatable.
    #[arg(long = "disk", allow_hyphen_values = true)]
    disks: Vec<String>,
    /// Half-open rectangle `x0,y0,x1,y1`; repeatable.
    #[arg(long = "rect", allow_hyphen_values = true)]
    rects: Vec<String>,
}

impl Regions {
    fn pieces(&self) -> Result<Vec<BorelSetDescriptor>, HarnessError> {
        let disks = self.disks.iter().map(|s| BorelSetDescriptor::parse_disk(s));
        let rects = self.rects.iter().map(|s| BorelSetDescriptor::parse_rect(s));
        disks
            .chain(rects)
            .map(|r| r.map_err(|e| HarnessError::Input(e.to_string())))
            .collect()
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify every eigenvalue by the sign of the inner product on its kernels.
    Classify { input: PathBuf },
    /// Riesz projection onto the union of the given regions, by contour and by Schur.
    Project {
        input: PathBuf,
        #[command(flatten)]
        regions: Regions,
        #[arg(long, default_value_t = 128)]
        nodes: usize,
    },
    /// Build a local spectral function and check its axioms.
    LsfVerify {
        input: PathBuf,
        /// Carrier disk `cx,cy,r`; repeatable.
        #[arg(long = "carrier-disk", allow_hyphen_values = true)]
        carrier_disks: Vec<String>,
        /// Carrier rectangle `x0,y0,x1,y1`; repeatable.
        #[arg(long = "carrier-rect", allow_hyphen_values = true)]
        carrier_rects: Vec<String>,
        /// Test sets; each region is checked separately.
        #[command(flatten)]
        regions: Regions,
        /// Random invariant subspaces per bounded test set.
        #[arg(long, default_value_t = 20)]
        maximality: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate the resolvent growth constant and pole order at an eigenvalue.
    ProbeResolvent {
        input: PathBuf,
        /// Eigenvalue `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Decreasing radii, comma separated.
        #[arg(long, default_value = "0.1,0.01,0.001,0.0001")]
        radii: String,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Check strong stability and the fundamental decomposition.
    Stability { input: PathBuf },
    /// Solve `SX - XT = Z` from a JSON document with fields `s`, `t`, `z`.
    Sylvester { input: PathBuf },
    /// Emit a generated operator document.
    Generate {
        #[arg(long, default_value_t = 6)]
        dim: usize,
        #[arg(long, default_value_t = 1e3)]
        cond_bound: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Generator spec JSON; overrides the random inventory.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Run the seeded verification suite.
    Suite {
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dimension range `a..b`, inclusive.
        #[arg(long, default_value = "2..12")]
        dims: String,
        #[arg(long, default_value_t = 1e3)]
        cond_bound: f64,
        /// Rerun a single trial.
        #[arg(long)]
        trial: Option<u64>,
    },
}

/// What a command hands back for rendering.
enum Rendered {
    Report {
        report: VerificationReport,
        table: Option<String>,
    },
    /// A document printed as is.
    Document(String),
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = with_thread_pool(|| execute(&cli));
    if let Err(e) = &outcome {
        if !matches!(e, HarnessError::Checks) {
            eprintln!("error: {e}");
        }
    }
    exit_code(&outcome)
}

fn with_thread_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = std::env::var("KREIN_SPECTRA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

fn execute(cli: &Cli) -> Result<(), HarnessError> {
    let start = Instant::now();
    let rendered = match &cli.command {
        Command::Classify { input } => classify_cmd(input)?,
        Command::Project {
            input,
            regions,
            nodes,
        } => project_cmd(input, regions, *nodes)?,
        Command::LsfVerify {
            input,
            carrier_disks,
            carrier_rects,
            regions,
            maximality,
            seed,
        } => {
            let carrier = Regions {
                disks: carrier_disks.clone(),
                rects: carrier_rects.clone(),
            };
            lsf_cmd(input, &carrier, regions, *maximality, *seed)?
        }
        Command::ProbeResolvent {
            input,
            point,
            radii,
            samples,
        } => probe_cmd(input, point, radii, *samples)?,
        Command::Stability { input } => stability_cmd(input)?,
        Command::Sylvester { input } => sylvester_cmd(input)?,
        Command::Generate {
            dim,
            cond_bound,
            seed,
            spec,
        } => generate_cmd(*dim, *cond_bound, *seed, spec.as_deref())?,
        Command::Suite {
            trials,
            seed,
            dims,
            cond_bound,
            trial,
        } => suite_cmd(*trials, *seed, dims, *cond_bound, *trial)?,
    };
    match rendered {
        Rendered::Document(text) => emit(cli, &text),
        Rendered::Report { mut report, table } => {
            if cli.timing {
                report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            let text = match cli.format {
                Format::Json => report.to_json(),
                Format::Text => {
                    let mut t = table.unwrap_or_default();
                    t.push_str(&report.to_text(cli.verbose));
                    t
                }
            };
            emit(cli, &text)?;
            if report.failed() {
                Err(HarnessError::Checks)
            } else {
                Ok(())
            }
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), HarnessError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(input: &Path) -> Result<(crate::KreinOperator, crate::ToleranceConfig), HarnessError> {
    OperatorDocument::read(input)?.build()
}

fn parse_complex(s: &str) -> Result<Complex64, HarnessError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| HarnessError::Input(format!("expected re,im, got '{s}'")))
    };
    match parts.as_slice() {
        [re, im] => Ok(c64(parse(re)?, parse(im)?)),
        [re] => Ok(c64(parse(re)?, 0.0)),
        _ => Err(HarnessError::Input(format!("expected re,im, got '{s}'"))),
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{:+.6} {:+.6}i", z.re, z.im)
}

fn classify_cmd(input: &Path) -> Result<Rendered, HarnessError> {
    let (op, cfg) = load(input)?;
    let points = classify(&op, &cfg)?;
    let mut table = format!(
        "{:<28} {:>4} {:>4}  {:<18} {:>10}\n",
        "eigenvalue", "m_a", "m_g", "type", "margin"
    );
    let mut rows = Vec::new();
    for p in &points {
        let tag = p.type_tag.expect("classified");
        let margin = p
            .gram_margin
            .map_or("-".to_string(), |m| format!("{m:.3e}"));
        let _ = writeln!(
            table,
            "{:<28} {:>4} {:>4}  {:<18} {:>10}",
            fmt_c(p.value),
            p.alg_mult,
            p.geo_mult,
            tag.name(),
            margin
        );
        rows.push(json!({
            "value": JsonComplex(p.value),
            "alg_mult": p.alg_mult,
            "geo_mult": p.geo_mult,
            "type": tag,
            "gram_margin": p.gram_margin,
            "warnings": p.warnings.iter().map(|w| format!("{w:?}")).collect::<Vec<_>>(),
        }));
    }
    let mut report = VerificationReport::new("classify");
    report.extend(
        [Check::bound(
            "input.normal",
            "NN⁺ = N⁺N",
            op.normality_residual(),
            cfg.normality_tol,
        )],
        None,
        "",
    );
    report.output = Some(json!({ "points": rows }));
    Ok(Rendered::Report {
        report,
        table: Some(table),
    })
}

fn project_cmd(input: &Path, regions: &Regions, nodes: usize) -> Result<Rendered, HarnessError> {
    let (op, cfg) = load(input)?;
    let pieces = regions.pieces()?;
    if pieces.is_empty() {
        return Err(HarnessError::Input(
            "give at least one --disk or --rect".into(),
        ));
    }
    let delta = BorelSetDescriptor::from_pieces(pieces);
    let contour = riesz_projection_contour(&op, &delta, nodes, &cfg)?;
    let oracle = riesz_projection_oracle(&op, &delta, &cfg)?;
    let discrepancy = norm2(&(&contour.q - &oracle.q));
    let mut checks = vec![
        Check::bound(
            "riesz.contour_vs_oracle",
            "Q_contour = Q_oracle",
            discrepancy,
            1e-6,
        ),
        Check::bound(
            "riesz.idempotent",
            "Q² = Q",
            oracle.idem_residual,
            1e-8 * (1.0 + oracle.q_norm * oracle.q_norm),
        ),
    ];
    if !contour.converged() {
        checks.push(Check::flag("riesz.quadrature", "node doubling stable", false).as_warning());
    }
    let set = verify_spectral_set_theorem(&op, &delta, &cfg)?;
    checks.extend(set.checks);
    let mut report = VerificationReport::new("project");
    report.extend(checks, None, "");
    report.output = Some(json!({
        "rank": oracle.rank(),
        "discrepancy": discrepancy,
        "nodes_used": contour.nodes_used,
        "q_contour": matrix_to_json(&contour.q),
        "q_oracle": matrix_to_json(&oracle.q),
    }));
    let table = format!(
        "rank {}  ‖Q_contour - Q_oracle‖ = {discrepancy:.3e}  nodes {}\n",
        oracle.rank(),
        contour.nodes_used.unwrap_or(nodes)
    );
    Ok(Rendered::Report {
        report,
        table: Some(table),
    })
}

fn lsf_cmd(
    input: &Path,
    carrier: &Regions,
    regions: &Regions,
    maximality: usize,
    seed: u64,
) -> Result<Rendered, HarnessError> {
    let (op, cfg) = load(input)?;
    let carrier_pieces = carrier.pieces()?;
    if carrier_pieces.is_empty() {
        return Err(HarnessError::Input(
            "give at least one --carrier-disk or --carrier-rect".into(),
        ));
    }
    let carrier = BorelSetDescriptor::from_pieces(carrier_pieces);
    let e = local_spectral_function(&op, &carrier, &cfg)?;
    let mut deltas = regions.pieces()?;
    let bounded: Vec<BorelSetDescriptor> =
        deltas.iter().filter(|d| d.is_bounded()).cloned().collect();
    deltas.push(BorelSetDescriptor::Plane);
    deltas.push(BorelSetDescriptor::Empty);
    let n = op.matrix();
    let commutants = [identity(op.dim()), n.clone(), op.adjoint().clone(), n * n];
    let lsf = verify_lsf_axioms(&e, &deltas, &commutants)?;
    let mut checks = lsf.checks;
    for (k, d) in bounded.iter().enumerate() {
        checks.push(verify_maximality(
            &e,
            d,
            maximality,
            crate::generators::derive_seed(seed, k as u64),
        )?);
    }
    let mut report = VerificationReport::new("lsf-verify");
    report.seed = Some(seed);
    report.extend(checks, None, "");
    report.output = Some(json!({
        "carrier_eigenvalues": e.carrier_eigenvalues().into_iter().map(JsonComplex).collect::<Vec<_>>(),
        "evaluations": lsf.evaluations,
    }));
    Ok(Rendered::Report {
        report,
        table: None,
    })
}

fn probe_cmd(
    input: &Path,
    point: &str,
    radii: &str,
    samples: usize,
) -> Result<Rendered, HarnessError> {
    let (op, cfg) = load(input)?;
    let lambda = parse_complex(point)?;
    let radii: Vec<f64> = radii
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            HarnessError::Input(format!(
                "radii: expected comma-separated numbers, got '{radii}'"
            ))
        })?;
    let probe = resolvent_probe(&op, lambda, &radii, samples, &cfg)?;
    let mut table = format!(
        "{} ({})  C ≈ {:.4e}  pole order {}\n",
        fmt_c(probe.point),
        probe.tag,
        probe.c_estimate,
        probe.pole_order.map_or("?".into(), |k| k.to_string())
    );
    for s in &probe.per_radius {
        let _ = writeln!(
            table,
            "  r = {:<10.3e} C(r) = {:.4e}",
            s.radius, s.c_estimate
        );
    }
    let mut checks = Vec::new();
    if probe.tag.is_definite() {
        checks.push(Check::bound(
            "resolvent.growth",
            "‖(N - λ)⁻¹‖ ≤ C / dist(λ, σ(N))",
            probe.growth(),
            10.0,
        ));
        checks.push(Check::flag(
            "resolvent.pole_order",
            "pole of order one",
            probe.pole_order == Some(1),
        ));
    } else {
        checks.push(Check::inapplicable(
            "resolvent.growth",
            "‖(N - λ)⁻¹‖ ≤ C / dist(λ, σ(N))",
            format!("{} point", probe.tag),
        ));
    }
    let mut report = VerificationReport::new("probe-resolvent");
    report.extend(checks, None, "");
    report.output = Some(json!({
        "point": JsonComplex(probe.point),
        "type": probe.tag,
        "c_estimate": probe.c_estimate,
        "growth": probe.growth(),
        "pole_order": probe.pole_order,
        "moment_norms": probe.moment_norms,
        "per_radius": probe.per_radius,
        "discarded": probe.discarded,
    }));
    Ok(Rendered::Report {
        report,
        table: Some(table),
    })
}

fn stability_cmd(input: &Path) -> Result<Rendered, HarnessError> {
    let (op, cfg) = load(input)?;
    let st = strong_stability_check(&op, &cfg)?;
    let dims = st
        .decomposition
        .as_ref()
        .map(|d| (d.positive.dim(), d.negative.dim()));
    let table = match dims {
        Some((p, q)) => format!(
            "strongly stable: H = H₊ ⊕ H₋ with dims {p} + {q}, classification margin {:.3e}\n",
            st.classification_margin
        ),
        None => "not strongly stable\n".to_string(),
    };
    let mut report = VerificationReport::new("stability");
    report.extend(st.checks, None, "");
    report.output = Some(json!({
        "stable": st.stable,
        "classification_margin": st.classification_margin,
        "positive_dim": dims.map(|d| d.0),
        "negative_dim": dims.map(|d| d.1),
        "positive_basis": st.decomposition.as_ref().map(|d| matrix_to_json(d.positive.columns())),
        "negative_basis": st.decomposition.as_ref().map(|d| matrix_to_json(d.negative.columns())),
        "points": st.points.iter().map(|(z, t)| json!({"value": JsonComplex(*z), "type": t})).collect::<Vec<_>>(),
    }));
    Ok(Rendered::Report {
        report,
        table: Some(table),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SylvesterDocument {
    s: JsonMatrix,
    t: JsonMatrix,
    z: JsonMatrix,
}

fn sylvester_cmd(input: &Path) -> Result<Rendered, HarnessError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", input.display())))?;
    let doc: SylvesterDocument = serde_json::from_str(&text).map_err(|e| {
        HarnessError::Input(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    let matrix = |field: &str, m: &JsonMatrix| {
        matrix_from_json(m)
            .ok_or_else(|| HarnessError::Input(format!("{field}: rows must have equal length")))
    };
    let (s, t, z) = (
        matrix("s", &doc.s)?,
        matrix("t", &doc.t)?,
        matrix("z", &doc.z)?,
    );
    let sol = solve_sylvester(&s, &t, &z)?;
    let bound = 1e-8 * (norm2(&s) + norm2(&t)) * norm2(&sol.x) + 1e-8 * norm2(&z);
    let mut report = VerificationReport::new("sylvester");
    report.extend(
        [
            Check::bound("sylvester.residual", "SX - XT = Z", sol.residual, bound)
                .with_detail(format!("min gap {:.3e}", sol.min_gap)),
        ],
        None,
        "",
    );
    report.output = Some(json!({
        "x": matrix_to_json(&sol.x),
        "residual": sol.residual,
        "min_gap": sol.min_gap,
    }));
    Ok(Rendered::Report {
        report,
        table: None,
    })
}

fn generate_cmd(
    dim: usize,
    cond_bound: f64,
    seed: u64,
    spec: Option<&Path>,
) -> Result<Rendered, HarnessError> {
    let spec = match spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<GeneratorSpec>(&text).map_err(|e| {
                HarnessError::Input(format!("line {}, column {}: {e}", e.line(), e.column()))
            })?
        }
        None => GeneratorSpec::random(dim, cond_bound, seed)?,
    };
    let gen = build_normal_with_types(&spec)?;
    let mut doc = OperatorDocument::from_operator(&gen.operator);
    let encode = |v: serde_json::Result<String>| v.expect("generator types serialize");
    doc.metadata.insert(
        "generator_spec".into(),
        encode(serde_json::to_string(&spec)),
    );
    doc.metadata.insert(
        "ground_truth".into(),
        encode(serde_json::to_string(&gen.ground_truth)),
    );
    Ok(Rendered::Document(doc.to_canonical_json()))
}

fn parse_dims(s: &str) -> Result<std::ops::RangeInclusive<usize>, HarnessError> {
    let bad = || HarnessError::Input(format!("dims: expected a..b with 1 ≤ a ≤ b, got '{s}'"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn suite_cmd(
    trials: u64,
    seed: u64,
    dims: &str,
    cond_bound: f64,
    trial: Option<u64>,
) -> Result<Rendered, HarnessError> {
    if !(cond_bound.is_finite() && cond_bound >= 1.0) {
        return Err(HarnessError::Input(format!(
            "cond-bound must be at least 1, got {cond_bound}"
        )));
    }
    let sc = SuiteConfig {
        trials,
        seed,
        dims: parse_dims(dims)?,
        cond_bound,
        only_trial: trial,
        ..Default::default()
    };
    let report = run_suite(&sc);
    Ok(Rendered::Report {
        report,
        table: None,
    })
}
