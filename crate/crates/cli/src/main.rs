use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hypentropy::boundary::{markov_partition, transition_matrix, BoundaryMap, ParamSpec, PartitionJson, Variant};
use hypentropy::current::{attractor_cloud, current_report, AttractorReport, ATTRACTOR_BINS, ATTRACTOR_SLACK, ATTRACTOR_TRIM, BEAM_TOL};
use hypentropy::format::to_json;
use hypentropy::maskit::{self, build_polygon, MaskitParams, NamedSurface};
use hypentropy::parry::{compare_conjugacies, default_depth, graph_csv, graph_rows, slope_profile, Conjugacy, SlopeProfile};
use hypentropy::polygon::{build_regular_polygon, validate_canonical, CanonicalPolygon};
use hypentropy::spectral::{entropy_csv, entropy_table, perron, rigidity_lambda};
use hypentropy::verify::{parse_suites, run_suite, tolerances, CheckResult};
use hypentropy::Error;

/// Fundamental polygons, boundary maps and entropies of genus-g surfaces.
#[derive(Parser)]
#[command(name = "hypentropy", version)]
struct Cli {
    /// Directory receiving every output file and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical polygon with vertices, P/Q points and side pairings.
    Polygon(PolygonArgs),
    /// Markov partition, transition matrix and Perron eigenvalue.
    Matrix(MatrixArgs),
    /// Topological entropy against the perimeter bound over a genus range.
    Entropy(EntropyArgs),
    /// Maskit's derived quantities, perimeter and measure-theoretic entropy.
    Maskit(MaskitArgs),
    /// Graphs of the boundary map, its conjugacy and the constant-slope model.
    Conjugacy(ConjugacyArgs),
    /// Beam masses of the polygon's sides against their lengths.
    Current(CurrentArgs),
    /// Sampled attractor of the natural extension (exploratory).
    Attractor(AttractorArgs),
    /// Runs invariant suites; exits 0 only if every check passes.
    Verify(VerifyArgs),
}

#[derive(Args, Serialize)]
struct PolygonSource {
    /// Genus of the surface.
    #[arg(long, default_value_t = 2)]
    genus: usize,
    /// Named surface: regular, base or bolza (the last two in genus 2).
    #[arg(long, conflicts_with = "maskit")]
    surface: Option<String>,
    /// Maskit coordinates alpha,beta,gamma,sigma,tau,rho (genus 2).
    #[arg(long, allow_hyphen_values = true)]
    maskit: Option<String>,
}

#[derive(Args, Serialize)]
struct PolygonArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: PolygonSource,
}

#[derive(Args, Serialize)]
struct MatrixArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: PolygonSource,
    /// Multi-parameter: P, Q, PQ, midpoint, uneven or bits:<0/1 string>.
    #[arg(long, default_value = "P")]
    param: String,
    /// Partition variant: a, b, c, d or auto.
    #[arg(long, default_value = "auto")]
    variant: String,
}

#[derive(Args, Serialize)]
struct EntropyArgs {
    /// Inclusive genus range A..B.
    #[arg(long, default_value = "2..10")]
    genus_range: String,
}

#[derive(Args, Serialize)]
struct MaskitArgs {
    /// alpha,beta,gamma,sigma,tau,rho.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "surface")]
    params: Option<String>,
    /// Named surface: regular, base or bolza.
    #[arg(long)]
    surface: Option<String>,
}

#[derive(Args, Serialize)]
struct ConjugacyArgs {
    /// Genus of the regular polygon.
    #[arg(long, default_value_t = 2)]
    genus: usize,
    /// Number of equally spaced sample points.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Recursion depth; defaults to 13 in genus 2 and ceil(14 / log10 lambda) above.
    #[arg(long)]
    depth: Option<usize>,
    /// Grid size for the slope and agreement checks.
    #[arg(long, default_value_t = 10_000)]
    grid: usize,
}

#[derive(Args, Serialize)]
struct CurrentArgs {
    /// Genus of the regular polygon when no other surface is chosen.
    #[arg(long, default_value_t = 2)]
    genus: usize,
    /// Named surface: regular, base or bolza.
    #[arg(long, default_value = "regular")]
    surface: String,
}

#[derive(Args, Serialize)]
struct AttractorArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: PolygonSource,
    /// Multi-parameter of the boundary map.
    #[arg(long, default_value = "P")]
    param: String,
    /// Number of random starting pairs.
    #[arg(long, default_value_t = 1000)]
    seeds: usize,
    /// Iterates discarded per start.
    #[arg(long, default_value_t = 60)]
    transient: usize,
    /// Iterates kept per start.
    #[arg(long, default_value_t = 400)]
    keep: usize,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// all, geometry, markov, parry or current.
    #[arg(long, default_value = "all")]
    suite: String,
}

#[derive(Serialize)]
struct Manifest<'a, O: Serialize> {
    command: &'a str,
    version: &'a str,
    options: &'a O,
    seed: u64,
    tolerances: BTreeMap<String, f64>,
    artifact_files: Vec<String>,
    pass_fail: Option<bool>,
}

/// Files, tolerances and verdict of one run.
#[derive(Default)]
struct Outcome {
    files: Vec<(String, String)>,
    tolerances: BTreeMap<String, f64>,
    pass_fail: Option<bool>,
    summary: Vec<String>,
}

impl Outcome {
    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_string(), value);
    }

    fn say(&mut self, line: String) {
        self.summary.push(line);
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::InvalidGenus(_)
            | Error::UnknownSurface(_)
            | Error::ParameterLength { .. }
            | Error::OutOfArc { .. }
            | Error::VariantMismatch { .. }
            | Error::NonPositiveLength { .. }
            | Error::InvalidRegion(_)
            | Error::EvalDepthTooLarge(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("cannot write output: {e}"))
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_floats(list: &str) -> Result<Vec<f64>, Failure> {
    list.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| usage(format!("bad number {t:?}: {e}"))))
        .collect()
}

fn parse_maskit(list: &str) -> Result<MaskitParams, Failure> {
    Ok(MaskitParams::from_slice(&parse_floats(list)?)?)
}

fn require_genus_two(genus: usize, what: &str) -> Result<(), Failure> {
    if genus != 2 {
        return Err(usage(format!("{what} is only defined in genus 2, got genus {genus}")));
    }
    Ok(())
}

fn resolve_polygon(src: &PolygonSource) -> Result<CanonicalPolygon, Failure> {
    if let Some(list) = &src.maskit {
        require_genus_two(src.genus, "--maskit")?;
        return Ok(build_polygon(&parse_maskit(list)?)?);
    }
    match src.surface.as_deref().map(str::parse::<NamedSurface>).transpose()? {
        None | Some(NamedSurface::Regular) => Ok(build_regular_polygon(src.genus)?),
        Some(s) => {
            require_genus_two(src.genus, s.name())?;
            Ok(build_polygon(&s.params())?)
        }
    }
}

fn polygon(args: &PolygonArgs) -> Result<Outcome, Failure> {
    let poly = resolve_polygon(&args.source)?;
    let report = validate_canonical(&poly);
    let mut out = Outcome::default();
    out.file("polygon.json", to_json(&poly.to_json()));
    out.tolerance("validation", 1e-8);
    out.pass_fail = Some(report.accepted);
    out.say(format!("genus {} perimeter {:.12}", poly.genus(), poly.perimeter()));
    out.say(format!(
        "max side difference {:e}, max angle residual {:e}, interleaved {}",
        report.max_side_diff(),
        report.max_angle_residual(),
        report.interleaved
    ));
    Ok(out)
}

#[derive(Serialize)]
struct MatrixJson {
    size: usize,
    lambda: f64,
    expected_lambda: f64,
    perron_vector: Vec<f64>,
    residual: f64,
    partition: PartitionJson,
}

fn matrix(args: &MatrixArgs) -> Result<Outcome, Failure> {
    let poly = resolve_polygon(&args.source)?;
    let spec: ParamSpec = args.param.parse()?;
    let variant: Variant = args.variant.parse()?;
    let bm = BoundaryMap::from_spec(&poly, &spec)?;
    let tm = transition_matrix(&bm, &markov_partition(&bm, variant)?)?;
    let pp = perron(&tm.matrix)?;
    let expected = rigidity_lambda(poly.genus());
    let mut out = Outcome::default();
    out.file("matrix.csv", tm.matrix.to_csv());
    out.file("matrix.pbm", tm.matrix.to_pbm());
    out.file(
        "matrix.json",
        to_json(&MatrixJson {
            size: tm.matrix.size(),
            lambda: pp.lambda,
            expected_lambda: expected,
            perron_vector: pp.vector.clone(),
            residual: pp.residual,
            partition: tm.partition.to_json(),
        }),
    );
    out.tolerance("lambda", 1e-9);
    out.pass_fail = Some((pp.lambda - expected).abs() <= 1e-9);
    out.say(format!("{}x{} matrix, lambda {:.15}", tm.matrix.size(), tm.matrix.size(), pp.lambda));
    Ok(out)
}

fn parse_range(s: &str) -> Result<(usize, usize), Failure> {
    let (a, b) = s.split_once("..").ok_or_else(|| usage(format!("genus range must look like A..B, got {s:?}")))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| usage(format!("bad genus {t:?}: {e}")));
    let (a, b) = (parse(a)?, parse(b)?);
    if a < 2 || b < a {
        return Err(usage(format!("genus range {a}..{b} must satisfy 2 <= A <= B")));
    }
    Ok((a, b))
}

fn entropy(args: &EntropyArgs) -> Result<Outcome, Failure> {
    let (a, b) = parse_range(&args.genus_range)?;
    let rows = entropy_table(a, b)?;
    let mut out = Outcome::default();
    out.file("entropy.csv", entropy_csv(&rows));
    out.pass_fail = Some(rows.iter().all(|r| r.h_max < r.h_top));
    out.say(format!("{} rows, genus {a} to {b}", rows.len()));
    Ok(out)
}

#[derive(Serialize)]
struct MaskitJson {
    #[serde(flatten)]
    report: maskit::MaskitReport,
    side_perimeter: Option<f64>,
    trace_perimeter: Option<f64>,
}

fn maskit_cmd(args: &MaskitArgs) -> Result<Outcome, Failure> {
    let params = match (&args.params, &args.surface) {
        (Some(list), None) => parse_maskit(list)?,
        (None, Some(name)) => name.parse::<NamedSurface>()?.params(),
        _ => return Err(usage("give exactly one of --params and --surface")),
    };
    let report = maskit::report(&params);
    let mut out = Outcome::default();
    if let Some(v) = &report.violation {
        return Err(usage(v.clone()));
    }
    let side = build_polygon(&params)?.perimeter();
    let trace = maskit::perimeter_from_traces(&params)?;
    let closed = report.perimeter.expect("valid tuple has a perimeter");
    out.tolerance("perimeter_routes", 1e-8);
    out.pass_fail = Some((closed - side).abs() <= 1e-8 && (closed - trace).abs() <= 1e-8);
    out.say(format!("perimeter {closed:.12}, entropy {:.12}", report.entropy.unwrap_or(f64::NAN)));
    out.file(
        "maskit.json",
        to_json(&MaskitJson {
            report,
            side_perimeter: Some(side),
            trace_perimeter: Some(trace),
        }),
    );
    Ok(out)
}

#[derive(Serialize)]
struct ConjugacyJson {
    genus: usize,
    depth: usize,
    lambda: f64,
    sup_difference: f64,
    slope_p: SlopeProfile,
    slope_q: SlopeProfile,
}

fn conjugacy(args: &ConjugacyArgs) -> Result<Outcome, Failure> {
    if args.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let poly = build_regular_polygon(args.genus)?;
    let bm_p = BoundaryMap::from_spec(&poly, &ParamSpec::AllP)?;
    let bm_q = BoundaryMap::from_spec(&poly, &ParamSpec::AllQ)?;
    let psi_p = Conjugacy::new(&bm_p, Variant::A)?;
    let psi_q = Conjugacy::new(&bm_q, Variant::A)?;
    let depth = args.depth.unwrap_or_else(|| default_depth(args.genus, psi_p.lambda()));
    let rows_p = graph_rows(&bm_p, &psi_p, args.samples, depth)?;
    let rows_q = graph_rows(&bm_q, &psi_q, args.samples, depth)?;
    let summary = ConjugacyJson {
        genus: args.genus,
        depth,
        lambda: psi_p.lambda(),
        sup_difference: compare_conjugacies(&psi_p, &psi_q, args.grid, depth)?,
        slope_p: slope_profile(&bm_p, &psi_p, args.grid, depth)?,
        slope_q: slope_profile(&bm_q, &psi_q, args.grid, depth)?,
    };
    let mut out = Outcome::default();
    out.tolerance("sup_difference", 1e-8);
    out.tolerance("slope", 1e-6);
    out.pass_fail = Some(summary.sup_difference < 1e-8 && summary.slope_p.max_deviation < 1e-6 && summary.slope_q.max_deviation < 1e-6);
    out.say(format!("depth {depth}, sup |psi_P - psi_Q| = {:e}", summary.sup_difference));
    out.file("conjugacy.csv", graph_csv(["P", "Q"], &rows_p, &rows_q));
    out.file("conjugacy.json", to_json(&summary));
    Ok(out)
}

fn current(args: &CurrentArgs) -> Result<Outcome, Failure> {
    let poly = resolve_polygon(&PolygonSource {
        genus: args.genus,
        surface: Some(args.surface.clone()),
        maskit: None,
    })?;
    let report = current_report(&poly)?;
    let mut out = Outcome::default();
    out.tolerance("beam_quadrature", BEAM_TOL);
    out.tolerance("omega_geo", 1e-6);
    out.pass_fail = Some(report.gap.abs() <= 1e-6);
    out.say(format!("Omega_geo {:.12}, perimeter {:.12}", report.omega_geo, report.perimeter));
    out.file("current.json", to_json(&report));
    Ok(out)
}

fn attractor(args: &AttractorArgs, seed: u64) -> Result<Outcome, Failure> {
    let poly = resolve_polygon(&args.source)?;
    let spec: ParamSpec = args.param.parse()?;
    let bm = BoundaryMap::from_spec(&poly, &spec)?;
    let cloud = attractor_cloud(&bm, args.seeds, args.transient, args.keep, seed)?;
    let r: &AttractorReport = &cloud.report;
    let mut out = Outcome::default();
    out.tolerance("bins_per_branch", ATTRACTOR_BINS as f64);
    out.tolerance("trim_per_end", ATTRACTOR_TRIM);
    out.tolerance("self_consistency_slack", ATTRACTOR_SLACK);
    out.say(format!(
        "{} points, {} rectangles, nu-mass {:.6} vs perimeter {:.6} (exploratory)",
        r.points, r.merged_rectangles, r.nu_mass, r.perimeter
    ));
    out.file("attractor.json", to_json(r));
    out.file("attractor.csv", cloud.to_csv());
    Ok(out)
}

fn verify(args: &VerifyArgs, seed: u64) -> Result<Outcome, Failure> {
    let suites = parse_suites(&args.suite)?;
    let mut out = Outcome::default();
    let mut results: Vec<CheckResult> = Vec::new();
    for suite in suites {
        for (name, tol) in tolerances(suite) {
            out.tolerance(&format!("{suite}: {name}"), tol);
        }
        results.extend(run_suite(suite, seed));
    }
    for r in &results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        let detail = match &r.error {
            Some(e) => format!("error: {e}"),
            None => format!("{:e} <= {:e}", r.measured, r.tolerance),
        };
        out.say(format!("{verdict} [{}] {}: {detail}", r.suite, r.name));
    }
    out.pass_fail = Some(results.iter().all(|r| r.passed));
    out.file("verify.json", to_json(&results));
    Ok(out)
}

fn write_outputs<O: Serialize>(dir: &Path, command: &str, options: &O, seed: u64, outcome: &Outcome) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, contents) in &outcome.files {
        fs::write(dir.join(name), contents)?;
    }
    let mut artifact_files: Vec<String> = outcome.files.iter().map(|f| f.0.clone()).collect();
    let manifest_name = format!("{command}.manifest.json");
    artifact_files.push(manifest_name.clone());
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        options,
        seed,
        tolerances: outcome.tolerances.clone(),
        artifact_files,
        pass_fail: outcome.pass_fail,
    };
    fs::write(dir.join(manifest_name), to_json(&manifest))
}

fn run(cli: &Cli) -> Result<Option<bool>, Failure> {
    let seed = cli.seed;
    macro_rules! dispatch {
        ($name:literal, $args:expr, $outcome:expr) => {{
            let outcome = $outcome?;
            write_outputs(&cli.out, $name, $args, seed, &outcome)?;
            for line in &outcome.summary {
                println!("{line}");
            }
            Ok(outcome.pass_fail)
        }};
    }
    match &cli.command {
        Command::Polygon(a) => dispatch!("polygon", a, polygon(a)),
        Command::Matrix(a) => dispatch!("matrix", a, matrix(a)),
        Command::Entropy(a) => dispatch!("entropy", a, entropy(a)),
        Command::Maskit(a) => dispatch!("maskit", a, maskit_cmd(a)),
        Command::Conjugacy(a) => dispatch!("conjugacy", a, conjugacy(a)),
        Command::Current(a) => dispatch!("current", a, current(a)),
        Command::Attractor(a) => dispatch!("attractor", a, attractor(a, seed)),
        Command::Verify(a) => dispatch!("verify", a, verify(a, seed)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Some(false)) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
