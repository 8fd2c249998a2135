//! `lawson`: build Lawson surfaces in the 3-sphere, check their symmetry
//! data and certify the orbifold Euler number arguments.
//!
//! Every command prints one JSON document on stdout (or PASS/FAIL lines for
//! `verify`). Failures print `{"schema":1,"error":{..}}` and exit with
//! 2 (usage), 3 (numerical failure) or 4 (verification failure).

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lawson::assembly::ClosedMesh;
use lawson::energy::{willmore_energy, EnergyReport};
use lawson::io::{obj_string, parse_raw, pole, raw_string};
use lawson::orbifold::{certificate, lawson_chi_o, Certificate, Classification, IntersectionPattern, Rational};
use lawson::pipeline::{build_surface, matrix_rows, symmetry_defect, view_rotation, BuildConfig, LevelReport};
use lawson::plateau::SolverOptions;
use lawson::sphere::Point4;
use lawson::symmetry::{is_invariant, lawson_group, Group, LawsonParams};
use lawson::tiling::{locate_tile, quadrilateral, tile_orbits, TileIndex};
use lawson::TOL;
use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const SCHEMA: u32 = 1;
const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "lawson", version, about = "Lawson minimal surfaces in the 3-sphere")]
struct Cli {
    /// Log verbosity on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the surface and write OBJ, raw and JSON files.
    Generate(GenerateArgs),
    /// Check group order, tile orbits and quadrilateral angles.
    Verify(VerifyArgs),
    /// Exact orbifold Euler numbers and the pattern classification.
    Orbifold(OrbifoldArgs),
    /// Topology and energy of a built or supplied surface.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct SurfaceParams {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=8))]
    m: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=8))]
    k: u32,
}

#[derive(Debug, Args)]
struct ArithmeticParams {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=50))]
    m: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=50))]
    k: u32,
}

#[derive(Debug, Args, Clone, Copy)]
struct SolveArgs {
    /// Initial grid resolution of the fundamental disk.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(2..=256))]
    n: u32,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=4))]
    refinements: u32,
    #[arg(long, default_value_t = 1e-6, value_parser = positive_real)]
    grad_tol: f64,
    #[arg(long, default_value_t = TOL.weld, value_parser = positive_real)]
    weld_tol: f64,
}

impl SolveArgs {
    fn build_config(&self) -> BuildConfig {
        BuildConfig {
            n: self.n as usize,
            refinements: self.refinements as usize,
            solver: SolverOptions {
                grad_tol: self.grad_tol,
                ..SolverOptions::default()
            },
            weld_tol: self.weld_tol,
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    params: SurfaceParams,
    #[command(flatten)]
    solve: SolveArgs,
    /// Seed for the randomized symmetry spot check.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    params: SurfaceParams,
    /// Seed for the random tile-cover samples.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Check this exported group document instead of generating the group.
    #[arg(long)]
    group: Option<PathBuf>,
    /// Write the group document here.
    #[arg(long)]
    export_group: Option<PathBuf>,
    /// Print a JSON document instead of PASS/FAIL lines.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct OrbifoldArgs {
    #[command(flatten)]
    params: ArithmeticParams,
    /// Also check every pair with 1 ≤ k ≤ m ≤ N.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=50))]
    max_scan: Option<u32>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    params: SurfaceParams,
    /// Raw 4D mesh to analyse instead of building one.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    solve: SolveArgs,
}

fn positive_real(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{s} is not a positive number"))
    }
}

/// A command failure with its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl Failure {
    fn usage(kind: &str, message: impl Into<String>) -> Self {
        Failure { code: 2, kind: kind.into(), message: message.into() }
    }

    fn verification(kind: &str, message: impl Into<String>) -> Self {
        Failure { code: 4, kind: kind.into(), message: message.into() }
    }
}

impl From<lawson::Error> for Failure {
    fn from(e: lawson::Error) -> Self {
        use lawson::Error as E;
        let code = match e {
            E::InvalidParams(_) | E::Parse { .. } | E::MalformedGroup(_) => 2,
            E::NotClosed { .. } | E::NotOrientable | E::Disconnected { .. } | E::OddEuler { .. } => 4,
            _ => 3,
        };
        Failure { code, kind: e.kind().into(), message: e.to_string() }
    }
}

#[derive(Serialize)]
struct ErrorDocument<'a> {
    schema: u32,
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
    exit_code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let failure = Failure::usage("usage", message.trim_end());
            return emit_failure(&failure);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let outcome = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Orbifold(a) => cmd_orbifold(a),
        Command::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => emit_failure(&f),
    }
}

fn emit_failure(f: &Failure) -> ExitCode {
    let doc = ErrorDocument {
        schema: SCHEMA,
        error: ErrorBody { kind: &f.kind, message: &f.message, exit_code: f.code },
    };
    println!("{}", to_json(&doc));
    ExitCode::from(f.code)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports are plain data")
}

fn params_of(m: u32, k: u32) -> Result<LawsonParams, Failure> {
    Ok(LawsonParams::new(m, k)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct Projection {
    pole: [f64; 4],
    /// Applied to the surface before projecting, so the pole stays off it.
    view_rotation: [[f64; 4]; 4],
}

#[derive(Serialize)]
struct GenerateConfig {
    n: u32,
    refinements: u32,
    grad_tol: f64,
    weld_tol: f64,
    seed: u64,
}

#[derive(Serialize)]
struct GenerateChecks {
    genus_matches: bool,
    area_below_bound: bool,
    solver_converged: bool,
    area_monotone: bool,
    disk_in_tile: bool,
    symmetry_spot_check: bool,
}

impl GenerateChecks {
    fn failed(&self) -> Vec<&'static str> {
        let named = [
            ("genus_matches", self.genus_matches),
            ("area_below_bound", self.area_below_bound),
            ("solver_converged", self.solver_converged),
            ("area_monotone", self.area_monotone),
            ("disk_in_tile", self.disk_in_tile),
            ("symmetry_spot_check", self.symmetry_spot_check),
        ];
        named.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect()
    }
}

#[derive(Serialize)]
struct Files {
    obj: String,
    raw: String,
    report: String,
}

#[derive(Serialize)]
struct GenerateReport {
    schema: u32,
    command: &'static str,
    m: u32,
    k: u32,
    config: GenerateConfig,
    group_order: usize,
    tile_count: usize,
    vertices: usize,
    triangles: usize,
    euler_characteristic: i64,
    genus: i64,
    expected_genus: u64,
    #[serde(flatten)]
    energy: EnergyReport,
    chi_o: Rational,
    levels: Vec<LevelReport>,
    symmetry_defect: f64,
    projection: Projection,
    files: Files,
    checks: GenerateChecks,
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let params = params_of(args.params.m, args.params.k)?;
    let surface = build_surface(&params, &args.solve.build_config())?;
    let rotation = view_rotation(&params)?;
    let viewed = surface.mesh().transformed(&rotation);
    let obj = obj_string(&viewed)?;
    let raw = raw_string(surface.mesh());

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::usage("io", format!("{}: {e}", args.out_dir.display())))?;
    let stem = format!("lawson_{}_{}", params.m(), params.k());
    let obj_path = args.out_dir.join(format!("{stem}.obj"));
    let raw_path = args.out_dir.join(format!("{stem}.raw"));
    let report_path = args.out_dir.join(format!("{stem}.json"));

    let spot = symmetry_spot_check(&surface.group, surface.mesh(), args.seed, 256, 10.0 * args.solve.weld_tol);
    let checks = GenerateChecks {
        genus_matches: surface.genus as u64 == params.genus(),
        area_below_bound: surface.energy.bound_satisfied == Some(true),
        solver_converged: surface.levels.iter().all(|l| l.converged),
        area_monotone: surface.levels.iter().all(|l| l.monotone),
        disk_in_tile: surface.disk_contained,
        symmetry_spot_check: spot,
    };
    let report = GenerateReport {
        schema: SCHEMA,
        command: "generate",
        m: params.m(),
        k: params.k(),
        config: GenerateConfig {
            n: args.solve.n,
            refinements: args.solve.refinements,
            grad_tol: args.solve.grad_tol,
            weld_tol: args.solve.weld_tol,
            seed: args.seed,
        },
        group_order: surface.group.order(),
        tile_count: params.tile_count(),
        vertices: surface.mesh().vertex_count(),
        triangles: surface.mesh().triangles().len(),
        euler_characteristic: surface.euler_characteristic,
        genus: surface.genus,
        expected_genus: params.genus(),
        energy: surface.energy.clone(),
        chi_o: lawson_chi_o(&params),
        levels: surface.levels.clone(),
        symmetry_defect: symmetry_defect(&params, &surface.disk),
        projection: Projection {
            pole: pole().coords(),
            view_rotation: matrix_rows(&rotation),
        },
        files: Files {
            obj: obj_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            raw: raw_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            report: report_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        },
        checks,
    };
    let text = to_json(&report);
    write_file(&obj_path, &obj)?;
    write_file(&raw_path, &raw)?;
    write_file(&report_path, &format!("{text}\n"))?;
    println!("{text}");
    let failed = report.checks.failed();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::verification("checks_failed", failed.join(", ")))
    }
}

/// Map random vertices by random group elements and look for them on the mesh.
fn symmetry_spot_check(group: &Group, mesh: &lawson::TriMesh, seed: u64, samples: usize, tol: f64) -> bool {
    let vertices = mesh.vertices();
    if vertices.is_empty() {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<(usize, usize)> = (0..samples)
        .map(|_| (rng.gen_range(0..group.order()), rng.gen_range(0..vertices.len())))
        .collect();
    picks.iter().all(|&(g, v)| {
        let image = group.elements()[g].apply(&vertices[v]);
        vertices.iter().any(|w| w.distance(&image) < tol)
    })
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    schema: u32,
    command: &'static str,
    m: u32,
    k: u32,
    seed: u64,
    checks: Vec<Check>,
    passed: bool,
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let params = params_of(args.params.m, args.params.k)?;
    let group = match &args.group {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))?;
            Group::from_json(&text)?
        }
        None => lawson_group(&params)?,
    };
    if let Some(path) = &args.export_group {
        write_file(path, &group.to_json())?;
    }
    let mut checks = Vec::new();

    let expected_order = params.group_order();
    checks.push(Check {
        name: "group_order",
        passed: group.order() == expected_order,
        detail: format!("{} (expected {expected_order})", group.order()),
    });
    checks.push(match group.validate() {
        Ok(()) => Check { name: "group_closure", passed: true, detail: "closed under products and inverses".into() },
        Err(e) => Check { name: "group_closure", passed: false, detail: e.to_string() },
    });

    let tiles = TileIndex::all(&params);
    checks.push(Check {
        name: "tile_count",
        passed: tiles.len() == params.tile_count(),
        detail: format!("{} (expected {})", tiles.len(), params.tile_count()),
    });

    checks.push(match tile_orbits(&group, &params) {
        Ok(orbits) => {
            let sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
            Check {
                name: "tile_orbits",
                passed: sizes.len() == 2 && sizes.iter().all(|&s| s == expected_order),
                detail: format!("orbit sizes {sizes:?} (expected two of {expected_order})"),
            }
        }
        Err(e) => Check { name: "tile_orbits", passed: false, detail: e.to_string() },
    });

    let p_angle = PI / (params.m() as f64 + 1.0);
    let q_angle = PI / (params.k() as f64 + 1.0);
    let mut angle_error: f64 = 0.0;
    let mut edge_error: f64 = 0.0;
    for &idx in &tiles {
        let quad = quadrilateral(&params, idx);
        let a = quad.angles();
        angle_error = angle_error
            .max((a[0] - p_angle).abs())
            .max((a[2] - p_angle).abs())
            .max((a[1] - q_angle).abs())
            .max((a[3] - q_angle).abs());
        for len in quad.edge_lengths() {
            edge_error = edge_error.max((len - PI / 2.0).abs());
        }
    }
    checks.push(Check {
        name: "quad_angles",
        passed: angle_error < QUAD_TOL,
        detail: format!("P corners π/{}, Q corners π/{}, max error {angle_error:e}", params.m() + 1, params.k() + 1),
    });
    checks.push(Check {
        name: "quad_edges",
        passed: edge_error < QUAD_TOL,
        detail: format!("quarter circles, max error {edge_error:e}"),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut located = 0;
    let mut first_miss = None;
    for _ in 0..args.samples {
        let p = random_point(&mut rng);
        match locate_tile(&params, &p) {
            Ok(_) => located += 1,
            Err(e) => {
                first_miss.get_or_insert(e.to_string());
            }
        }
    }
    checks.push(Check {
        name: "tile_cover",
        passed: located == args.samples,
        detail: match first_miss {
            None => format!("{located}/{} random points in exactly one tile", args.samples),
            Some(e) => format!("{located}/{}; {e}", args.samples),
        },
    });

    let passed = checks.iter().all(|c| c.passed);
    if args.json {
        let report = VerifyReport {
            schema: SCHEMA,
            command: "verify",
            m: params.m(),
            k: params.k(),
            seed: args.seed,
            checks,
            passed,
        };
        println!("{}", to_json(&report));
    } else {
        for c in &checks {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::verification("checks_failed", "verification checks failed"))
    }
}

/// Uniform point on the 3-sphere by rejection from the unit ball.
fn random_point(rng: &mut ChaCha8Rng) -> Point4 {
    loop {
        let c: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n2: f64 = c.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return Point4::new(c[0] / n, c[1] / n, c[2] / n, c[3] / n);
        }
    }
}

#[derive(Serialize)]
struct PatternVerdicts {
    interior_only: lawson::orbifold::Verdict,
    vertex_touching: IntersectionPattern,
    partial_circles: lawson::orbifold::Propagation,
}

#[derive(Serialize)]
struct OrbifoldReport {
    schema: u32,
    command: &'static str,
    m: u32,
    k: u32,
    chi_o_local: Rational,
    chi_o_global: Rational,
    agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    lemma_verdicts: Option<PatternVerdicts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conclusion: Option<IntersectionPattern>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refused: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan: Option<ScanReport>,
}

#[derive(Serialize)]
struct ScanReport {
    max: u32,
    pairs: usize,
    chi_o_agree: usize,
    interior_only_excluded: usize,
    classified: usize,
    contains_all_circles: usize,
    failures: Vec<[u32; 2]>,
}

fn cmd_orbifold(args: &OrbifoldArgs) -> Result<(), Failure> {
    let params = params_of(args.params.m, args.params.k)?;
    let cert = certificate(&params)?;
    let scan = match args.max_scan {
        Some(max) => Some(scan(max)?),
        None => None,
    };
    let Certificate { m, k, chi_o_local, chi_o_global, agree, classification, refused } = cert;
    let (lemma_verdicts, conclusion) = match classification {
        Some(Classification { interior_only, vertex_touching, partial_circles, conclusion }) => (
            Some(PatternVerdicts { interior_only, vertex_touching, partial_circles }),
            Some(conclusion),
        ),
        None => (None, None),
    };
    let consistent = agree
        && conclusion.as_ref().is_none_or(|c| *c == IntersectionPattern::ContainsAllCircles)
        && scan.as_ref().is_none_or(|s| s.failures.is_empty());
    let report = OrbifoldReport {
        schema: SCHEMA,
        command: "orbifold",
        m,
        k,
        chi_o_local,
        chi_o_global,
        agree,
        lemma_verdicts,
        conclusion,
        refused,
        scan,
    };
    println!("{}", to_json(&report));
    if consistent {
        Ok(())
    } else {
        Err(Failure::verification("certificate_failed", "orbifold certificate is inconsistent"))
    }
}

fn scan(max: u32) -> Result<ScanReport, Failure> {
    let mut report = ScanReport {
        max,
        pairs: 0,
        chi_o_agree: 0,
        interior_only_excluded: 0,
        classified: 0,
        contains_all_circles: 0,
        failures: Vec::new(),
    };
    for m in 1..=max {
        for k in 1..=m {
            let cert = certificate(&LawsonParams::new(m, k)?)?;
            report.pairs += 1;
            let mut ok = cert.agree;
            if cert.agree {
                report.chi_o_agree += 1;
            }
            if let Some(c) = &cert.classification {
                report.classified += 1;
                if c.interior_only.is_excluded() {
                    report.interior_only_excluded += 1;
                } else {
                    ok = false;
                }
                if c.conclusion == IntersectionPattern::ContainsAllCircles {
                    report.contains_all_circles += 1;
                } else {
                    ok = false;
                }
            }
            if !ok {
                report.failures.push([m, k]);
            }
        }
    }
    info!("scanned {} pairs up to {max}", report.pairs);
    Ok(report)
}

#[derive(Serialize)]
struct Topology {
    vertices: usize,
    triangles: usize,
    closed: bool,
    orientable: bool,
    components: usize,
    euler_characteristic: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus_error: Option<String>,
    expected_genus: u64,
}

#[derive(Serialize)]
struct Report {
    schema: u32,
    command: &'static str,
    m: u32,
    k: u32,
    source: &'static str,
    group_order: usize,
    tile_count: usize,
    topology: Topology,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<EnergyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_error: Option<String>,
    invariant: bool,
    chi_o: Rational,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    levels: Vec<LevelReport>,
}

fn cmd_report(args: &ReportArgs) -> Result<(), Failure> {
    let params = params_of(args.params.m, args.params.k)?;
    let (closed, group, levels, source) = match &args.input {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage("io", format!("{}: {e}", path.display())))?;
            let mesh = parse_raw(&text)?;
            (ClosedMesh::from_mesh(mesh)?, lawson_group(&params)?, Vec::new(), "input")
        }
        None => {
            let surface = build_surface(&params, &args.solve.build_config())?;
            (surface.closed, surface.group, surface.levels, "built")
        }
    };
    let (genus, genus_error) = match closed.genus() {
        Ok(g) => (Some(g), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (energy, energy_error) = if closed.closed() {
        match willmore_energy(&closed, Some(&params)) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, Some("mesh is not closed".into()))
    };
    let report = Report {
        schema: SCHEMA,
        command: "report",
        m: params.m(),
        k: params.k(),
        source,
        group_order: group.order(),
        tile_count: params.tile_count(),
        topology: Topology {
            vertices: closed.mesh().vertex_count(),
            triangles: closed.mesh().triangles().len(),
            closed: closed.closed(),
            orientable: closed.orientable(),
            components: closed.component_count(),
            euler_characteristic: closed.euler_characteristic(),
            genus,
            genus_error,
            expected_genus: params.genus(),
        },
        energy,
        energy_error,
        invariant: is_invariant(closed.mesh(), &group, 10.0 * args.solve.weld_tol),
        chi_o: lawson_chi_o(&params),
        levels,
    };
    println!("{}", to_json(&report));
    Ok(())
}
