use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use conic_argyris::conic::Domain;
use conic_argyris::interp::{interpolate, Spline};
use conic_argyris::mesh::{generate_disk_mesh, Mesh};
use conic_argyris::nodal::HermiteData;
use conic_argyris::norms::{condition_residuals, continuity_report};
use conic_argyris::study::{run_study, StudyConfig};
use conic_argyris::testfn::TestFunction;
use conic_argyris::tolerances::{IDENTITY_REL, ORDER_SLACK};
use conic_argyris::Error;

const JUMP_SAMPLES: usize = 50;
const SELF_CHECK_POINTS: usize = 100;
const SELF_CHECK_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "conic-argyris", version, about = "C¹ Argyris-type interpolation on conic domains")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CONIC_ARGYRIS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mesh and validate conditions (A)-(F).
    Mesh {
        /// Domain JSON file, or `unit-disk`, or `ellipse:RX,RY`.
        #[arg(long)]
        domain: String,
        /// Number of boundary vertices.
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the validation report (default: stdout).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Interpolate a built-in test function on a mesh.
    Interpolate {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = IDENTITY_REL)]
        tol: f64,
    },
    /// Check C¹ continuity, vertex agreement and boundary vanishing.
    Check {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        spline: PathBuf,
        #[arg(long, default_value_t = IDENTITY_REL)]
        tol: f64,
    },
    /// Errors and observed orders over a sequence of meshes.
    Convergence {
        #[arg(long, default_value = "unit-disk")]
        domain: String,
        /// Comma-separated boundary vertex counts.
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
        levels: Vec<usize>,
        #[arg(long = "fn", default_value = "circle_sin")]
        function: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Orders pass at `expected - tol`.
        #[arg(long, default_value_t = ORDER_SLACK)]
        tol: f64,
    },
}

fn load_domain(spec: &str) -> Result<Domain, Error> {
    if spec == "unit-disk" {
        return Ok(Domain::unit_disk());
    }
    if let Some(rest) = spec.strip_prefix("ellipse:") {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad ellipse radii {rest:?}: {e}")))?;
        if let [rx, ry] = parts[..] {
            return Domain::ellipse(rx, ry);
        }
        return Err(Error::InvalidInput("expected ellipse:RX,RY".into()));
    }
    Domain::from_json(&fs::read_to_string(spec)?)
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn test_function(id: &str, domain: &Domain) -> Result<TestFunction, Error> {
    let f = TestFunction::lookup(id, domain)?;
    let worst = f.finite_difference_check(domain, SELF_CHECK_POINTS)?;
    if worst > SELF_CHECK_TOL {
        return Err(Error::InvalidInput(format!(
            "test function {id} fails its finite-difference self-check ({worst:e})"
        )));
    }
    Ok(f)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Mesh { domain, n, out, report } => {
            let d = load_domain(&domain)?;
            let mesh = generate_disk_mesh(&d, n)?;
            write(&out, &mesh.to_json()?)?;
            let v = mesh.validate();
            let text = serde_json::to_string_pretty(&json!({
                "mesh": out,
                "vertices": mesh.vertices.len(),
                "triangles": mesh.triangles.len(),
                "h": mesh.max_diameter(),
                "shape_regularity": mesh.shape_regularity()?,
                "validation": v,
                "passed": v.all_passed(),
            }))?;
            match report {
                Some(p) => write(&p, &text)?,
                None => println!("{text}"),
            }
            Ok(v.all_passed())
        }
        Command::Interpolate { mesh, function, out, tol } => {
            let m = Mesh::from_json(&read(&mesh)?)?;
            let u = test_function(&function, &m.domain)?;
            let s = interpolate(&m, &u)?;
            write(&out, &s.to_json()?)?;
            let res = condition_residuals(&m, &s, &u as &dyn HermiteData)?;
            let cont = continuity_report(&m, &s, JUMP_SAMPLES, tol)?;
            let passed = res.max() <= tol && cont.passed;
            print_json(&json!({
                "spline": out,
                "function": u.description,
                "residuals": res,
                "max_value_jump": cont.max_value_jump,
                "max_normal_jump": cont.max_normal_jump,
                "vertex_mismatch": cont.vertex_mismatch,
                "boundary_trace": cont.boundary_trace,
                "tolerance": tol,
                "passed": passed,
            }));
            Ok(passed)
        }
        Command::Check { mesh, spline, tol } => {
            let m = Mesh::from_json(&read(&mesh)?)?;
            let s = Spline::from_json(&read(&spline)?)?;
            let r = continuity_report(&m, &s, JUMP_SAMPLES, tol)?;
            print_json(&serde_json::to_value(&r)?);
            Ok(r.passed)
        }
        Command::Convergence { domain, levels, function, out, format, tol } => {
            let d = load_domain(&domain)?;
            test_function(&function, &d)?;
            let mut cfg = StudyConfig::new(levels, &function);
            cfg.slack = tol;
            let r = run_study(&d, &cfg)?;
            let text = match format {
                Format::Csv => r.to_csv(),
                Format::Json => r.to_json()?,
            };
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            for row in &r.rows {
                eprintln!(
                    "n={:<4} h={:.4e} R={:.3} L2={:.3e} H1={:.3e} H2={:.3e}",
                    row.n_boundary, row.h, row.shape_regularity, row.errors[0], row.errors[1], row.errors[2]
                );
            }
            if let Some(o) = r.rows.last().and_then(|row| row.orders) {
                eprintln!(
                    "finest-pair orders: L2 {:.3} (>= {}), H1 {:.3} (>= {}), H2 {:.3} (>= {})",
                    o[0], r.thresholds[0], o[1], r.thresholds[1], o[2], r.thresholds[2]
                );
            }
            Ok(r.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
