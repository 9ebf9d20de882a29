//! Command-line driver: single runs, convergence ladders, parameter sweeps and mesh inspection.

use clap::{Args, Parser, Subcommand, ValueEnum};
use phifem::analysis::{write_csv, FittedOrders};
use phifem::assembly::assemble_lhs;
use phifem::pipeline::{discretize, inspect, run_ladder, sweep_l, LadderResult};
use phifem::solver::TimeGrid;
use phifem::{builtin_case, BoxDomain, CaseConfig, DtRule, Error, ErrorRecord, Real, RunSettings, SolverKind, TestCase};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "phifem", version, about = "Level-set finite elements for the heat equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One mesh size or a convergence ladder; writes one CSV row per mesh.
    Run(RunArgs),
    /// Repeats a ladder for several values of sigma or of the level-set degree.
    Sweep(SweepArgs),
    /// Mesh, classification and dof counts without solving.
    Info(InfoArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SolverChoice {
    Direct,
    Iterative,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Precision {
    F64,
    F32,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    Sigma,
    L,
}

#[derive(Args, Debug, Clone)]
struct CaseArgs {
    /// Built-in case (circle, popcorn).
    #[arg(long, default_value = "circle", conflicts_with = "config")]
    case: String,
    /// TOML file describing a custom case.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Background box as lower corner then upper corner, e.g. -1.5,-1.5,1.5,1.5.
    #[arg(long = "box", value_delimiter = ',', allow_negative_numbers = true)]
    bbox: Option<Vec<f64>>,
    /// Scalar type of the computation.
    #[arg(long, value_enum, default_value = "f64")]
    precision: Precision,
}

#[derive(Args, Debug, Clone)]
struct SolveArgs {
    /// Polynomial degree of the unknown.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Polynomial degree of the level-set interpolant [default: k + 1].
    #[arg(long)]
    l: Option<usize>,
    /// Stabilization parameter [default: from the case, 1].
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Single mesh: subdivisions per axis.
    #[arg(long, conflicts_with = "ladder")]
    n: Option<usize>,
    /// Mesh ladder, strictly increasing [default: 8,16,32,64,128].
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<usize>>,
    /// Time step rule dt = h^(p/q), given as p, p/q or h^p/q [default: from the case, 1].
    #[arg(long)]
    dt_rule: Option<DtRule>,
    /// Final time [default: from the case, 1].
    #[arg(long, allow_negative_numbers = true)]
    final_time: Option<f64>,
    #[arg(long, value_enum, default_value = "direct")]
    solver: SolverChoice,
    /// GMRES restart length.
    #[arg(long, default_value_t = 50)]
    restart: usize,
    /// GMRES iteration cap per step.
    #[arg(long, default_value_t = 2000)]
    max_iterations: usize,
    /// Required relative residual of every linear solve [default: 1e-10 in double precision].
    #[arg(long, allow_negative_numbers = true)]
    residual_tolerance: Option<f64>,
    /// Reference resolution when the case has no exact solution [default: last ladder entry].
    #[arg(long)]
    reference_n: Option<usize>,
    /// Keep only running error sums instead of the whole trajectory.
    #[arg(long)]
    streaming: bool,
    /// CSV destination [default: standard output].
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Append rows to an existing CSV instead of overwriting it.
    #[arg(long)]
    append: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[command(flatten)]
    solve: SolveArgs,
    /// Repeat the run for each sigma in the list.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    sweep_sigma: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Parameter to vary.
    #[arg(value_enum)]
    param: SweepParam,
    /// Values of the parameter.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    values: Vec<f64>,
    #[command(flatten)]
    case: CaseArgs,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Args, Debug)]
struct InfoArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Write the background mesh as text.
    #[arg(long)]
    dump_mesh: Option<PathBuf>,
    /// Write the time-step matrix in coordinate format.
    #[arg(long)]
    export_matrix: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long)]
    dt_rule: Option<DtRule>,
    #[arg(long, allow_negative_numbers = true)]
    final_time: Option<f64>,
}

const DEFAULT_LADDER: [usize; 5] = [8, 16, 32, 64, 128];

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

fn load_case<T: Real>(args: &CaseArgs) -> Result<TestCase<T>, Error> {
    let mut case = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            CaseConfig::from_toml(&text)?.build()?
        }
        None => builtin_case(&args.case)?,
    };
    if let Some(b) = &args.bbox {
        let d = b.len() / 2;
        if b.len() % 2 != 0 || d != case.dim() {
            return Err(Error::InvalidInput(format!(
                "--box needs {} numbers (lower corner then upper corner), got {}",
                2 * case.dim(),
                b.len()
            )));
        }
        let lit: Vec<T> = b.iter().map(|&v| T::lit(v)).collect();
        case.domain = BoxDomain::new(&lit[..d], &lit[d..])?;
    }
    Ok(case)
}

fn settings<T: Real>(case: &TestCase<T>, a: &SolveArgs) -> Result<RunSettings<T>, Error> {
    let ladder = match (a.n, &a.ladder) {
        (Some(n), _) => vec![n],
        (None, Some(l)) => l.clone(),
        (None, None) => DEFAULT_LADDER.to_vec(),
    };
    let mut s = RunSettings::new(ladder);
    s.k = a.k;
    s.l = a.l.unwrap_or(a.k + 1);
    s.sigma = a.sigma.map(T::lit).unwrap_or(case.sigma);
    s.dt_rule = a.dt_rule.unwrap_or(case.dt_rule);
    s.final_time = a.final_time.map(T::lit).unwrap_or(case.final_time);
    s.solver = match a.solver {
        SolverChoice::Direct => SolverKind::Direct,
        SolverChoice::Iterative => SolverKind::Iterative {
            restart: a.restart,
            max_iterations: a.max_iterations,
        },
    };
    if let Some(t) = a.residual_tolerance {
        s.residual_tolerance = T::lit(t);
    }
    s.reference_n = a.reference_n;
    s.streaming = a.streaming;
    s.validate()?;
    Ok(s)
}

fn write_records(a: &SolveArgs, records: &[ErrorRecord]) -> Result<(), Error> {
    match &a.output {
        None => {
            let stdout = std::io::stdout();
            write_csv(stdout.lock(), records)?;
        }
        Some(path) => {
            let fresh = !a.append || std::fs::metadata(path).map_or(true, |m| m.len() == 0);
            let file = if a.append {
                OpenOptions::new().create(true).append(true).open(path)
            } else {
                File::create(path)
            }
            .map_err(|e| io_err(path, e))?;
            let mut out = BufWriter::new(file);
            if fresh {
                write_csv(&mut out, records)?;
            } else {
                for r in records {
                    writeln!(out, "{}", r.csv_row())?;
                }
            }
            out.flush()?;
            log::info!("wrote {} rows to {}", records.len(), path.display());
        }
    }
    Ok(())
}

fn order(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.3}"))
}

fn report(title: &str, res: &LadderResult) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "== {title}");
    for (r, s) in res.report.records.iter().zip(&res.summaries) {
        let _ = writeln!(
            err,
            "n={:<4} h={:.4e} dt={:.4e} ndofs={:<8} active={} cut={} ghost={}  l2h1={:.4e} linfl2={:.4e}  \
             assemble={:.2}s factor={:.2}s solve={:.2}s",
            r.n,
            r.h,
            r.dt,
            r.n_dofs,
            s.active_cells,
            s.cut_cells,
            s.ghost_facets,
            r.err_l2h1,
            r.err_linfl2,
            r.timings.assemble,
            r.timings.factor,
            r.timings.solve
        );
    }
    let FittedOrders {
        l2h1,
        linfl2,
        l2h1_all,
        linfl2_all,
    } = res.report.orders;
    let _ = writeln!(
        err,
        "fitted order l2(H1) {} (all points {}), linf(L2) {} (all points {})",
        order(l2h1),
        order(l2h1_all),
        order(linfl2),
        order(linfl2_all)
    );
    let _ = writeln!(err, "max relative residual {:.3e}", res.max_residual);
    let mut seen = Vec::new();
    for w in &res.warnings {
        if !seen.contains(w) {
            let _ = writeln!(err, "warning: {w}");
            seen.push(w.clone());
        }
    }
}

fn run<T: Real>(args: &RunArgs) -> Result<(), Error> {
    let case = load_case::<T>(&args.case)?;
    let base = settings(&case, &args.solve)?;
    let mut records = Vec::new();
    match &args.sweep_sigma {
        None => {
            let res = run_ladder(&case, &base)?;
            report(&format!("{} k={} l={} sigma={} dt={}", case.name, base.k, base.l, base.sigma, base.dt_rule), &res);
            records.extend(res.report.records);
        }
        Some(sigmas) => {
            for &sigma in sigmas {
                let mut s = base.clone();
                s.sigma = T::lit(sigma);
                s.validate()?;
                let res = run_ladder(&case, &s)?;
                report(&format!("{} k={} l={} sigma={sigma} dt={}", case.name, s.k, s.l, s.dt_rule), &res);
                records.extend(res.report.records);
            }
        }
    }
    write_records(&args.solve, &records)
}

fn sweep<T: Real>(args: &SweepArgs) -> Result<(), Error> {
    let case = load_case::<T>(&args.case)?;
    let base = settings(&case, &args.solve)?;
    let mut records = Vec::new();
    match args.param {
        SweepParam::Sigma => {
            for &sigma in &args.values {
                let mut s = base.clone();
                s.sigma = T::lit(sigma);
                s.validate()?;
                let res = run_ladder(&case, &s)?;
                report(&format!("{} sigma={sigma}", case.name), &res);
                records.extend(res.report.records);
            }
        }
        SweepParam::L => {
            let mut ls = Vec::new();
            for &v in &args.values {
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(Error::InvalidInput(format!("level-set degree must be a positive integer, got {v}")));
                }
                ls.push(v as usize);
            }
            for (l, res) in ls.iter().zip(sweep_l(&case, &base, &ls)?) {
                report(&format!("{} l={l}", case.name), &res);
                records.extend(res.report.records);
            }
        }
    }
    write_records(&args.solve, &records)
}

fn info<T: Real>(args: &InfoArgs) -> Result<(), Error> {
    let case = load_case::<T>(&args.case)?;
    let mut s = RunSettings::<T>::new(vec![args.n]);
    s.k = args.k;
    s.l = args.l.unwrap_or(args.k + 1);
    s.sigma = args.sigma.map(T::lit).unwrap_or(case.sigma);
    s.dt_rule = args.dt_rule.unwrap_or(case.dt_rule);
    s.final_time = args.final_time.map(T::lit).unwrap_or(case.final_time);
    s.validate()?;
    let (mesh, summary, ndofs) = inspect(&case, &s, args.n)?;
    let grid = TimeGrid::from_rule(s.final_time, mesh.h(), s.dt_rule)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "case             : {}", case.name)?;
    writeln!(out, "dimension        : {}", case.dim())?;
    writeln!(out, "subdivisions     : {}", args.n)?;
    writeln!(out, "vertices         : {}", mesh.num_vertices())?;
    writeln!(out, "facets           : {}", mesh.num_facets())?;
    writeln!(out, "h                : {:.6e}", mesh.h())?;
    writeln!(out, "{:<17}: {:.6e} ({} steps)", format!("dt ({})", s.dt_rule), grid.dt(), grid.steps)?;
    writeln!(out, "{}", summary.to_string().trim_end())?;
    writeln!(out, "dofs (k={})       : {ndofs}", s.k)?;
    if let Some(path) = &args.dump_mesh {
        let f = File::create(path).map_err(|e| io_err(path, e))?;
        mesh.write_text(BufWriter::new(f))?;
        writeln!(out, "mesh written to {}", path.display())?;
    }
    if let Some(path) = &args.export_matrix {
        let disc = discretize(&case, &s, args.n)?;
        let system = assemble_lhs(&disc, s.sigma, grid.dt())?;
        let f = File::create(path).map_err(|e| io_err(path, e))?;
        system.write_matrix(BufWriter::new(f))?;
        writeln!(out, "matrix ({} nonzeros) written to {}", system.matrix.nnz(), path.display())?;
    }
    Ok(())
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("PHIFEM_NUM_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::InvalidInput(format!("PHIFEM_NUM_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Error> {
    configure_threads()?;
    let precision = match &cli.command {
        Command::Run(a) => a.case.precision,
        Command::Sweep(a) => a.case.precision,
        Command::Info(a) => a.case.precision,
    };
    match (&cli.command, precision) {
        (Command::Run(a), Precision::F64) => run::<f64>(a),
        (Command::Run(a), Precision::F32) => run::<f32>(a),
        (Command::Sweep(a), Precision::F64) => sweep::<f64>(a),
        (Command::Sweep(a), Precision::F32) => sweep::<f32>(a),
        (Command::Info(a), Precision::F64) => info::<f64>(a),
        (Command::Info(a), Precision::F32) => info::<f32>(a),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::InvalidConfig(_) | Error::Expression(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
