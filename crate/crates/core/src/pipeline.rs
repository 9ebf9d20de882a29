//! Mesh, level set, assembly, time loop and error analysis for one or many mesh sizes.

use crate::analysis::{
    level_integrals, nested_reference_steps, self_convergence_errors, ConvergenceReport, ErrorRecord,
    NormAccumulator,
};
use crate::cases::TestCase;
use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::levelset::ClassificationSummary;
use crate::mesh::{build_background_mesh, BoxDomain, Mesh};
use crate::scalar::Real;
use crate::solver::{advance, solve_heat, steps_for, DtRule, HeatProblem, SolverOptions, TimeGrid, Trajectory};
use crate::sparse::SolverKind;

/// Everything except the case itself.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSettings<T> {
    pub k: usize,
    pub l: usize,
    pub sigma: T,
    /// Subdivisions per axis, one run each.
    pub ladder: Vec<usize>,
    pub dt_rule: DtRule,
    pub final_time: T,
    pub domain: Option<BoxDomain<T>>,
    pub solver: SolverKind,
    pub residual_tolerance: T,
    /// Reference resolution for cases without an exact solution.
    pub reference_n: Option<usize>,
    /// Keep only running error sums instead of every time level.
    pub streaming: bool,
}

impl<T: Real> RunSettings<T> {
    /// Defaults of the headline experiment: k=1, l=2, sigma=1, dt = h.
    pub fn new(ladder: Vec<usize>) -> Self {
        Self {
            k: 1,
            l: 2,
            sigma: T::one(),
            ladder,
            dt_rule: DtRule::H,
            final_time: T::one(),
            domain: None,
            solver: SolverKind::Direct,
            residual_tolerance: T::residual_tolerance(),
            reference_n: None,
            streaming: false,
        }
    }

    /// Collects every violated constraint.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if !(1..=2).contains(&self.k) {
            v.push(format!("k must be 1 or 2, got {}", self.k));
        }
        if self.l < self.k || self.l > 4 {
            v.push(format!("l must satisfy k <= l <= 4, got l = {} with k = {}", self.l, self.k));
        }
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            v.push(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(self.final_time > T::zero()) || !self.final_time.is_finite() {
            v.push(format!("final time must be positive, got {}", self.final_time));
        }
        if self.ladder.is_empty() {
            v.push("at least one mesh size is required".into());
        }
        if self.ladder.contains(&0) {
            v.push("subdivision counts must be positive".into());
        }
        if self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            v.push(format!("ladder must be strictly increasing, got {:?}", self.ladder));
        }
        if let Some(r) = self.reference_n {
            if self.ladder.last().is_some_and(|&m| r <= m) {
                v.push(format!("reference n = {r} must exceed every ladder entry"));
            }
        }
        if !(self.residual_tolerance > T::zero()) {
            v.push("residual tolerance must be positive".into());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    fn options(&self) -> SolverOptions<T> {
        SolverOptions {
            kind: self.solver,
            residual_tolerance: self.residual_tolerance,
        }
    }
}

fn domain_for<'a, T: Real>(case: &'a TestCase<T>, settings: &'a RunSettings<T>) -> Result<&'a BoxDomain<T>> {
    let d = settings.domain.as_ref().unwrap_or(&case.domain);
    if d.dim() != case.dim() {
        return Err(Error::InvalidInput(format!(
            "box of dimension {} given for a {}-dimensional case",
            d.dim(),
            case.dim()
        )));
    }
    Ok(d)
}

pub fn discretize<T: Real>(case: &TestCase<T>, settings: &RunSettings<T>, n: usize) -> Result<Discretization<T>> {
    let mesh = build_background_mesh(domain_for(case, settings)?, n)?;
    Discretization::new(mesh, &case.levelset, settings.k, settings.l)
}

/// Mesh and classification only.
pub fn inspect<T: Real>(case: &TestCase<T>, settings: &RunSettings<T>, n: usize) -> Result<(Mesh<T>, ClassificationSummary, usize)> {
    let disc = discretize(case, settings, n)?;
    Ok((disc.mesh().clone(), disc.classification().summary(), disc.n_dofs()))
}

/// One run together with what it produced.
#[derive(Debug)]
pub struct PointResult<T> {
    pub record: ErrorRecord,
    pub summary: ClassificationSummary,
    pub warnings: Vec<String>,
    pub max_residual: f64,
    pub trajectory: Option<Trajectory<T>>,
}

fn record_for<T: Real>(
    case: &TestCase<T>,
    settings: &RunSettings<T>,
    n: usize,
    disc: &Discretization<T>,
    grid: &TimeGrid<T>,
) -> ErrorRecord {
    ErrorRecord {
        case: case.name.clone(),
        k: settings.k,
        l: settings.l,
        sigma: settings.sigma.to_f64_lossy(),
        dt_rule: settings.dt_rule.to_string(),
        n,
        h: disc.h().to_f64_lossy(),
        dt: grid.dt().to_f64_lossy(),
        n_dofs: disc.n_dofs(),
        err_l2h1: f64::NAN,
        err_linfl2: f64::NAN,
        timings: Default::default(),
    }
}

/// Runs one mesh size against the case's exact solution; errors are accumulated while stepping.
pub fn run_exact<T: Real>(
    case: &TestCase<T>,
    settings: &RunSettings<T>,
    n: usize,
    keep_trajectory: bool,
) -> Result<PointResult<T>> {
    settings.validate()?;
    let exact = case
        .exact
        .as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("case '{}' has no exact solution", case.name)))?;
    let disc = discretize(case, settings, n)?;
    let grid = TimeGrid::from_rule(settings.final_time, disc.h(), settings.dt_rule)?;
    log::info!(
        "{} n={n}: h={:.4e} dt={:.4e} steps={} dofs={}",
        case.name,
        disc.h().to_f64_lossy(),
        grid.dt().to_f64_lossy(),
        grid.steps,
        disc.n_dofs()
    );
    let source = |x: &crate::Point<T>, t: T| (case.source)(x, t);
    let initial = |x: &crate::Point<T>| (case.initial)(x);
    let problem = HeatProblem {
        disc: &disc,
        sigma: settings.sigma,
        grid,
        source: &source,
        initial: &initial,
    };
    let mut acc = NormAccumulator::default();
    let mut kept_initial = Vec::new();
    let mut kept = Vec::new();
    let dt = grid.dt().to_f64_lossy();
    let diag = advance(&problem, &settings.options(), |step, t, field| {
        acc.push(dt, level_integrals(&disc, field, exact, t));
        if keep_trajectory {
            if step == 0 {
                kept_initial = field.coefficients().to_vec();
            } else {
                kept.push(field.coefficients().to_vec());
            }
        }
        Ok(())
    })?;
    for w in &diag.warnings {
        log::warn!("{w}");
    }
    let mut record = record_for(case, settings, n, &disc, &grid);
    record.err_l2h1 = acc.l2h1()?;
    record.err_linfl2 = acc.linfl2()?;
    record.timings = diag.timings;
    Ok(PointResult {
        record,
        summary: disc.classification().summary(),
        warnings: diag.warnings.clone(),
        max_residual: diag.max_residual,
        trajectory: keep_trajectory.then(|| Trajectory {
            initial: kept_initial,
            steps: kept,
            diagnostics: diag,
        }),
    })
}

/// Result of a ladder: the report plus per-run diagnostics.
#[derive(Debug)]
pub struct LadderResult {
    pub report: ConvergenceReport,
    pub summaries: Vec<ClassificationSummary>,
    pub warnings: Vec<String>,
    pub max_residual: f64,
}

/// Exact-solution convergence study over `settings.ladder`.
pub fn run_exact_ladder<T: Real>(case: &TestCase<T>, settings: &RunSettings<T>) -> Result<Vec<PointResult<T>>> {
    settings.validate()?;
    settings
        .ladder
        .iter()
        .map(|&n| run_exact(case, settings, n, !settings.streaming))
        .collect()
}

/// Self-convergence study: the finest resolution serves as reference
/// (`reference_n`, or else the last ladder entry).
pub fn run_self_convergence<T: Real>(case: &TestCase<T>, settings: &RunSettings<T>) -> Result<Vec<PointResult<T>>> {
    settings.validate()?;
    let mut coarse_ns = settings.ladder.clone();
    let n_ref = match settings.reference_n {
        Some(r) => r,
        None => {
            if coarse_ns.len() < 2 {
                return Err(Error::InvalidConfig(vec![
                    "self-convergence needs a reference resolution and at least one coarser mesh".into(),
                ]));
            }
            coarse_ns.pop().unwrap()
        }
    };
    let domain = domain_for(case, settings)?;
    let mut coarse_steps = Vec::new();
    for &n in &coarse_ns {
        let h = build_background_mesh(domain, n)?.h();
        coarse_steps.push(steps_for(settings.final_time, h, settings.dt_rule)?);
    }
    let reference = discretize(case, settings, n_ref)?;
    let min_ref = steps_for(settings.final_time, reference.h(), settings.dt_rule)?;
    let ref_grid = TimeGrid::new(settings.final_time, nested_reference_steps(&coarse_steps, min_ref))?;
    log::info!(
        "{} reference n={n_ref}: h={:.4e} steps={} dofs={}",
        case.name,
        reference.h().to_f64_lossy(),
        ref_grid.steps,
        reference.n_dofs()
    );
    let ref_traj = solve_case(case, settings, &reference, ref_grid)?;

    let mut out = Vec::new();
    for (&n, &steps) in coarse_ns.iter().zip(&coarse_steps) {
        let disc = discretize(case, settings, n)?;
        let grid = TimeGrid::new(settings.final_time, steps)?;
        log::info!(
            "{} n={n}: h={:.4e} dt={:.4e} steps={} dofs={}",
            case.name,
            disc.h().to_f64_lossy(),
            grid.dt().to_f64_lossy(),
            grid.steps,
            disc.n_dofs()
        );
        let traj = solve_case(case, settings, &disc, grid)?;
        let (e1, e2) = self_convergence_errors(&disc, &traj, &reference, &ref_traj, settings.final_time)?;
        let mut record = record_for(case, settings, n, &disc, &grid);
        record.err_l2h1 = e1;
        record.err_linfl2 = e2;
        record.timings = traj.diagnostics.timings;
        out.push(PointResult {
            record,
            summary: disc.classification().summary(),
            warnings: traj.diagnostics.warnings.clone(),
            max_residual: traj.diagnostics.max_residual,
            trajectory: None,
        });
    }
    Ok(out)
}

fn solve_case<T: Real>(
    case: &TestCase<T>,
    settings: &RunSettings<T>,
    disc: &Discretization<T>,
    grid: TimeGrid<T>,
) -> Result<Trajectory<T>> {
    let source = |x: &crate::Point<T>, t: T| (case.source)(x, t);
    let initial = |x: &crate::Point<T>| (case.initial)(x);
    let traj = solve_heat(
        &HeatProblem {
            disc,
            sigma: settings.sigma,
            grid,
            source: &source,
            initial: &initial,
        },
        &settings.options(),
    )?;
    for w in &traj.diagnostics.warnings {
        log::warn!("{w}");
    }
    Ok(traj)
}

/// Exact-solution ladder or self-convergence, depending on the case.
pub fn run_ladder<T: Real>(case: &TestCase<T>, settings: &RunSettings<T>) -> Result<LadderResult> {
    let points = if case.exact.is_some() {
        run_exact_ladder(case, settings)?
    } else {
        run_self_convergence(case, settings)?
    };
    let summaries = points.iter().map(|p| p.summary).collect();
    let warnings = points.iter().flat_map(|p| p.warnings.clone()).collect();
    let max_residual = points.iter().map(|p| p.max_residual).fold(0.0, f64::max);
    let records: Vec<ErrorRecord> = points.into_iter().map(|p| p.record).collect();
    let report = if records.len() >= 2 {
        ConvergenceReport::new(records)?
    } else {
        ConvergenceReport {
            records,
            orders: Default::default(),
        }
    };
    Ok(LadderResult {
        report,
        summaries,
        warnings,
        max_residual,
    })
}

/// One record per stabilization parameter, all other settings fixed.
pub fn sweep_sigma<T: Real>(case: &TestCase<T>, settings: &RunSettings<T>, sigmas: &[T]) -> Result<Vec<ErrorRecord>> {
    let mut out = Vec::new();
    for &s in sigmas {
        let mut st = settings.clone();
        st.sigma = s;
        out.extend(run_ladder(case, &st)?.report.records);
    }
    Ok(out)
}

/// One ladder per level-set degree.
pub fn sweep_l<T: Real>(case: &TestCase<T>, settings: &RunSettings<T>, ls: &[usize]) -> Result<Vec<LadderResult>> {
    ls.iter()
        .map(|&l| {
            let mut st = settings.clone();
            st.l = l;
            run_ladder(case, &st)
        })
        .collect()
}
