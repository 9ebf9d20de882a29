//! Time grids and the implicit Euler loop.

use crate::assembly::{assemble_lhs, RhsBuilder, SourceFn};
use crate::discretization::{DiscreteField, Discretization};
use crate::error::{Error, Result};
use crate::scalar::{Point, Real};
use crate::sparse::{Factorization, SolverKind};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// `dt = h^(num/den)` before rounding to an integer number of steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DtRule {
    pub num: u32,
    pub den: u32,
}

impl DtRule {
    pub const H: DtRule = DtRule { num: 1, den: 1 };
    pub const H2: DtRule = DtRule { num: 2, den: 1 };
    pub const H3: DtRule = DtRule { num: 3, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidInput(format!("dt exponent {num}/{den} must be positive")));
        }
        let g = gcd(num, den);
        Ok(DtRule {
            num: num / g,
            den: den / g,
        })
    }

    pub fn exponent<T: Real>(&self) -> T {
        T::from_count(self.num as usize) / T::from_count(self.den as usize)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for DtRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (1, 1) => write!(f, "h"),
            (p, 1) => write!(f, "h^{p}"),
            (p, q) => write!(f, "h^{p}/{q}"),
        }
    }
}

impl FromStr for DtRule {
    type Err = Error;

    /// Accepts the bare exponent (`1`, `2`, `3/2`) or `h`, `h^2`, `h2`, `h^3/2`, `h^(3/2)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unrecognised dt rule '{s}' (expected p, p/q, h or h^p/q)"));
        let t = s.trim();
        let rest = match t.strip_prefix('h') {
            Some("") => return Ok(DtRule::H),
            Some(r) => r,
            None if t.is_empty() => return Err(bad()),
            None => t,
        };
        let rest = rest.strip_prefix('^').unwrap_or(rest);
        let rest = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(rest);
        let (p, q) = match rest.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (rest.trim(), "1"),
        };
        let p: u32 = p.parse().map_err(|_| bad())?;
        let q: u32 = q.parse().map_err(|_| bad())?;
        DtRule::new(p, q)
    }
}

/// Uniform grid `t_n = n T / N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid<T> {
    pub final_time: T,
    pub steps: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(final_time: T, steps: usize) -> Result<Self> {
        if !(final_time > T::zero()) || !final_time.is_finite() {
            return Err(Error::InvalidInput(format!("final time must be positive, got {final_time}")));
        }
        if steps == 0 {
            return Err(Error::InvalidInput("number of time steps must be positive".into()));
        }
        Ok(Self { final_time, steps })
    }

    /// `N = ceil(T / h^p)`, with ratios within rounding of an integer snapped to it.
    pub fn from_rule(final_time: T, h: T, rule: DtRule) -> Result<Self> {
        let steps = steps_for(final_time, h, rule)?;
        Self::new(final_time, steps)
    }

    pub fn dt(&self) -> T {
        self.final_time / T::from_count(self.steps)
    }

    pub fn time(&self, n: usize) -> T {
        self.final_time * T::from_count(n) / T::from_count(self.steps)
    }
}

pub fn steps_for<T: Real>(final_time: T, h: T, rule: DtRule) -> Result<usize> {
    if !(h > T::zero()) {
        return Err(Error::InvalidInput(format!("mesh size must be positive, got {h}")));
    }
    let ratio = (final_time / h.powf(rule.exponent())).to_f64_lossy();
    if !ratio.is_finite() || ratio > 1e12 {
        return Err(Error::InvalidInput(format!("time step count {ratio} out of range")));
    }
    let snapped = ratio.round();
    let n = if (ratio - snapped).abs() <= 1e-9 * ratio.max(1.0) {
        snapped
    } else {
        ratio.ceil()
    };
    Ok((n as usize).max(1))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions<T> {
    pub kind: SolverKind,
    /// Relative residual every step must reach.
    pub residual_tolerance: T,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            kind: SolverKind::Direct,
            residual_tolerance: T::residual_tolerance(),
        }
    }
}

/// Wall-clock seconds per phase.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub assemble: f64,
    pub factor: f64,
    pub solve: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub steps: usize,
    pub n_dofs: usize,
    pub max_residual: f64,
    pub timings: Timings,
    pub warnings: Vec<String>,
}

/// Inputs of one heat-equation solve.
pub struct HeatProblem<'a, T> {
    pub disc: &'a Discretization<T>,
    pub sigma: T,
    pub grid: TimeGrid<T>,
    pub source: SourceFn<'a, T>,
    pub initial: &'a (dyn Fn(&Point<T>) -> T + Sync),
}

/// All time levels: `initial` holds `V_h` coefficients, `steps[n-1]` holds `w^n`.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub initial: Vec<T>,
    pub steps: Vec<Vec<T>>,
    pub diagnostics: Diagnostics,
}

impl<T: Real> Trajectory<T> {
    pub fn field(&self, n: usize) -> DiscreteField<'_, T> {
        if n == 0 {
            DiscreteField::Nodal(&self.initial)
        } else {
            DiscreteField::PhiTimes(&self.steps[n - 1])
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Warning emitted when the time step drops below `c h^2` with `c = 1`.
pub fn small_step_warning<T: Real>(dt: T, h: T) -> Option<String> {
    (dt < h * h).then(|| {
        format!("time step {dt:e} is below h^2 = {:e}; the stabilization may degrade", h * h)
    })
}

/// Runs the loop and hands every time level to `observer(n, t_n, field)`.
pub fn advance<T: Real>(
    problem: &HeatProblem<'_, T>,
    options: &SolverOptions<T>,
    mut observer: impl FnMut(usize, T, DiscreteField<'_, T>) -> Result<()>,
) -> Result<Diagnostics> {
    let disc = problem.disc;
    let grid = problem.grid;
    let dt = grid.dt();
    let mut diag = Diagnostics {
        steps: grid.steps,
        n_dofs: disc.n_dofs(),
        ..Default::default()
    };
    if let Some(w) = small_step_warning(dt, disc.h()) {
        diag.warnings.push(w);
    }

    let clock = Instant::now();
    let system = assemble_lhs(disc, problem.sigma, dt)?;
    let rhs = RhsBuilder::new(disc, problem.sigma, dt)?;
    diag.timings.assemble += clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let fact = Factorization::new(&system.matrix, options.kind, options.residual_tolerance)?;
    diag.timings.factor = clock.elapsed().as_secs_f64();

    let u0 = disc.interpolate(problem.initial)?;
    observer(0, T::zero(), DiscreteField::Nodal(&u0))?;
    let mut w: Vec<T> = Vec::new();
    for n in 1..=grid.steps {
        let t = grid.time(n);
        let clock = Instant::now();
        let prev = if n == 1 {
            DiscreteField::Nodal(&u0)
        } else {
            DiscreteField::PhiTimes(&w)
        };
        let b = rhs.build(prev, problem.source, t)?;
        diag.timings.assemble += clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let guess = (n > 1).then_some(w.as_slice());
        let (x, res) = fact.solve(&system.matrix, &b, guess, options.residual_tolerance)?;
        diag.timings.solve += clock.elapsed().as_secs_f64();
        let res = res.to_f64_lossy();
        if !(res <= options.residual_tolerance.to_f64_lossy()) {
            return Err(Error::ResidualTooLarge {
                step: n,
                residual: res,
                tolerance: options.residual_tolerance.to_f64_lossy(),
            });
        }
        diag.max_residual = diag.max_residual.max(res);
        w = x;
        observer(n, t, DiscreteField::PhiTimes(&w))?;
    }
    Ok(diag)
}

/// Runs the loop and keeps every time level.
pub fn solve_heat<T: Real>(problem: &HeatProblem<'_, T>, options: &SolverOptions<T>) -> Result<Trajectory<T>> {
    let mut initial = Vec::new();
    let mut steps = Vec::with_capacity(problem.grid.steps);
    let diagnostics = advance(problem, options, |n, _, field| {
        if n == 0 {
            initial = field.coefficients().to_vec();
        } else {
            steps.push(field.coefficients().to_vec());
        }
        Ok(())
    })?;
    Ok(Trajectory {
        initial,
        steps,
        diagnostics,
    })
}
