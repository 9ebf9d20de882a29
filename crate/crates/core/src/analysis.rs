//! Discrete space-time error norms, self-convergence and order fitting.

use crate::cases::ExactSolution;
use crate::discretization::{DiscreteField, Discretization, PointData, Shapes};
use crate::error::{Error, Result};
use crate::scalar::{Point, Real};
use crate::solver::{Timings, Trajectory};
use rayon::prelude::*;
use std::io::Write;

/// Squared integrals at one time level over the active mesh.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LevelIntegrals {
    pub err_l2: f64,
    pub err_h1: f64,
    pub ref_l2: f64,
    pub ref_h1: f64,
}

impl LevelIntegrals {
    fn add(mut self, o: LevelIntegrals) -> Self {
        self.err_l2 += o.err_l2;
        self.err_h1 += o.err_h1;
        self.ref_l2 += o.ref_l2;
        self.ref_h1 += o.ref_h1;
        self
    }
}

fn sq_dist<T: Real>(a: &Point<T>, b: &Point<T>, d: usize) -> T {
    (0..d).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

fn sq_norm<T: Real>(a: &Point<T>, d: usize) -> T {
    (0..d).map(|i| a[i] * a[i]).sum()
}

/// `int (u_h - u)^2`, `int |grad(u_h - u)|^2` and the matching reference integrals at time `t`.
pub fn level_integrals<T: Real>(
    disc: &Discretization<T>,
    field: DiscreteField<'_, T>,
    exact: &ExactSolution<T>,
    t: T,
) -> LevelIntegrals {
    let d = disc.dim();
    let cells = disc.active_cells();
    let per_cell: Vec<LevelIntegrals> = (0..cells.len())
        .into_par_iter()
        .map(|slot| {
            let dofs = disc.dofmap().cell_dofs(cells[slot]);
            let mut sh = Shapes::default();
            let mut acc = [T::zero(); 4];
            for (q, pd) in disc.point_data(slot).iter().enumerate() {
                disc.shapes_grad_at(slot, q, &mut sh);
                let (v, g) = disc.field_value_grad(field, dofs, pd, &sh);
                let u = (exact.value)(&pd.x, t);
                let gu = (exact.gradient)(&pd.x, t);
                acc[0] += pd.weight * (v - u) * (v - u);
                acc[1] += pd.weight * sq_dist(&g, &gu, d);
                acc[2] += pd.weight * u * u;
                acc[3] += pd.weight * sq_norm(&gu, d);
            }
            LevelIntegrals {
                err_l2: acc[0].to_f64_lossy(),
                err_h1: acc[1].to_f64_lossy(),
                ref_l2: acc[2].to_f64_lossy(),
                ref_h1: acc[3].to_f64_lossy(),
            }
        })
        .collect();
    per_cell.into_iter().fold(LevelIntegrals::default(), LevelIntegrals::add)
}

/// Running `l2(H1)` and `linf(L2)` ratios, fed one time level at a time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NormAccumulator {
    sum_err_h1: f64,
    sum_ref_h1: f64,
    max_err_l2: f64,
    max_ref_l2: f64,
    levels: usize,
}

impl NormAccumulator {
    pub fn push(&mut self, dt: f64, level: LevelIntegrals) {
        self.sum_err_h1 += dt * level.err_h1;
        self.sum_ref_h1 += dt * level.ref_h1;
        self.max_err_l2 = self.max_err_l2.max(level.err_l2);
        self.max_ref_l2 = self.max_ref_l2.max(level.ref_l2);
        self.levels += 1;
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn l2h1(&self) -> Result<f64> {
        ratio(self.sum_err_h1, self.sum_ref_h1)
    }

    pub fn linfl2(&self) -> Result<f64> {
        ratio(self.max_err_l2, self.max_ref_l2)
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::ZeroReference);
    }
    let r = (num / den).sqrt();
    if !r.is_finite() {
        return Err(Error::NonFinite {
            what: "relative error".into(),
            location: format!("{num:e} / {den:e}"),
        });
    }
    Ok(r)
}

fn accumulate<T: Real>(disc: &Discretization<T>, traj: &Trajectory<T>, exact: &ExactSolution<T>, dt: T) -> NormAccumulator {
    let mut acc = NormAccumulator::default();
    for n in 0..traj.len() {
        let t = dt * T::from_count(n);
        acc.push(dt.to_f64_lossy(), level_integrals(disc, traj.field(n), exact, t));
    }
    acc
}

/// Relative `l2(0,T;H1)` error over all time levels.
pub fn error_l2h1<T: Real>(disc: &Discretization<T>, traj: &Trajectory<T>, exact: &ExactSolution<T>, dt: T) -> Result<f64> {
    accumulate(disc, traj, exact, dt).l2h1()
}

/// Relative `linf(0,T;L2)` error over all time levels.
pub fn error_linfl2<T: Real>(disc: &Discretization<T>, traj: &Trajectory<T>, exact: &ExactSolution<T>, dt: T) -> Result<f64> {
    accumulate(disc, traj, exact, dt).linfl2()
}

/// Errors of a coarse run against a finer reference run on nested time grids.
///
/// Only reference cells whose quadrature points all fall in the coarse active
/// mesh contribute. Comparison happens at the coarse time levels.
pub fn self_convergence_errors<T: Real>(
    coarse: &Discretization<T>,
    coarse_traj: &Trajectory<T>,
    reference: &Discretization<T>,
    reference_traj: &Trajectory<T>,
    final_time: T,
) -> Result<(f64, f64)> {
    let nc = coarse_traj.len() - 1;
    let nr = reference_traj.len() - 1;
    if nc == 0 || nr % nc != 0 {
        return Err(Error::NonNestedTimeGrid {
            coarse: nc,
            reference: nr,
        });
    }
    let stride = nr / nc;
    let d = reference.dim();
    let cells = reference.active_cells();
    let levels = nc + 1;

    // per reference cell: None if not covered, else [err_l2, err_h1, ref_l2, ref_h1] per coarse level
    let per_cell: Vec<Option<Vec<[f64; 4]>>> = (0..cells.len())
        .into_par_iter()
        .map(|slot| {
            let pts = reference.point_data(slot);
            let mut located = Vec::with_capacity(pts.len());
            for pd in pts {
                let (c, xi) = coarse.mesh().locate(&pd.x)?;
                if !coarse.dofmap().contains(c) {
                    return None;
                }
                located.push((c, xi));
            }
            let rdofs = reference.dofmap().cell_dofs(cells[slot]);
            let mut sh_r = Shapes::default();
            let mut sh_c = Shapes::default();
            let mut acc = vec![[T::zero(); 4]; levels];
            for (q, (pd, (c, xi))) in pts.iter().zip(&located).enumerate() {
                reference.shapes_grad_at(slot, q, &mut sh_r);
                let pc: PointData<T> = coarse.eval_at_reference(*c, xi, &mut sh_c);
                let cdofs = coarse.dofmap().cell_dofs(*c);
                for (n, a) in acc.iter_mut().enumerate() {
                    let (ur, gr) = reference.field_value_grad(reference_traj.field(n * stride), rdofs, pd, &sh_r);
                    let (uc, gc) = coarse.field_value_grad(coarse_traj.field(n), cdofs, &pc, &sh_c);
                    a[0] += pd.weight * (uc - ur) * (uc - ur);
                    a[1] += pd.weight * sq_dist(&gc, &gr, d);
                    a[2] += pd.weight * ur * ur;
                    a[3] += pd.weight * sq_norm(&gr, d);
                }
            }
            Some(acc.iter().map(|a| a.map(|v| v.to_f64_lossy())).collect())
        })
        .collect();

    let mut totals = vec![LevelIntegrals::default(); levels];
    for cell in per_cell.into_iter().flatten() {
        for (tot, a) in totals.iter_mut().zip(cell) {
            *tot = tot.add(LevelIntegrals {
                err_l2: a[0],
                err_h1: a[1],
                ref_l2: a[2],
                ref_h1: a[3],
            });
        }
    }
    let dt = (final_time / T::from_count(nc)).to_f64_lossy();
    let mut acc = NormAccumulator::default();
    for level in totals {
        acc.push(dt, level);
    }
    Ok((acc.l2h1()?, acc.linfl2()?))
}

/// Step count of the reference run: the smallest multiple of every coarse
/// count that is at least `minimum`.
pub fn nested_reference_steps(coarse_steps: &[usize], minimum: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let l = coarse_steps
        .iter()
        .filter(|&&n| n > 0)
        .fold(1, |acc, &n| acc / gcd(acc, n) * n);
    minimum.max(1).div_ceil(l) * l
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fit_order(h: &[f64], err: &[f64]) -> Result<f64> {
    if h.len() != err.len() {
        return Err(Error::InvalidInput("h and error lists differ in length".into()));
    }
    if h.len() < 2 {
        return Err(Error::TooFewRecords(h.len()));
    }
    if h.iter().chain(err).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput("order fit needs positive finite h and errors".into()));
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("order fit needs distinct h values".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// One row of the convergence CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRecord {
    pub case: String,
    pub k: usize,
    pub l: usize,
    pub sigma: f64,
    pub dt_rule: String,
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub n_dofs: usize,
    pub err_l2h1: f64,
    pub err_linfl2: f64,
    pub timings: Timings,
}

pub const CSV_HEADER: &str =
    "case,k,l,sigma,dt_rule,n,h,dt,ndofs,err_l2h1,err_linfl2,t_assemble_s,t_factor_s,t_solve_s";

impl ErrorRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.16e},{},{},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.case,
            self.k,
            self.l,
            self.sigma,
            self.dt_rule,
            self.n,
            self.h,
            self.dt,
            self.n_dofs,
            self.err_l2h1,
            self.err_linfl2,
            self.timings.assemble,
            self.timings.factor,
            self.timings.solve,
        )
    }
}

pub fn write_csv<W: Write>(mut out: W, records: &[ErrorRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Fitted slopes; `*_all` include the coarsest record.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FittedOrders {
    pub l2h1: Option<f64>,
    pub linfl2: Option<f64>,
    pub l2h1_all: Option<f64>,
    pub linfl2_all: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub records: Vec<ErrorRecord>,
    pub orders: FittedOrders,
}

impl ConvergenceReport {
    /// Sorts by decreasing `h` and fits both norms, with and without the coarsest record.
    pub fn new(mut records: Vec<ErrorRecord>) -> Result<Self> {
        if records.len() < 2 {
            return Err(Error::TooFewRecords(records.len()));
        }
        records.sort_by(|a, b| b.h.total_cmp(&a.h));
        if records.windows(2).any(|w| !(w[1].h < w[0].h)) {
            return Err(Error::InvalidInput("records must have distinct mesh sizes".into()));
        }
        let h: Vec<f64> = records.iter().map(|r| r.h).collect();
        let e1: Vec<f64> = records.iter().map(|r| r.err_l2h1).collect();
        let e2: Vec<f64> = records.iter().map(|r| r.err_linfl2).collect();
        let orders = FittedOrders {
            l2h1: fit_order(&h[1..], &e1[1..]).ok(),
            linfl2: fit_order(&h[1..], &e2[1..]).ok(),
            l2h1_all: fit_order(&h, &e1).ok(),
            linfl2_all: fit_order(&h, &e2).ok(),
        };
        Ok(Self { records, orders })
    }
}
