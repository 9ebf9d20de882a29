//! Bilinear forms and right-hand sides of one implicit Euler step.

use crate::discretization::{DiscreteField, Discretization, PointData, Shapes};
use crate::error::{Error, Result};
use crate::scalar::{dot, Point, Real};
use crate::sparse::{CsrMatrix, TripletBuilder};
use rayon::prelude::*;
use std::io::Write;

/// The separately assembled pieces of the time-step operator.
///
/// `ghost`, `lsq_laplacian` and `lsq_mass` already carry their `sigma h`
/// and `sigma h^2` factors, so that
/// `A = mass/dt + stiffness + boundary + ghost + lsq_laplacian + lsq_mass/dt`.
#[derive(Clone, Debug)]
pub struct OperatorParts<T> {
    pub mass: CsrMatrix<T>,
    pub stiffness: CsrMatrix<T>,
    pub boundary: CsrMatrix<T>,
    pub ghost: CsrMatrix<T>,
    pub lsq_laplacian: CsrMatrix<T>,
    pub lsq_mass: CsrMatrix<T>,
    pub sigma: T,
    pub h: T,
}

impl<T: Real> OperatorParts<T> {
    pub fn system_matrix(&self, dt: T) -> Result<CsrMatrix<T>> {
        let inv = T::one() / dt;
        CsrMatrix::linear_combination(&[
            (inv, &self.mass),
            (T::one(), &self.stiffness),
            (T::one(), &self.boundary),
            (T::one(), &self.ghost),
            (T::one(), &self.lsq_laplacian),
            (inv, &self.lsq_mass),
        ])
    }

    /// The time-independent part `K + B + G + Ls`, which must be coercive.
    pub fn coercive_part(&self) -> Result<CsrMatrix<T>> {
        CsrMatrix::linear_combination(&[
            (T::one(), &self.stiffness),
            (T::one(), &self.boundary),
            (T::one(), &self.ghost),
            (T::one(), &self.lsq_laplacian),
        ])
    }
}

/// Assembled left-hand side of the time step.
#[derive(Clone, Debug)]
pub struct SparseSystem<T> {
    pub matrix: CsrMatrix<T>,
    pub sigma: T,
    pub dt: T,
    pub h: T,
}

impl<T: Real> SparseSystem<T> {
    pub fn n_dofs(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn write_matrix<W: Write>(&self, out: W) -> std::io::Result<()> {
        self.matrix.write_coordinate(out)
    }
}

fn check_parameters<T: Real>(sigma: T, dt: Option<T>) -> Result<()> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    if let Some(dt) = dt {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
    }
    Ok(())
}

fn check_local<T: Real>(values: &[T], what: &str, location: impl FnOnce() -> String) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            what: what.to_string(),
            location: location(),
        })
    }
}

#[derive(Default)]
struct CellBlocks<T> {
    mass: Vec<T>,
    stiffness: Vec<T>,
    lsq_laplacian: Vec<T>,
    lsq_mass: Vec<T>,
}

fn cell_blocks<T: Real>(disc: &Discretization<T>, slot: usize, cut: bool) -> CellBlocks<T> {
    let n = disc.dofmap().n_local();
    let d = disc.dim();
    let mut out = CellBlocks {
        mass: vec![T::zero(); n * n],
        stiffness: vec![T::zero(); n * n],
        ..Default::default()
    };
    if cut {
        out.lsq_laplacian = vec![T::zero(); n * n];
        out.lsq_mass = vec![T::zero(); n * n];
    }
    let mut sh = Shapes::default();
    let mut u = vec![T::zero(); n];
    let mut gu = vec![[T::zero(); 3]; n];
    let mut lu = vec![T::zero(); n];
    for (q, pd) in disc.point_data(slot).iter().enumerate() {
        disc.shapes_at(slot, q, &mut sh);
        for j in 0..n {
            let (v, g, l) = disc.product(pd, &sh, j);
            u[j] = v;
            gu[j] = g;
            lu[j] = l;
        }
        let w = pd.weight;
        for i in 0..n {
            for j in 0..n {
                out.mass[i * n + j] += w * u[j] * u[i];
                out.stiffness[i * n + j] += w * dot(&gu[j], &gu[i], d);
                if cut {
                    out.lsq_laplacian[i * n + j] += w * lu[j] * lu[i];
                    out.lsq_mass[i * n + j] += w * u[j] * lu[i];
                }
            }
        }
    }
    out
}

/// Physical quadrature points and weights on facet `f`.
pub(crate) fn facet_points<T: Real>(disc: &Discretization<T>, f: usize) -> Vec<(Point<T>, T)> {
    let mesh = disc.mesh();
    let d = mesh.dim();
    let fv = mesh.facet(f);
    let rule = disc.facet_rule();
    let ref_measure = if d == 2 { T::one() } else { T::lit(0.5) };
    let scale = mesh.facet_measure(f) / ref_measure;
    let a0 = *mesh.vertex(fv[0]);
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(s, &w)| {
            let mut x = a0;
            for (i, &v) in fv.iter().enumerate().skip(1) {
                let ai = mesh.vertex(v);
                for a in 0..d {
                    x[a] += s[i - 1] * (ai[a] - a0[a]);
                }
            }
            (x, w * scale)
        })
        .collect()
}

/// Normal derivatives `grad(phi_h N_j) . n` of the cell's trial functions at `x`.
fn normal_derivatives<T: Real>(
    disc: &Discretization<T>,
    cell: usize,
    x: &Point<T>,
    normal: &Point<T>,
    sh: &mut Shapes<T>,
) -> (Vec<T>, Vec<T>) {
    let d = disc.dim();
    let xi = disc.mesh().cell_geometry(cell).to_reference(x, d);
    let pd = disc.eval_at_reference(cell, &xi, sh);
    let n = sh.values.len();
    let mut vals = Vec::with_capacity(n);
    let mut dn = Vec::with_capacity(n);
    for j in 0..n {
        let (v, g, _) = disc.product(&pd, sh, j);
        vals.push(v);
        dn.push(dot(&g, normal, d));
    }
    (vals, dn)
}

pub fn assemble_parts<T: Real>(disc: &Discretization<T>, sigma: T) -> Result<OperatorParts<T>> {
    check_parameters(sigma, None)?;
    let ndofs = disc.n_dofs();
    let n = disc.dofmap().n_local();
    let h = disc.h();
    let cls = disc.classification();
    let cells = disc.active_cells();

    let blocks: Vec<CellBlocks<T>> = (0..cells.len())
        .into_par_iter()
        .map(|slot| cell_blocks(disc, slot, cls.is_cut(cells[slot])))
        .collect();

    let mut mass = TripletBuilder::new(ndofs, ndofs);
    let mut stiffness = TripletBuilder::new(ndofs, ndofs);
    let mut lsq_laplacian = TripletBuilder::new(ndofs, ndofs);
    let mut lsq_mass = TripletBuilder::new(ndofs, ndofs);
    let s2 = sigma * h * h;
    for (slot, b) in blocks.iter().enumerate() {
        let c = cells[slot];
        let loc = || format!("cell {c}");
        check_local(&b.mass, "mass matrix", loc)?;
        check_local(&b.stiffness, "stiffness matrix", loc)?;
        let dofs = disc.dofmap().cell_dofs(c);
        mass.push_block(dofs, dofs, &b.mass);
        stiffness.push_block(dofs, dofs, &b.stiffness);
        if !b.lsq_laplacian.is_empty() {
            check_local(&b.lsq_laplacian, "least-squares matrix", loc)?;
            check_local(&b.lsq_mass, "least-squares matrix", loc)?;
            let scaled: Vec<T> = b.lsq_laplacian.iter().map(|&v| v * s2).collect();
            lsq_laplacian.push_block(dofs, dofs, &scaled);
            let scaled: Vec<T> = b.lsq_mass.iter().map(|&v| -v * s2).collect();
            lsq_mass.push_block(dofs, dofs, &scaled);
        }
    }

    // boundary term  -int (grad u . n) v  on the exterior facets of the active mesh
    let exterior = cls.active_exterior_facets();
    let boundary_blocks: Vec<Vec<T>> = exterior
        .par_iter()
        .map(|e| {
            let mut sh = Shapes::default();
            let mut local = vec![T::zero(); n * n];
            for (x, w) in facet_points(disc, e.facet) {
                let (v, dn) = normal_derivatives(disc, e.cell, &x, &e.normal, &mut sh);
                for i in 0..n {
                    for j in 0..n {
                        local[i * n + j] -= w * dn[j] * v[i];
                    }
                }
            }
            local
        })
        .collect();
    let mut boundary = TripletBuilder::new(ndofs, ndofs);
    for (e, local) in exterior.iter().zip(&boundary_blocks) {
        check_local(local, "boundary matrix", || format!("facet {}", e.facet))?;
        let dofs = disc.dofmap().cell_dofs(e.cell);
        boundary.push_block(dofs, dofs, local);
    }

    // ghost penalty on the jump of the normal derivative
    let s1 = sigma * h;
    let ghost_list = cls.ghost_facets();
    let ghost_blocks: Vec<Vec<T>> = ghost_list
        .par_iter()
        .map(|&f| {
            let mesh = disc.mesh();
            let fc = mesh.facet_cells(f);
            let (c1, c2) = (fc.first, fc.second.expect("ghost facets are interior"));
            let normal = mesh.outward_normal(c1, f);
            let mut sh = Shapes::default();
            let m = 2 * n;
            let mut local = vec![T::zero(); m * m];
            let mut jump = vec![T::zero(); m];
            for (x, w) in facet_points(disc, f) {
                let (_, d1) = normal_derivatives(disc, c1, &x, &normal, &mut sh);
                let (_, d2) = normal_derivatives(disc, c2, &x, &normal, &mut sh);
                jump[..n].copy_from_slice(&d1);
                for j in 0..n {
                    jump[n + j] = -d2[j];
                }
                for i in 0..m {
                    for j in 0..m {
                        local[i * m + j] += s1 * w * jump[j] * jump[i];
                    }
                }
            }
            local
        })
        .collect();
    let mut ghost = TripletBuilder::new(ndofs, ndofs);
    for (&f, local) in ghost_list.iter().zip(&ghost_blocks) {
        check_local(local, "ghost penalty", || format!("facet {f}"))?;
        let fc = disc.mesh().facet_cells(f);
        let mut dofs = disc.dofmap().cell_dofs(fc.first).to_vec();
        dofs.extend_from_slice(disc.dofmap().cell_dofs(fc.second.unwrap()));
        ghost.push_block(&dofs, &dofs, local);
    }

    Ok(OperatorParts {
        mass: mass.build(),
        stiffness: stiffness.build(),
        boundary: boundary.build(),
        ghost: ghost.build(),
        lsq_laplacian: lsq_laplacian.build(),
        lsq_mass: lsq_mass.build(),
        sigma,
        h,
    })
}

/// Rejects active meshes whose boundary touches the box.
pub fn check_box_clearance<T: Real>(disc: &Discretization<T>) -> Result<()> {
    let mesh = disc.mesh();
    match disc
        .classification()
        .active_exterior_facets()
        .iter()
        .find(|e| mesh.is_boundary_facet(e.facet))
    {
        Some(e) => Err(Error::ActiveFacetOnBox { facet: e.facet }),
        None => Ok(()),
    }
}

pub fn assemble_lhs<T: Real>(disc: &Discretization<T>, sigma: T, dt: T) -> Result<SparseSystem<T>> {
    check_parameters(sigma, Some(dt))?;
    check_box_clearance(disc)?;
    let parts = assemble_parts(disc, sigma)?;
    let matrix = parts.system_matrix(dt)?;
    Ok(SparseSystem {
        matrix,
        sigma,
        dt,
        h: parts.h,
    })
}

/// Source term `f(x, t)`.
pub type SourceFn<'a, T> = &'a (dyn Fn(&Point<T>, T) -> T + Sync);

/// Right-hand-side assembler with the cut-cell Laplacians cached.
pub struct RhsBuilder<'a, T> {
    disc: &'a Discretization<T>,
    sigma: T,
    dt: T,
    /// For each slot, the offset of its cached `Delta(phi_h N_j)` values, if cut.
    lap_offset: Vec<Option<usize>>,
    lap_cache: Vec<T>,
}

impl<'a, T: Real> RhsBuilder<'a, T> {
    pub fn new(disc: &'a Discretization<T>, sigma: T, dt: T) -> Result<Self> {
        check_parameters(sigma, Some(dt))?;
        let cells = disc.active_cells();
        let n = disc.dofmap().n_local();
        let nq = disc.cell_rule().len();
        let mut lap_offset = vec![None; cells.len()];
        let mut lap_cache = Vec::new();
        let mut sh = Shapes::default();
        for (slot, &c) in cells.iter().enumerate() {
            if !disc.classification().is_cut(c) {
                continue;
            }
            lap_offset[slot] = Some(lap_cache.len());
            for (q, pd) in disc.point_data(slot).iter().enumerate() {
                disc.shapes_at(slot, q, &mut sh);
                for j in 0..n {
                    lap_cache.push(disc.product(pd, &sh, j).2);
                }
            }
            debug_assert_eq!(lap_cache.len() % (n * nq), 0);
        }
        Ok(Self {
            disc,
            sigma,
            dt,
            lap_offset,
            lap_cache,
        })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Assembles `b` for the step ending at time `t`, given the previous field.
    pub fn build(&self, prev: DiscreteField<'_, T>, f: SourceFn<'_, T>, t: T) -> Result<Vec<T>> {
        let disc = self.disc;
        let cells = disc.active_cells();
        let n = disc.dofmap().n_local();
        let nq = disc.cell_rule().len();
        let inv_dt = T::one() / self.dt;
        let s2 = self.sigma * disc.h() * disc.h();
        let coeffs = prev.coefficients();
        if coeffs.len() != disc.n_dofs() {
            return Err(Error::InvalidInput(format!(
                "previous field has {} coefficients, expected {}",
                coeffs.len(),
                disc.n_dofs()
            )));
        }
        let mut local = vec![T::zero(); cells.len() * n];
        let bad: Vec<Option<Point<T>>> = local
            .par_chunks_mut(n)
            .enumerate()
            .map(|(slot, out)| {
                let dofs = disc.dofmap().cell_dofs(cells[slot]);
                let lap = self.lap_offset[slot].map(|o| &self.lap_cache[o..o + n * nq]);
                for (q, pd) in disc.point_data(slot).iter().enumerate() {
                    let vals = disc.reference_values(q);
                    let s = prev_value(prev, coeffs, dofs, vals, pd) * inv_dt + f(&pd.x, t);
                    if !s.is_finite() {
                        return Some(pd.x);
                    }
                    let ws = pd.weight * s;
                    for i in 0..n {
                        let mut test = pd.phi * vals[i];
                        if let Some(l) = lap {
                            test -= s2 * l[q * n + i];
                        }
                        out[i] += ws * test;
                    }
                }
                None
            })
            .collect();
        if let Some(x) = bad.into_iter().flatten().next() {
            return Err(Error::NonFinite {
                what: "right-hand side".into(),
                location: format!("{:?} at t = {t}", &x[..disc.dim()]),
            });
        }
        let mut b = vec![T::zero(); disc.n_dofs()];
        for (slot, &c) in cells.iter().enumerate() {
            for (i, &dof) in disc.dofmap().cell_dofs(c).iter().enumerate() {
                b[dof] += local[slot * n + i];
            }
        }
        Ok(b)
    }
}

#[inline]
fn prev_value<T: Real>(prev: DiscreteField<'_, T>, coeffs: &[T], dofs: &[usize], vals: &[T], pd: &PointData<T>) -> T {
    let v: T = dofs.iter().zip(vals).map(|(&d, &n)| coeffs[d] * n).sum();
    match prev {
        DiscreteField::Nodal(_) => v,
        DiscreteField::PhiTimes(_) => pd.phi * v,
    }
}
