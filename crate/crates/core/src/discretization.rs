//! The unfitted finite element space `phi_h * V_h^(k)` on the active mesh.

use crate::elements::{
    build_dofmap, laplacian, make_basis, make_quadrature, push_forward_gradient,
    push_forward_hessian, DofMap, LagrangeBasis, QuadratureRule, ReferenceTable,
};
use crate::error::{Error, Result};
use crate::levelset::{classify, interpolate_levelset, CellClassification, DiscreteLevelSet, LevelSetFunction};
use crate::mesh::{CellGeometry, Mesh};
use crate::scalar::{dot, zero3, Point, Real};

/// Discrete function on the active mesh, in one of the two representations
/// the time loop uses.
#[derive(Clone, Copy, Debug)]
pub enum DiscreteField<'a, T> {
    /// Plain `V_h^(k)` coefficients (the interpolated initial datum).
    Nodal(&'a [T]),
    /// Coefficients of `w_h`; the field is `phi_h * w_h`.
    PhiTimes(&'a [T]),
}

impl<'a, T> DiscreteField<'a, T> {
    pub fn coefficients(&self) -> &'a [T] {
        match *self {
            DiscreteField::Nodal(c) | DiscreteField::PhiTimes(c) => c,
        }
    }
}

/// Level-set data cached at one volume quadrature point.
#[derive(Clone, Copy, Debug)]
pub struct PointData<T> {
    pub x: Point<T>,
    pub weight: T,
    pub phi: T,
    pub grad_phi: Point<T>,
    pub lap_phi: T,
}

/// Physical shape data of the `w` basis at one point.
#[derive(Clone, Debug, Default)]
pub struct Shapes<T> {
    pub values: Vec<T>,
    pub grads: Vec<Point<T>>,
    pub laps: Vec<T>,
}

/// Options controlling the quadrature exactness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub cell_exactness: Option<usize>,
    pub facet_exactness: Option<usize>,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            cell_exactness: None,
            facet_exactness: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Discretization<T> {
    mesh: Mesh<T>,
    levelset: DiscreteLevelSet<T>,
    classification: CellClassification<T>,
    basis: LagrangeBasis<T>,
    dofmap: DofMap<T>,
    cell_rule: QuadratureRule<T>,
    facet_rule: QuadratureRule<T>,
    w_table: ReferenceTable<T>,
    geometry: Vec<CellGeometry<T>>,
    points: Vec<PointData<T>>,
}

impl<T: Real> Discretization<T> {
    /// Interpolates `phi` with degree `l`, classifies the mesh and numbers degree-`k` unknowns.
    pub fn new(mesh: Mesh<T>, phi: &LevelSetFunction<T>, k: usize, l: usize) -> Result<Self> {
        let phi_h = interpolate_levelset(phi, &mesh, l)?;
        Self::with_levelset(mesh, phi_h, k, QuadratureOptions::default())
    }

    pub fn with_levelset(
        mesh: Mesh<T>,
        levelset: DiscreteLevelSet<T>,
        k: usize,
        quad: QuadratureOptions,
    ) -> Result<Self> {
        let d = mesh.dim();
        let l = levelset.degree();
        let classification = classify(&levelset, &mesh)?;
        let basis = make_basis(d, k)?;
        let dofmap = build_dofmap(&mesh, classification.active_cells(), &basis);
        let default_exact = 2 * (k + l);
        let cell_rule = make_quadrature(d, quad.cell_exactness.unwrap_or(default_exact))?;
        let facet_rule = make_quadrature(d - 1, quad.facet_exactness.unwrap_or(default_exact))?;
        let w_table = basis.tabulate(&cell_rule.points);
        let phi_table = levelset.basis().tabulate(&cell_rule.points);

        let cells = dofmap.cells().to_vec();
        let nq = cell_rule.len();
        let mut geometry = Vec::with_capacity(cells.len());
        let mut points = Vec::with_capacity(cells.len() * nq);
        for &c in &cells {
            let geo = mesh.cell_geometry(c);
            let coeffs = levelset.local_coefficients(c);
            for q in 0..nq {
                let e = &phi_table.evals[q];
                let mut phi = T::zero();
                let mut g_ref = zero3();
                let mut h_ref = [[T::zero(); 3]; 3];
                for (j, &cj) in coeffs.iter().enumerate() {
                    phi += cj * e.values[j];
                    for a in 0..d {
                        g_ref[a] += cj * e.grads[j][a];
                        for b in 0..d {
                            h_ref[a][b] += cj * e.hessians[j][a][b];
                        }
                    }
                }
                let hess = push_forward_hessian(&geo.inverse, &h_ref, d);
                points.push(PointData {
                    x: geo.to_physical(&cell_rule.points[q], d),
                    weight: cell_rule.weights[q] * geo.det.abs(),
                    phi,
                    grad_phi: push_forward_gradient(&geo.inverse, &g_ref, d),
                    lap_phi: laplacian(&hess, d),
                });
            }
            geometry.push(geo);
        }
        Ok(Self {
            mesh,
            levelset,
            classification,
            basis,
            dofmap,
            cell_rule,
            facet_rule,
            w_table,
            geometry,
            points,
        })
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    pub fn levelset(&self) -> &DiscreteLevelSet<T> {
        &self.levelset
    }

    pub fn classification(&self) -> &CellClassification<T> {
        &self.classification
    }

    pub fn basis(&self) -> &LagrangeBasis<T> {
        &self.basis
    }

    pub fn dofmap(&self) -> &DofMap<T> {
        &self.dofmap
    }

    pub fn n_dofs(&self) -> usize {
        self.dofmap.n_dofs()
    }

    pub fn k(&self) -> usize {
        self.basis.degree()
    }

    pub fn l(&self) -> usize {
        self.levelset.degree()
    }

    pub fn h(&self) -> T {
        self.mesh.h()
    }

    pub fn cell_rule(&self) -> &QuadratureRule<T> {
        &self.cell_rule
    }

    pub fn facet_rule(&self) -> &QuadratureRule<T> {
        &self.facet_rule
    }

    /// Active cells in dof-numbering order; `slot` indexes this list.
    pub fn active_cells(&self) -> &[usize] {
        self.dofmap.cells()
    }

    pub fn geometry(&self, slot: usize) -> &CellGeometry<T> {
        &self.geometry[slot]
    }

    pub fn point_data(&self, slot: usize) -> &[PointData<T>] {
        let nq = self.cell_rule.len();
        &self.points[slot * nq..(slot + 1) * nq]
    }

    /// Physical `w`-basis data at volume quadrature point `q` of `slot`.
    pub fn shapes_at(&self, slot: usize, q: usize, out: &mut Shapes<T>) {
        let d = self.dim();
        let inv = &self.geometry[slot].inverse;
        let e = &self.w_table.evals[q];
        out.values.clear();
        out.values.extend_from_slice(&e.values);
        out.grads.clear();
        out.laps.clear();
        for j in 0..e.values.len() {
            out.grads.push(push_forward_gradient(inv, &e.grads[j], d));
            out.laps
                .push(laplacian(&push_forward_hessian(inv, &e.hessians[j], d), d));
        }
    }

    /// Like [`Self::shapes_at`] without the Laplacians.
    pub fn shapes_grad_at(&self, slot: usize, q: usize, out: &mut Shapes<T>) {
        let d = self.dim();
        let inv = &self.geometry[slot].inverse;
        let e = &self.w_table.evals[q];
        out.values.clear();
        out.values.extend_from_slice(&e.values);
        out.grads.clear();
        out.laps.clear();
        for g in &e.grads {
            out.grads.push(push_forward_gradient(inv, g, d));
        }
    }

    /// Level-set and `w`-basis data at an arbitrary reference point of a background cell.
    pub fn eval_at_reference(&self, cell: usize, xi: &Point<T>, out: &mut Shapes<T>) -> PointData<T> {
        let d = self.dim();
        let geo = self.mesh.cell_geometry(cell);
        let ew = self.basis.evaluate(xi);
        out.values.clear();
        out.values.extend_from_slice(&ew.values);
        out.grads.clear();
        out.laps.clear();
        for j in 0..ew.values.len() {
            out.grads
                .push(push_forward_gradient(&geo.inverse, &ew.grads[j], d));
            out.laps.push(laplacian(
                &push_forward_hessian(&geo.inverse, &ew.hessians[j], d),
                d,
            ));
        }
        let ep = self.levelset.basis().evaluate(xi);
        let coeffs = self.levelset.local_coefficients(cell);
        let mut phi = T::zero();
        let mut g = zero3();
        let mut h = [[T::zero(); 3]; 3];
        for (j, &cj) in coeffs.iter().enumerate() {
            phi += cj * ep.values[j];
            for a in 0..d {
                g[a] += cj * ep.grads[j][a];
                for b in 0..d {
                    h[a][b] += cj * ep.hessians[j][a][b];
                }
            }
        }
        PointData {
            x: geo.to_physical(xi, d),
            weight: T::zero(),
            phi,
            grad_phi: push_forward_gradient(&geo.inverse, &g, d),
            lap_phi: laplacian(&push_forward_hessian(&geo.inverse, &h, d), d),
        }
    }

    /// Value and gradient of a discrete field from cached shape data.
    pub fn field_value_grad(
        &self,
        field: DiscreteField<'_, T>,
        dofs: &[usize],
        pd: &PointData<T>,
        sh: &Shapes<T>,
    ) -> (T, Point<T>) {
        let d = self.dim();
        let c = field.coefficients();
        let mut v = T::zero();
        let mut g = zero3();
        for (j, &dof) in dofs.iter().enumerate() {
            let cj = c[dof];
            v += cj * sh.values[j];
            for a in 0..d {
                g[a] += cj * sh.grads[j][a];
            }
        }
        match field {
            DiscreteField::Nodal(_) => (v, g),
            DiscreteField::PhiTimes(_) => {
                let mut gu = zero3();
                for a in 0..d {
                    gu[a] = v * pd.grad_phi[a] + pd.phi * g[a];
                }
                (pd.phi * v, gu)
            }
        }
    }

    /// Evaluates a field at a physical point; `None` outside the active mesh.
    pub fn eval_point(&self, field: DiscreteField<'_, T>, x: &Point<T>) -> Option<(T, Point<T>)> {
        let (cell, xi) = self.mesh.locate(x)?;
        if !self.dofmap.contains(cell) {
            return None;
        }
        let mut sh = Shapes::default();
        let pd = self.eval_at_reference(cell, &xi, &mut sh);
        Some(self.field_value_grad(field, self.dofmap.cell_dofs(cell), &pd, &sh))
    }

    /// Nodal interpolant in `V_h^(k)` (the initial field).
    pub fn interpolate(&self, f: impl Fn(&Point<T>) -> T) -> Result<Vec<T>> {
        let v = self.dofmap.interpolate(f);
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                what: "initial datum".into(),
                location: format!("{:?}", &self.dofmap.coordinates()[i][..self.dim()]),
            });
        }
        Ok(v)
    }

    /// Product-rule data of `u_j = phi_h N_j`: value, gradient and Laplacian.
    #[inline]
    pub fn product(&self, pd: &PointData<T>, sh: &Shapes<T>, j: usize) -> (T, Point<T>, T) {
        let d = self.dim();
        let n = sh.values[j];
        let gn = &sh.grads[j];
        let mut g = zero3();
        for a in 0..d {
            g[a] = n * pd.grad_phi[a] + pd.phi * gn[a];
        }
        let lap = n * pd.lap_phi + T::lit(2.0) * dot(&pd.grad_phi, gn, d) + pd.phi * sh.laps[j];
        (pd.phi * n, g, lap)
    }

    /// Reference `w`-basis values at volume quadrature point `q` (cell independent).
    pub fn reference_values(&self, q: usize) -> &[T] {
        &self.w_table.evals[q].values
    }
}
