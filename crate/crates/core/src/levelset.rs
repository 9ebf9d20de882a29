//! Discrete level sets and the active / cut / ghost classification.

use crate::elements::{build_dofmap, make_basis, DofMap, LagrangeBasis};
use crate::error::{Error, Result};
use crate::mesh::{extract_submesh, ExteriorFacet, Mesh, SubMesh};
use crate::scalar::{Point, Real};
use std::fmt;
use std::sync::Arc;

pub type ScalarField<T> = Arc<dyn Fn(&Point<T>) -> T + Send + Sync>;
pub type VectorField<T> = Arc<dyn Fn(&Point<T>) -> Point<T> + Send + Sync>;

/// Analytic level set: negative inside the domain, zero on its boundary.
#[derive(Clone)]
pub struct LevelSetFunction<T> {
    pub name: String,
    pub value: ScalarField<T>,
    pub gradient: Option<VectorField<T>>,
}

impl<T: Real> LevelSetFunction<T> {
    pub fn new(name: impl Into<String>, value: impl Fn(&Point<T>) -> T + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(value),
            gradient: None,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(&Point<T>) -> Point<T> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn eval(&self, x: &Point<T>) -> T {
        (self.value)(x)
    }
}

impl<T> fmt::Debug for LevelSetFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevelSetFunction").field("name", &self.name).finish()
    }
}

/// Nodal interpolant of a level set in the degree-`l` Lagrange space of the background mesh.
#[derive(Clone, Debug)]
pub struct DiscreteLevelSet<T> {
    basis: LagrangeBasis<T>,
    dofmap: DofMap<T>,
    coefficients: Vec<T>,
}

pub fn interpolate_levelset<T: Real>(
    phi: &LevelSetFunction<T>,
    mesh: &Mesh<T>,
    degree: usize,
) -> Result<DiscreteLevelSet<T>> {
    let basis = make_basis(mesh.dim(), degree)?;
    let cells: Vec<usize> = (0..mesh.num_cells()).collect();
    let dofmap = build_dofmap(mesh, &cells, &basis);
    let coefficients = dofmap.interpolate(|x| phi.eval(x));
    if let Some(i) = coefficients.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite {
            what: format!("level set '{}'", phi.name),
            location: format!("{:?}", &dofmap.coordinates()[i][..mesh.dim()]),
        });
    }
    Ok(DiscreteLevelSet {
        basis,
        dofmap,
        coefficients,
    })
}

impl<T: Real> DiscreteLevelSet<T> {
    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &LagrangeBasis<T> {
        &self.basis
    }

    pub fn dofmap(&self) -> &DofMap<T> {
        &self.dofmap
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn local_coefficients(&self, cell: usize) -> Vec<T> {
        self.dofmap
            .cell_dofs(cell)
            .iter()
            .map(|&i| self.coefficients[i])
            .collect()
    }

    /// Value of the interpolant at reference coordinates `xi` of `cell`.
    pub fn eval_in_cell(&self, cell: usize, xi: &Point<T>) -> T {
        let vals = self.basis.values(xi);
        self.dofmap
            .cell_dofs(cell)
            .iter()
            .zip(vals)
            .map(|(&i, v)| self.coefficients[i] * v)
            .sum()
    }

    /// Same space, coefficients `-phi_h`.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for c in out.coefficients.iter_mut() {
            *c = -*c;
        }
        out
    }

    /// Replaces the coefficients, e.g. to build a constant level set.
    pub fn with_coefficients(&self, coefficients: Vec<T>) -> Result<Self> {
        if coefficients.len() != self.coefficients.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} level-set coefficients, got {}",
                self.coefficients.len(),
                coefficients.len()
            )));
        }
        let mut out = self.clone();
        out.coefficients = coefficients;
        Ok(out)
    }

    /// Sign samples used by the classification: the cell's Lagrange nodes,
    /// plus the barycenter for `l >= 2`.
    pub fn classification_samples(&self, cell: usize) -> Vec<T> {
        let mut s = self.local_coefficients(cell);
        if self.degree() >= 2 {
            let d = self.basis.dim();
            let mut bary = [T::zero(); 3];
            let w = T::one() / T::from_count(d + 1);
            for v in bary.iter_mut().take(d) {
                *v = w;
            }
            s.push(self.eval_in_cell(cell, &bary));
        }
        s
    }
}

/// Active cells `T_h`, cut cells, ghost facets and the boundary of `Omega_h`.
#[derive(Clone, Debug)]
pub struct CellClassification<T> {
    active: SubMesh<T>,
    cut_cells: Vec<usize>,
    cut_mask: Vec<bool>,
    ghost_facets: Vec<usize>,
    n_background: usize,
}

/// Counts printed by the CLI diagnostics block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassificationSummary {
    pub background_cells: usize,
    pub active_cells: usize,
    pub cut_cells: usize,
    pub ghost_facets: usize,
    pub exterior_facets: usize,
}

impl fmt::Display for ClassificationSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "background cells : {}", self.background_cells)?;
        writeln!(f, "active cells     : {}", self.active_cells)?;
        writeln!(f, "cut cells        : {}", self.cut_cells)?;
        writeln!(f, "ghost facets     : {}", self.ghost_facets)?;
        write!(f, "exterior facets  : {}", self.exterior_facets)
    }
}

pub fn classify<T: Real>(phi_h: &DiscreteLevelSet<T>, mesh: &Mesh<T>) -> Result<CellClassification<T>> {
    let mut active = Vec::new();
    let mut cut_mask = vec![false; mesh.num_cells()];
    let mut cut_cells = Vec::new();
    for c in 0..mesh.num_cells() {
        let samples = phi_h.classification_samples(c);
        let negative = samples.iter().any(|&s| s < T::zero());
        if !negative {
            continue;
        }
        active.push(c);
        if samples.iter().any(|&s| s >= T::zero()) {
            cut_mask[c] = true;
            cut_cells.push(c);
        }
    }
    if active.is_empty() {
        return Err(Error::NoActiveCells);
    }
    let active = extract_submesh(mesh, &active)?;
    let ghost_facets = active
        .interior_facets()
        .iter()
        .copied()
        .filter(|&f| {
            let fc = mesh.facet_cells(f);
            cut_mask[fc.first] || fc.second.map_or(false, |s| cut_mask[s])
        })
        .collect();
    Ok(CellClassification {
        active,
        cut_cells,
        cut_mask,
        ghost_facets,
        n_background: mesh.num_cells(),
    })
}

impl<T: Real> CellClassification<T> {
    pub fn active(&self) -> &SubMesh<T> {
        &self.active
    }

    pub fn active_cells(&self) -> &[usize] {
        self.active.cells()
    }

    pub fn is_active(&self, cell: usize) -> bool {
        self.active.contains(cell)
    }

    pub fn cut_cells(&self) -> &[usize] {
        &self.cut_cells
    }

    pub fn is_cut(&self, cell: usize) -> bool {
        self.cut_mask.get(cell).copied().unwrap_or(false)
    }

    pub fn ghost_facets(&self) -> &[usize] {
        &self.ghost_facets
    }

    pub fn active_exterior_facets(&self) -> &[ExteriorFacet<T>] {
        self.active.exterior_facets()
    }

    pub fn summary(&self) -> ClassificationSummary {
        ClassificationSummary {
            background_cells: self.n_background,
            active_cells: self.active.cells().len(),
            cut_cells: self.cut_cells.len(),
            ghost_facets: self.ghost_facets.len(),
            exterior_facets: self.active.exterior_facets().len(),
        }
    }
}
