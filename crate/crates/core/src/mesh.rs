//! Cartesian simplicial background meshes and cell subsets.
//!
//! The background mesh covers an axis-aligned box. In 2D each grid square
//! is split into two triangles along its lower-left to upper-right diagonal,
//! in 3D each cube into the six Kuhn tetrahedra that share the main diagonal.
//! Both splits are conforming without additional vertices.

use crate::error::{Error, Result};
use crate::scalar::{determinant, inverse, zero3, zero33, Mat3, Point, Real};
use std::collections::HashMap;
use std::io::Write;

/// Axis-aligned box `O` containing the physical domain.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain<T> {
    lower: Point<T>,
    upper: Point<T>,
    dim: usize,
}

impl<T: Real> BoxDomain<T> {
    pub fn new(lower: &[T], upper: &[T]) -> Result<Self> {
        let dim = lower.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!(
                "box dimension must be 2 or 3, got {dim}"
            )));
        }
        if upper.len() != dim {
            return Err(Error::InvalidInput(format!(
                "box corners have {} and {} coordinates",
                dim,
                upper.len()
            )));
        }
        let mut lo = zero3();
        let mut hi = zero3();
        for a in 0..dim {
            if !(upper[a] > lower[a]) || !lower[a].is_finite() || !upper[a].is_finite() {
                return Err(Error::InvalidInput(format!(
                    "degenerate box along axis {a}: [{}, {}]",
                    lower[a], upper[a]
                )));
            }
            lo[a] = lower[a];
            hi[a] = upper[a];
        }
        Ok(Self {
            lower: lo,
            upper: hi,
            dim,
        })
    }

    /// The cube `[-half, half]^dim`.
    pub fn centered(dim: usize, half: T) -> Result<Self> {
        let lo = vec![-half; dim];
        let hi = vec![half; dim];
        Self::new(&lo, &hi)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> &Point<T> {
        &self.lower
    }

    pub fn upper(&self) -> &Point<T> {
        &self.upper
    }

    pub fn volume(&self) -> T {
        (0..self.dim)
            .map(|a| self.upper[a] - self.lower[a])
            .fold(T::one(), |acc, e| acc * e)
    }
}

/// Structured-grid metadata kept alongside the simplices for point location.
#[derive(Clone, Debug)]
pub struct GridInfo<T> {
    pub domain: BoxDomain<T>,
    pub subdivisions: usize,
    pub spacing: Point<T>,
    pub cells_per_block: usize,
}

/// Affine data of one simplex: `x = origin + jacobian * xi`.
#[derive(Clone, Debug)]
pub struct CellGeometry<T> {
    pub origin: Point<T>,
    pub jacobian: Mat3<T>,
    /// `J^{-1}`; gradients push forward with its transpose.
    pub inverse: Mat3<T>,
    pub det: T,
    pub volume: T,
    pub diameter: T,
}

impl<T: Real> CellGeometry<T> {
    pub fn to_physical(&self, xi: &Point<T>, dim: usize) -> Point<T> {
        let mut x = self.origin;
        for i in 0..dim {
            for j in 0..dim {
                x[i] += self.jacobian[i][j] * xi[j];
            }
        }
        x
    }

    pub fn to_reference(&self, x: &Point<T>, dim: usize) -> Point<T> {
        let mut xi = zero3();
        for i in 0..dim {
            for j in 0..dim {
                xi[i] += self.inverse[i][j] * (x[j] - self.origin[j]);
            }
        }
        xi
    }
}

/// The two cells adjacent to a facet; `second` is `None` on the box boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FacetCells {
    pub first: usize,
    pub second: Option<usize>,
}

/// Conforming simplicial mesh with global facets.
#[derive(Clone, Debug)]
pub struct Mesh<T> {
    dim: usize,
    vertices: Vec<Point<T>>,
    cells: Vec<[usize; 4]>,
    /// `cell_facets[c][i]` is the facet opposite local vertex `i`.
    cell_facets: Vec<[usize; 4]>,
    facets: Vec<[usize; 3]>,
    facet_cells: Vec<FacetCells>,
    h_cell: Vec<T>,
    h: T,
    grid: Option<GridInfo<T>>,
}

/// Builds the Cartesian background mesh with `n` subdivisions per axis.
pub fn build_background_mesh<T: Real>(domain: &BoxDomain<T>, n: usize) -> Result<Mesh<T>> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "number of subdivisions must be at least 1".into(),
        ));
    }
    let dim = domain.dim();
    let mut spacing = zero3();
    for a in 0..dim {
        spacing[a] = (domain.upper[a] - domain.lower[a]) / T::from_count(n);
    }
    let np = n + 1;
    let coord = |a: usize, i: usize| -> T {
        if i == n {
            domain.upper[a]
        } else {
            domain.lower[a] + spacing[a] * T::from_count(i)
        }
    };

    let mut vertices = Vec::with_capacity(np.pow(dim as u32));
    let mut cells = Vec::new();
    let cells_per_block;
    if dim == 2 {
        for j in 0..np {
            for i in 0..np {
                vertices.push([coord(0, i), coord(1, j), T::zero()]);
            }
        }
        let vid = |i: usize, j: usize| i + np * j;
        cells_per_block = 2;
        cells.reserve(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = vid(i, j);
                let v10 = vid(i + 1, j);
                let v01 = vid(i, j + 1);
                let v11 = vid(i + 1, j + 1);
                cells.push([v00, v10, v11, usize::MAX]);
                cells.push([v00, v11, v01, usize::MAX]);
            }
        }
    } else {
        for k in 0..np {
            for j in 0..np {
                for i in 0..np {
                    vertices.push([coord(0, i), coord(1, j), coord(2, k)]);
                }
            }
        }
        let vid = |i: usize, j: usize, k: usize| i + np * (j + np * k);
        const PERMS: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        cells_per_block = 6;
        cells.reserve(6 * n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    for perm in PERMS.iter() {
                        let mut idx = [i, j, k];
                        let mut tet = [vid(i, j, k), 0, 0, 0];
                        for (s, &axis) in perm.iter().enumerate() {
                            idx[axis] += 1;
                            tet[s + 1] = vid(idx[0], idx[1], idx[2]);
                        }
                        cells.push(tet);
                    }
                }
            }
        }
    }

    let mut mesh = Mesh {
        dim,
        vertices,
        cells,
        cell_facets: Vec::new(),
        facets: Vec::new(),
        facet_cells: Vec::new(),
        h_cell: Vec::new(),
        h: T::zero(),
        grid: Some(GridInfo {
            domain: domain.clone(),
            subdivisions: n,
            spacing,
            cells_per_block,
        }),
    };
    mesh.orient_cells();
    mesh.build_facets();
    mesh.compute_sizes();
    Ok(mesh)
}

impl<T: Real> Mesh<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Point<T> {
        &self.vertices[v]
    }

    /// Vertex indices of a cell (`dim + 1` entries).
    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c][..self.dim + 1]
    }

    /// Facet ids of a cell; entry `i` is opposite local vertex `i`.
    pub fn cell_facets(&self, c: usize) -> &[usize] {
        &self.cell_facets[c][..self.dim + 1]
    }

    /// Sorted vertex indices of a facet (`dim` entries).
    pub fn facet(&self, f: usize) -> &[usize] {
        &self.facets[f][..self.dim]
    }

    pub fn facet_cells(&self, f: usize) -> FacetCells {
        self.facet_cells[f]
    }

    pub fn is_boundary_facet(&self, f: usize) -> bool {
        self.facet_cells[f].second.is_none()
    }

    pub fn cell_diameter(&self, c: usize) -> T {
        self.h_cell[c]
    }

    /// Global mesh size, the largest cell diameter.
    pub fn h(&self) -> T {
        self.h
    }

    pub fn grid(&self) -> Option<&GridInfo<T>> {
        self.grid.as_ref()
    }

    pub fn cell_geometry(&self, c: usize) -> CellGeometry<T> {
        let d = self.dim;
        let verts = self.cell(c);
        let origin = self.vertices[verts[0]];
        let mut jacobian = zero33();
        for j in 0..d {
            let vj = &self.vertices[verts[j + 1]];
            for i in 0..d {
                jacobian[i][j] = vj[i] - origin[i];
            }
        }
        let det = determinant(&jacobian, d);
        let fact = if d == 2 { T::lit(2.0) } else { T::lit(6.0) };
        CellGeometry {
            origin,
            jacobian,
            inverse: inverse(&jacobian, d),
            det,
            volume: det.abs() / fact,
            diameter: self.diameter_of(verts),
        }
    }

    /// Local index (within `cell`) of the facet `f`, i.e. the opposite vertex.
    pub fn local_facet_index(&self, c: usize, f: usize) -> Option<usize> {
        self.cell_facets(c).iter().position(|&g| g == f)
    }

    /// Unit normal of facet `f` pointing out of cell `c`.
    pub fn outward_normal(&self, c: usize, f: usize) -> Point<T> {
        let local = self
            .local_facet_index(c, f)
            .expect("facet belongs to the cell");
        let opposite = self.vertices[self.cells[c][local]];
        let fv = self.facet(f);
        let a = self.vertices[fv[0]];
        let mut n = zero3();
        if self.dim == 2 {
            let b = self.vertices[fv[1]];
            n[0] = b[1] - a[1];
            n[1] = a[0] - b[0];
        } else {
            let b = self.vertices[fv[1]];
            let c3 = self.vertices[fv[2]];
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c3[0] - a[0], c3[1] - a[1], c3[2] - a[2]];
            n = [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ];
        }
        let norm = n.iter().map(|&x| x * x).sum::<T>().sqrt();
        let mut inward = T::zero();
        for i in 0..3 {
            n[i] /= norm;
            inward += n[i] * (opposite[i] - a[i]);
        }
        if inward > T::zero() {
            for x in n.iter_mut() {
                *x = -*x;
            }
        }
        n
    }

    /// Length (2D) or area (3D) of a facet.
    pub fn facet_measure(&self, f: usize) -> T {
        let fv = self.facet(f);
        let a = self.vertices[fv[0]];
        let b = self.vertices[fv[1]];
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        if self.dim == 2 {
            (u[0] * u[0] + u[1] * u[1]).sqrt()
        } else {
            let c = self.vertices[fv[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let cr = [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ];
            (cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]).sqrt() / T::lit(2.0)
        }
    }

    /// Finds a cell containing `x` together with its reference coordinates.
    ///
    /// Uses the structured layout; points on shared facets resolve to the
    /// candidate with the largest minimal barycentric coordinate.
    pub fn locate(&self, x: &Point<T>) -> Option<(usize, Point<T>)> {
        let grid = self.grid.as_ref()?;
        let d = self.dim;
        let n = grid.subdivisions;
        let tol = T::lit(1e-10);
        let mut idx = [0usize; 3];
        for a in 0..d {
            let s = (x[a] - grid.domain.lower[a]) / grid.spacing[a];
            if s < -tol || s > T::from_count(n) + tol {
                return None;
            }
            let i = s.floor().to_f64_lossy();
            idx[a] = (i.max(0.0) as usize).min(n - 1);
        }
        let block = if d == 2 {
            idx[0] + n * idx[1]
        } else {
            idx[0] + n * (idx[1] + n * idx[2])
        };
        let mut best: Option<(usize, Point<T>, T)> = None;
        for t in 0..grid.cells_per_block {
            let c = block * grid.cells_per_block + t;
            let geo = self.cell_geometry(c);
            let xi = geo.to_reference(x, d);
            let mut lam_min = T::one() - (0..d).map(|i| xi[i]).sum::<T>();
            for &v in xi.iter().take(d) {
                lam_min = lam_min.min(v);
            }
            if best.as_ref().map_or(true, |b| lam_min > b.2) {
                best = Some((c, xi, lam_min));
            }
        }
        best.filter(|b| b.2 >= -tol).map(|b| (b.0, b.1))
    }

    /// Writes a plain-text dump: header, vertex list, cell list.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# phifem mesh")?;
        writeln!(out, "dim {}", self.dim)?;
        writeln!(out, "vertices {}", self.vertices.len())?;
        for v in &self.vertices {
            let coords: Vec<String> = v[..self.dim].iter().map(|c| format!("{c:.17e}")).collect();
            writeln!(out, "{}", coords.join(" "))?;
        }
        writeln!(out, "cells {}", self.cells.len())?;
        for c in 0..self.cells.len() {
            let ids: Vec<String> = self.cell(c).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", ids.join(" "))?;
        }
        Ok(())
    }

    fn diameter_of(&self, verts: &[usize]) -> T {
        let mut dmax = T::zero();
        for (a, &va) in verts.iter().enumerate() {
            for &vb in &verts[a + 1..] {
                let p = &self.vertices[va];
                let q = &self.vertices[vb];
                let dist = (0..self.dim)
                    .map(|i| (p[i] - q[i]) * (p[i] - q[i]))
                    .sum::<T>()
                    .sqrt();
                dmax = dmax.max(dist);
            }
        }
        dmax
    }

    fn orient_cells(&mut self) {
        let d = self.dim;
        for c in 0..self.cells.len() {
            if self.cell_geometry(c).det < T::zero() {
                self.cells[c].swap(d - 1, d);
            }
        }
    }

    fn build_facets(&mut self) {
        let d = self.dim;
        let mut index: HashMap<[usize; 3], usize> = HashMap::with_capacity(self.cells.len() * 2);
        let mut cell_facets = vec![[usize::MAX; 4]; self.cells.len()];
        for c in 0..self.cells.len() {
            for local in 0..=d {
                let mut key = [usize::MAX; 3];
                let mut w = 0;
                for (m, &v) in self.cells[c][..=d].iter().enumerate() {
                    if m != local {
                        key[w] = v;
                        w += 1;
                    }
                }
                key[..d].sort_unstable();
                let id = match index.get(&key) {
                    Some(&id) => {
                        self.facet_cells[id].second = Some(c);
                        id
                    }
                    None => {
                        let id = self.facets.len();
                        index.insert(key, id);
                        self.facets.push(key);
                        self.facet_cells.push(FacetCells {
                            first: c,
                            second: None,
                        });
                        id
                    }
                };
                cell_facets[c][local] = id;
            }
        }
        self.cell_facets = cell_facets;
    }

    fn compute_sizes(&mut self) {
        self.h_cell = (0..self.cells.len())
            .map(|c| self.diameter_of(self.cell(c)))
            .collect();
        self.h = self.h_cell.iter().fold(T::zero(), |a, &b| a.max(b));
    }
}

/// A facet of a sub-mesh with exactly one incident sub-mesh cell.
#[derive(Clone, Debug)]
pub struct ExteriorFacet<T> {
    pub facet: usize,
    pub cell: usize,
    /// Unit normal pointing out of the sub-mesh.
    pub normal: Point<T>,
}

/// A subset of background cells together with its interior/exterior facets.
#[derive(Clone, Debug)]
pub struct SubMesh<T> {
    cell_ids: Vec<usize>,
    mask: Vec<bool>,
    exterior_facets: Vec<ExteriorFacet<T>>,
    interior_facets: Vec<usize>,
}

pub fn extract_submesh<T: Real>(mesh: &Mesh<T>, cell_ids: &[usize]) -> Result<SubMesh<T>> {
    if cell_ids.is_empty() {
        return Err(Error::EmptyCellSet);
    }
    let mut mask = vec![false; mesh.num_cells()];
    for &c in cell_ids {
        if c >= mesh.num_cells() {
            return Err(Error::InvalidInput(format!(
                "cell id {c} out of range ({} cells)",
                mesh.num_cells()
            )));
        }
        if mask[c] {
            return Err(Error::InvalidInput(format!("duplicate cell id {c}")));
        }
        mask[c] = true;
    }
    let mut ids = cell_ids.to_vec();
    ids.sort_unstable();

    let mut exterior_facets = Vec::new();
    let mut interior_facets = Vec::new();
    for f in 0..mesh.num_facets() {
        let fc = mesh.facet_cells(f);
        let a = mask[fc.first];
        let b = fc.second.map_or(false, |s| mask[s]);
        match (a, b) {
            (true, true) => interior_facets.push(f),
            (true, false) => exterior_facets.push(ExteriorFacet {
                facet: f,
                cell: fc.first,
                normal: mesh.outward_normal(fc.first, f),
            }),
            (false, true) => {
                let c = fc.second.unwrap();
                exterior_facets.push(ExteriorFacet {
                    facet: f,
                    cell: c,
                    normal: mesh.outward_normal(c, f),
                })
            }
            (false, false) => {}
        }
    }
    Ok(SubMesh {
        cell_ids: ids,
        mask,
        exterior_facets,
        interior_facets,
    })
}

impl<T: Real> SubMesh<T> {
    /// Sorted cell ids.
    pub fn cells(&self) -> &[usize] {
        &self.cell_ids
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.mask.get(cell).copied().unwrap_or(false)
    }

    pub fn exterior_facets(&self) -> &[ExteriorFacet<T>] {
        &self.exterior_facets
    }

    /// Facets shared by two sub-mesh cells, ascending.
    pub fn interior_facets(&self) -> &[usize] {
        &self.interior_facets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(n: usize) -> Mesh<f64> {
        build_background_mesh(&BoxDomain::new(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), n).unwrap()
    }

    #[test]
    fn single_square_counts() {
        let m = unit_square(1);
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_cells(), 2);
        assert_eq!(m.num_facets(), 5);
        let boundary = (0..5).filter(|&f| m.is_boundary_facet(f)).count();
        assert_eq!(boundary, 4);
    }

    #[test]
    fn default_box_mesh_size() {
        let b = BoxDomain::<f64>::centered(2, 1.5).unwrap();
        let m = build_background_mesh(&b, 8).unwrap();
        assert!((m.h() - 0.5303300858899106).abs() < 1e-15);
    }

    #[test]
    fn unit_cube_kuhn_split() {
        let b = BoxDomain::<f64>::new(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        let m = build_background_mesh(&b, 1).unwrap();
        assert_eq!(m.num_vertices(), 8);
        assert_eq!(m.num_cells(), 6);
        for c in 0..6 {
            let g = m.cell_geometry(c);
            assert!(g.det > 0.0);
            assert!((g.volume - 1.0 / 6.0).abs() < 1e-15);
        }
        assert!((m.h() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let b = BoxDomain::new(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(build_background_mesh(&b, 0).is_err());
        assert!(BoxDomain::new(&[0.0, 1.0], &[1.0, 1.0]).is_err());
        assert!(BoxDomain::new(&[0.0], &[1.0]).is_err());
        assert!(BoxDomain::new(&[0.0, 0.0], &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn volumes_sum_to_box() {
        for (dim, n) in [(2, 7), (3, 4)] {
            let b = BoxDomain::<f64>::centered(dim, 1.5).unwrap();
            let m = build_background_mesh(&b, n).unwrap();
            let total: f64 = (0..m.num_cells()).map(|c| m.cell_geometry(c).volume).sum();
            assert!((total - b.volume()).abs() / b.volume() < 1e-12);
        }
    }

    #[test]
    fn internal_facets_have_opposite_normals() {
        for dim in [2, 3] {
            let b = BoxDomain::<f64>::centered(dim, 1.0).unwrap();
            let m = build_background_mesh(&b, 3).unwrap();
            for f in 0..m.num_facets() {
                let fc = m.facet_cells(f);
                if let Some(s) = fc.second {
                    let a = m.outward_normal(fc.first, f);
                    let bn = m.outward_normal(s, f);
                    for i in 0..3 {
                        assert!((a[i] + bn[i]).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn h_is_max_cell_diameter_and_deterministic() {
        let b = BoxDomain::<f64>::centered(3, 1.5).unwrap();
        let m1 = build_background_mesh(&b, 3).unwrap();
        let m2 = build_background_mesh(&b, 3).unwrap();
        let hmax = (0..m1.num_cells())
            .map(|c| m1.cell_geometry(c).diameter)
            .fold(0.0, f64::max);
        assert_eq!(hmax, m1.h());
        assert_eq!(m1.vertices(), m2.vertices());
        assert_eq!(m1.cells, m2.cells);
    }

    #[test]
    fn reference_and_scaled_triangle_geometry() {
        let m = unit_square(1);
        // cell 0 = (0,0),(1,0),(1,1): J = [[1,1],[0,1]]
        let g = m.cell_geometry(0);
        assert!((g.volume - 0.5).abs() < 1e-15);
        let b = BoxDomain::<f64>::new(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
        let m2 = build_background_mesh(&b, 1).unwrap();
        let g2 = m2.cell_geometry(0);
        assert!((g2.det - 4.0).abs() < 1e-15);
        assert!((g2.volume - 2.0).abs() < 1e-15);
    }

    #[test]
    fn locate_round_trips() {
        let b = BoxDomain::<f64>::centered(3, 1.5).unwrap();
        let m = build_background_mesh(&b, 4).unwrap();
        for c in [0, 17, 100, m.num_cells() - 1] {
            let g = m.cell_geometry(c);
            let xi = [0.2, 0.3, 0.1];
            let x = g.to_physical(&xi, 3);
            let (found, xi2) = m.locate(&x).unwrap();
            assert_eq!(found, c);
            for i in 0..3 {
                assert!((xi[i] - xi2[i]).abs() < 1e-12);
            }
        }
        assert!(m.locate(&[2.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn submesh_exterior_facets() {
        let m = unit_square(1);
        let all = extract_submesh(&m, &[0, 1]).unwrap();
        assert_eq!(all.exterior_facets().len(), 4);
        assert_eq!(all.interior_facets().len(), 1);
        let one = extract_submesh(&m, &[1]).unwrap();
        assert_eq!(one.exterior_facets().len(), 3);
        assert!(extract_submesh(&m, &[]).is_err());
        assert!(extract_submesh(&m, &[0, 0]).is_err());
        assert!(extract_submesh(&m, &[5]).is_err());
    }

    #[test]
    fn text_dump_has_expected_layout() {
        let m = unit_square(1);
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1], "dim 2");
        assert_eq!(lines[2], "vertices 4");
        assert_eq!(lines[7], "cells 2");
        assert_eq!(lines.len(), 10);
    }
}
