use super::basis::LagrangeBasis;
use crate::mesh::Mesh;
use crate::scalar::{zero3, Point, Real};
use std::collections::HashMap;

/// Continuous global numbering of Lagrange nodes on a set of cells.
///
/// A node is identified by the multiset of global vertices weighting it
/// (`alpha_i` copies of vertex `v_i`), so cells sharing a vertex, edge or
/// face agree on the numbering without any orientation bookkeeping.
#[derive(Clone, Debug)]
pub struct DofMap<T> {
    n_local: usize,
    cells: Vec<usize>,
    /// Position of a background cell in `cells`, `usize::MAX` when absent.
    slot: Vec<usize>,
    cell_dofs: Vec<usize>,
    coords: Vec<Point<T>>,
}

pub fn build_dofmap<T: Real>(mesh: &Mesh<T>, cells: &[usize], basis: &LagrangeBasis<T>) -> DofMap<T> {
    let n_local = basis.len();
    let d = mesh.dim();
    let p = T::from_count(basis.degree());
    let mut slot = vec![usize::MAX; mesh.num_cells()];
    let mut index: HashMap<[usize; 4], usize> = HashMap::with_capacity(cells.len() * n_local);
    let mut cell_dofs = Vec::with_capacity(cells.len() * n_local);
    let mut coords = Vec::new();
    for (s, &c) in cells.iter().enumerate() {
        slot[c] = s;
        let verts = mesh.cell(c);
        for alpha in basis.multi_indices() {
            let mut key = [usize::MAX; 4];
            let mut w = 0;
            for (i, &v) in verts.iter().enumerate() {
                for _ in 0..alpha[i] {
                    key[w] = v;
                    w += 1;
                }
            }
            key[..w].sort_unstable();
            let next = coords.len();
            let id = *index.entry(key).or_insert(next);
            if id == next {
                let mut x = zero3();
                for (i, &v) in verts.iter().enumerate() {
                    let wgt = T::from_count(alpha[i]) / p;
                    let xv = mesh.vertex(v);
                    for a in 0..d {
                        x[a] += wgt * xv[a];
                    }
                }
                coords.push(x);
            }
            cell_dofs.push(id);
        }
    }
    DofMap {
        n_local,
        cells: cells.to_vec(),
        slot,
        cell_dofs,
        coords,
    }
}

impl<T: Real> DofMap<T> {
    pub fn n_dofs(&self) -> usize {
        self.coords.len()
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    /// Cells carrying unknowns, in the order their dofs were numbered.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.slot.get(cell).map_or(false, |&s| s != usize::MAX)
    }

    /// Global indices of the shape functions of a background cell.
    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        let s = self.slot[cell];
        debug_assert!(s != usize::MAX, "cell {cell} has no dofs");
        &self.cell_dofs[s * self.n_local..(s + 1) * self.n_local]
    }

    /// Physical coordinates of each global node.
    pub fn coordinates(&self) -> &[Point<T>] {
        &self.coords
    }

    /// Nodal interpolation of a function.
    pub fn interpolate(&self, f: impl Fn(&Point<T>) -> T) -> Vec<T> {
        self.coords.iter().map(f).collect()
    }
}
