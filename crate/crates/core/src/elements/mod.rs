//! Reference-simplex Lagrange bases, quadrature and global degree-of-freedom numbering.

mod basis;
mod dofmap;
mod quadrature;

pub use basis::{
    laplacian, make_basis, push_forward_gradient, push_forward_hessian, LagrangeBasis,
    ReferenceTable, ShapeEval,
};
pub use dofmap::{build_dofmap, DofMap};
pub use quadrature::{gauss_legendre_unit, make_quadrature, QuadratureRule};
