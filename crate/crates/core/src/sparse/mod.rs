//! Sparse matrices and the linear solvers used by the time loop.

mod band_lu;
mod csr;
mod gmres;
mod ordering;

pub use band_lu::BandLu;
pub use csr::{CsrMatrix, TripletBuilder};
pub use gmres::{Gmres, GmresStats, Ilu0};
pub use ordering::{bandwidth, reverse_cuthill_mckee};

pub(crate) use band_lu::relative_residual;
pub(crate) use csr::norm2;

use crate::error::Result;
use crate::scalar::Real;

/// Which linear solver backs the time loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolverKind {
    /// Banded LU with partial pivoting after reverse Cuthill-McKee reordering.
    Direct,
    /// Restarted GMRES preconditioned with ILU(0).
    Iterative { restart: usize, max_iterations: usize },
}

impl Default for SolverKind {
    fn default() -> Self {
        SolverKind::Direct
    }
}

/// A matrix prepared once for repeated solves.
#[derive(Debug)]
pub enum Factorization<T> {
    Direct(BandLu<T>),
    Iterative {
        ilu: Ilu0<T>,
        gmres: Gmres<T>,
    },
}

impl<T: Real> Factorization<T> {
    pub fn new(a: &CsrMatrix<T>, kind: SolverKind, tolerance: T) -> Result<Self> {
        match kind {
            SolverKind::Direct => Ok(Factorization::Direct(BandLu::factor(a)?)),
            SolverKind::Iterative {
                restart,
                max_iterations,
            } => Ok(Factorization::Iterative {
                ilu: Ilu0::new(a)?,
                gmres: Gmres {
                    restart,
                    max_iterations,
                    // a margin below the acceptance threshold of the caller
                    tolerance: tolerance * T::lit(0.1),
                },
            }),
        }
    }

    /// Solves `A x = b`, returning the solution and its relative residual.
    pub fn solve(&self, a: &CsrMatrix<T>, b: &[T], guess: Option<&[T]>, tolerance: T) -> Result<(Vec<T>, T)> {
        if b.iter().all(|v| *v == T::zero()) {
            return Ok((vec![T::zero(); b.len()], T::zero()));
        }
        match self {
            Factorization::Direct(lu) => Ok(lu.solve_refined(a, b, tolerance, 3)),
            Factorization::Iterative { ilu, gmres } => {
                let (x, _) = gmres.solve(a, ilu, b, guess)?;
                let res = relative_residual(a, &x, b, norm2(b));
                Ok((x, res))
            }
        }
    }
}
