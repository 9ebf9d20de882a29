//! Unfitted finite elements for the heat equation on level-set domains.

pub mod analysis;
pub mod assembly;
pub mod cases;
pub mod discretization;
pub mod elements;
pub mod error;
pub mod levelset;
pub mod mesh;
pub mod pipeline;
pub mod scalar;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::{Point, Real};

pub use analysis::{ConvergenceReport, ErrorRecord, FittedOrders};
pub use cases::{builtin_case, CaseConfig, TestCase};
pub use discretization::{DiscreteField, Discretization};
pub use mesh::{build_background_mesh, BoxDomain, Mesh};
pub use pipeline::{run_ladder, RunSettings};
pub use solver::{solve_heat, DtRule, HeatProblem, SolverOptions, TimeGrid, Trajectory};
pub use sparse::SolverKind;

pub type Mesh64 = Mesh<f64>;
pub type Mesh32 = Mesh<f32>;
pub type Discretization64 = Discretization<f64>;
pub type Discretization32 = Discretization<f32>;
pub type TestCase64 = TestCase<f64>;
pub type TestCase32 = TestCase<f32>;
pub type RunSettings64 = RunSettings<f64>;
pub type RunSettings32 = RunSettings<f32>;
