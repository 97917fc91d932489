//! Exact-arithmetic engine for the combinatorial and homological-algebra side
//! of symplectic cohomology of Liouville domains.
//!
//! Everything is computed over exact scalars (arbitrary-precision rationals or
//! prime fields); no floating point enters any rank computation. The only
//! floating-point numbers in the crate are the growth-exponent estimates in
//! [`reeb`], which are estimates by nature.
//!
//! The crate is organized around the universal value type [`GradedSpace`]:
//!
//! * [`field`] / [`matrix`] — exact scalars and dense exact matrices;
//! * [`graded`] — graded vector spaces, homogeneous maps, homology, (co)limits;
//! * [`spectral`] — bigraded pages, page-turning, windowed degeneration
//!   certificates, edge data;
//! * [`morse_bott`] — builders for the circle-action first pages and the four
//!   builtin worked cases;
//! * [`reeb`] — radial-Hamiltonian orbit/action bookkeeping, orbit counting,
//!   growth-rate extraction, continuation-schedule bounds;
//! * [`novikov`] — truncated Novikov series, obstruction classes, order-by-order
//!   Maurer-Cartan solving;
//! * [`surgery`] — the expression language of Liouville models and its
//!   compositional evaluator.
//!
//! All values are immutable after construction and safe to move between
//! threads; all operations are pure functions.

pub mod error;
pub mod field;
pub mod graded;
pub mod matrix;
pub mod morse_bott;
pub mod novikov;
pub mod reeb;
pub mod spectral;
pub mod surgery;

pub use error::{Error, Result};
pub use field::{FieldTag, Scalar};
pub use graded::{
    direct_sum, homology, shift, tensor_product, tensor_product_window, DirectedSystem, Direction,
    GradedMap, GradedSpace, Grading, LimitData, Progression,
};
pub use matrix::Matrix;
pub use morse_bott::{BoundaryModel, BuiltinCase};
pub use novikov::{Deformation, DiscClass, DiscData, EssentialVerdict, McOutcome, NovikovSeries};
pub use reeb::{
    CountFunction, GrowthRate, LadderVerdict, Orbit, RadialProfile, ReebSpectrum, ScheduleGap,
    TorusPieceProfile,
};
pub use spectral::{
    degeneration_check, edge_data, run_pages, turn_page, DegenerationVerdict, Differential,
    EdgeData, Page, RunResult, SpectralSystem, Spot,
};
pub use surgery::{EvalConfig, FiniteTypeVerdict, SHValue, SpaceExpr, SphereVerdict};
