//! Exact non-termination analysis for homogeneous linear loops.
//!
//! A loop `while (Bx > 0) { x := Ax }` over two real variables has a
//! non-termination set (the inputs on which it runs forever) that is always
//! empty, a ray, or a planar sector. This crate computes that set exactly,
//! with eigen-data living in a single real quadratic field `Q(sqrt(d))`, and
//! ships an independent exact simulator for cross-checking.
//!
//! For three variables the set need not be semi-algebraic; [`demo3`]
//! exposes the computable evidence for that on the loop with update
//! `diag(2, 3, 5)`.

pub mod demo3;
pub mod exact;
pub mod frontend;
pub mod linalg;
pub mod ntcore;
pub mod oracle;

pub use exact::{QuadNum, Rational, Scalar, Sign};
pub use frontend::LoopSpec;
pub use linalg::{EigenInfo, Mat2, Matrix, Vec2};
pub use ntcore::{AnalysisReport, CaseTag, LoopAnalysis, NtSet};
pub use oracle::{FuzzConfig, FuzzReport, SimResult};

/// Dimension-generic rational matrix, used for simulation and the 3-variable demo.
pub type RatMat = Matrix<Rational>;
/// Planar vector with rational coordinates.
pub type RatVec2 = Vec2<Rational>;
/// Planar vector over `Q(sqrt(d))`; generators of non-termination sets.
pub type QuadVec2 = Vec2<QuadNum>;
/// 2x2 matrix with rational entries.
pub type RatMat2 = Mat2<Rational>;
/// 2x2 matrix over `Q(sqrt(d))`.
pub type QuadMat2 = Mat2<QuadNum>;
