//! Weil algebras, the Weil functors they induce, and finite models for
//! checking the surrounding category-theoretic laws.
//!
//! * [`algebra`]: monomial-quotient Weil algebras, tensor products, morphisms.
//! * [`number`]: Weil numbers over `f64`, exact rationals, or other Weil numbers.
//! * [`expr`] and [`functor`]: smooth maps as expression DAGs, lifted to W-points.
//! * [`fincat`]: finite categories, set-valued functors, exponentials and slices.
//! * [`laws`]: the executable law suite across both models.
//! * [`cli`]: the `weilad` command line.

pub mod algebra;
pub mod cli;
pub mod expr;
pub mod fincat;
pub mod functor;
pub mod laws;
mod linalg;
pub mod number;
pub mod report;
pub mod scalar;

pub use algebra::{tensor, Monomial, StandardAlgebra, WeilAlgebra, WeilMorphism};
pub use expr::{parse_expr, SmoothMap};
pub use functor::{fd_oracle, jet, lift_eval, nest_iso, partials, unnest_iso, JetTable, Normalization};
pub use number::{Primitive, WeilNumber};
pub use report::ValidationReport;
pub use scalar::{Rational, Scalar, ScalarMode};
