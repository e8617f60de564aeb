//! Finite, exhaustively checkable model: set-valued functors on small
//! categories, their exponentials (plain and sliced), precomposition with
//! endofunctors, and the comparison and localization checks built on them.

use thiserror::Error;

mod category;
mod compat;
mod csp;
mod endo;
mod enumerate;
mod exponential;
mod functor;
mod io;
mod limits;
mod localization;
mod slice;

pub mod bundled;

pub use category::{Arrow, FinCat, Mor, Obj};
pub use compat::{exp_compat_check, exp_compat_check_slice, Comparison, CompatReport};
pub use endo::{
    alpha_of, precompose, precompose_nat, sliced_alpha, sliced_t, sliced_t_map, sliced_t_with_inclusion, Endofunctor, EndofunctorData,
    NaturalFamily,
};
pub use enumerate::{functors_up_to_iso, nat_transformations, slice_morphisms, Bound};
pub use exponential::{verify_ccc, verify_ccc_with, CccReport, Exponential, ProbeOutcome};
pub use functor::{FinFunctor, NatTrans};
pub use io::{load_instance, parse_instance, CccRole, CheckKind, CheckRoles, CompatRole, Instance, LocalizationRole};
pub use limits::{equalizer, fibered_product, initial, pairing, product, terminal};
pub use localization::{flatten_slice, localization_check, FlattenedSlice, IteratedObject};
pub use slice::{slice_exponential, verify_slice_ccc, SliceExponential, SlicedObject};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FinCatError {
    #[error("malformed category: {0}")]
    Category(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("malformed functor: {0}")]
    Functor(String),
    #[error("not natural: {0}")]
    NonNatural(String),
    #[error("not a functor: {0}")]
    NotFunctorial(String),
    #[error("operands live over different categories")]
    CategoryMismatch,
    #[error("{what}: {candidates} candidates exceed the enumeration bound {bound}")]
    SizeLimit { what: String, candidates: u128, bound: u64 },
    #[error("instance file: {0}")]
    Instance(String),
}
