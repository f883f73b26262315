//! Boolean-valued names, their truth values and their evaluation.

mod hf;
mod store;
mod truth;
mod universe;

pub use hf::{hf_universe, HfSet};
pub use store::{Evaluator, NameId, NameStore, EMPTY_NAME};
pub use truth::TruthSession;
pub use universe::{
    bounded_universe, name_universe, sampled_universe, universe_size, Coverage, NameUniverse,
};

use thiserror::Error;

use crate::bits::Bits;
use crate::boolalg::BoolAlgebra;
use crate::formula::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NameError {
    #[error("formula has free variables: {}", .0.join(", "))]
    Open(Vec<String>),
    #[error("constant ${index} is outside a universe of {len} names")]
    ConstantOutOfRange { index: usize, len: usize },
    #[error("universe of rank {rank} has {size} names, above the cap {cap}")]
    UniverseTooLarge {
        rank: usize,
        size: String,
        cap: usize,
    },
    #[error("cut index {index} is outside an algebra of {len} elements")]
    CutOutOfRange { index: usize, len: usize },
    #[error("name id {0} is not in the store")]
    UnknownName(NameId),
    #[error("names and algebra do not match")]
    MixedAlgebra,
    #[error("name literal: {0}")]
    Literal(String),
}

/// `||f||` over a universe.
pub fn truth_value(f: &Formula, universe: &NameUniverse) -> Result<usize, NameError> {
    universe.truth_value(f)
}

/// `i_G(y)` for a filter given as base-poset elements.
pub fn evaluate(algebra: &BoolAlgebra, store: &NameStore, y: NameId, filter: Bits) -> HfSet {
    Evaluator::new(algebra, store, filter).eval(y)
}
