//! Finite forcing laboratory.
//!
//! Separative posets and their regular-open algebras, Boolean-valued names
//! with truth values, generic filters, definable finite iterations and the
//! quotient projections between their stages, all over small finite
//! structures where every claim can be checked exhaustively.

pub mod bits;
pub mod boolalg;
pub mod formula;
pub mod generic;
pub mod iteration;
pub mod names;
pub mod poset;
pub mod projection;

pub use bits::{Bits, MAX_ELEMENTS};
pub use boolalg::{
    check_complete_hom, ro_algebra, AlgebraError, AlgebraLimits, BoolAlgebra, HomReport,
};
pub use formula::{parse_closed_formula, parse_formula, Formula, FormulaError, Term};
pub use generic::{
    check_truth_lemma, enumerate_generics, forces, Filter, GenericError, GenericSet,
    TruthLemmaReport,
};
pub use iteration::{
    build_iteration, check_lemma1, cifs_toy_iteration, collapse_poset, Iteration, IterationCaps,
    IterationError, StepProvider,
};
pub use names::{HfSet, NameError, NameId, NameStore, NameUniverse};
pub use poset::{validate_poset, Cut, Poset, PosetError, RegularCut};
pub use projection::{
    factor_generic, make_context, verify_corollary15, verify_lemma20_analogue,
    verify_projection_lemmas, verify_theorem2, CheckRecord, ContextFamily, Counterexample,
    ProjectionContext, ProjectionError, SuiteReport, UniverseOptions,
};
