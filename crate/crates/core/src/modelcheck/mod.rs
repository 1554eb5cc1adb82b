//! Model checking of first-order sentences against lifted atom sets.

mod eval;
mod verify;

pub use eval::{lift, Evaluation, Interpretation, ModelCheckError};
pub use verify::{
    herbrand_base, satisfies_all, verify_correspondence, Correspondence, Coverage, Mismatch,
    Report, VerifyError, VerifyOptions, Violation,
};
