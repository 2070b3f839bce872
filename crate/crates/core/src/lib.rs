//! Shift spaces `X_R` with almost specification and multiple measures of
//! maximal entropy, as executable objects.
//!
//! The crate covers:
//! - [`model`]: parameters, the two-row alphabet, words and restriction families;
//! - [`language`]: word classes and membership in the language of `X_R`;
//! - [`counting`]: exact counts and the summability condition;
//! - [`certify`]: gap indices and the gluing procedures behind weak and almost
//!   specification;
//! - [`ct`]: the decomposition `(Mon, good words, ∅)` and its conditions;
//! - [`factor`]: color-merging factor maps and the intrinsic-ergodicity criterion;
//! - [`product`]: a product system with weak but without almost specification,
//!   including a replayable refutation certificate.

pub mod certify;
pub mod counting;
pub mod ct;
pub mod error;
pub mod factor;
pub mod json;
pub mod language;
pub mod model;
pub mod product;

pub use error::{Error, ErrorKind, Result};
pub use language::XrShift;
pub use model::{Params, RestrictionFamily, Symbol, Word};
