//! Compact, arithmetic-coded representation of AVL and left-leaning AVL
//! tree shapes, together with the counting machinery used to measure how
//! close the encoding gets to the information-theoretic minimum.
//!
//! The crate is split along the lines of the pipeline:
//!
//! - [`tree`]: tree shapes, validation, node statistics, exhaustive
//!   enumeration, exact counting, uniform sampling, and the level-order
//!   bitmap and parenthesis text formats.
//! - [`coder`]: an integer range coder over exact frequency models.
//! - [`codec`]: the balance-symbol encoding with its self-describing header,
//!   decoding by depth propagation, and size accounting.
//! - [`gf`]: height-indexed polynomial recursions, fixed points, and
//!   bracketed estimates of the growth constant.
//! - [`corpus`]: seeded random corpora measured in parallel or sequentially.

pub mod bits;
pub mod codec;
pub mod coder;
pub mod corpus;
pub mod error;
pub mod gf;
pub mod par;
pub mod tree;

pub use error::{Error, Result};
pub use par::Execution;
pub use tree::{AvlTree, TreeClass};
