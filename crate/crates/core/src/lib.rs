//! Computational toolkit for the group `G = ⟨a, b, c, d⟩` of automorphisms of
//! the rooted binary tree, generated by a root swap and three self-similar
//! automorphisms.
//!
//! - [`portrait`]: finite tree automorphisms, their composition and the wreath isomorphism.
//! - [`word`] and [`group`]: spellings, reduction, the wreath splitting and the word-problem solver.
//! - [`analysis`]: level stabilizers, coset tables and the level-3 splitting.
//! - [`growth`]: Cayley-ball enumeration, growth series and the numeric bound checks.
//! - [`verify`]: named check suites used by the CLI and the acceptance tests.
//! - [`scaling`]: timing harness for the solver.

pub mod analysis;
pub mod error;
pub mod group;
pub mod growth;
pub mod portrait;
pub mod scaling;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use group::{are_equal, eta, is_identity, order, portrait_of, psi_split, Order, WreathSplit};
pub use portrait::{Portrait, SubtreeEmbedding, Vertex};
pub use word::{classify_type, reduce, Letter, ReducedWord, TypeTag, Word};
