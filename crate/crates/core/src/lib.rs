//! Finite ordered algebras over words, omega-words and trees: syntactic
//! algebras, profinite identities, first-order definability and varieties.

pub mod algebra;
pub mod automata;
pub mod corpus;
pub mod error;
pub mod logic;
pub mod monad;
pub mod order;
pub mod profinite;
pub mod suite;
pub mod syntactic;
pub mod varieties;

pub use algebra::{Alphabet, FinAlgebra, Morphism, Recognizer};
pub use automata::{Dfa, Regex};
pub use error::{Error, Result};
pub use monad::{FreeElement, MonadKind, Slot, Tree, UpWord};
pub use order::{Elem, ElemSet, Preorder, Sort, SortedFunction, SortedOrderedSet};
