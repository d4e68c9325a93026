//! Exact integrals of boundary-divisor monomials on the moduli space of
//! stable `n`-pointed genus-zero curves.
//!
//! The main path is [`forest::eval`]: classify the monomial, build its
//! loaded tree, and evaluate it with the redundancy-forest algorithm.
//! [`oracle::oracle_eval`] computes the same numbers by recursive edge
//! cutting and is used for differential testing.

pub mod binomial;
pub mod expr;
pub mod forest;
pub mod labels;
pub mod model;
pub mod oracle;
pub mod serial;
pub mod tree;

pub use expr::{parse_monomial, render_monomial, ParseError};
pub use forest::{eval, eval_tree, evaluate, Evaluation, ForestError};
pub use labels::{Label, LabelSet};
pub use model::{classify, Classification, Cut, IntegerValue, ModelError, Monomial};
pub use oracle::oracle_eval;
pub use serial::{ToDot, TreeJson};
pub use tree::{monomial_to_tree, random_proper_tree, tree_to_monomial, LoadedTree, TreeEdge, TreeError};
