//! Generalized quantum entropies, Holevo quantities and quantum discord for
//! finite-dimensional systems.
//!
//! The crate evaluates the von Neumann, Rényi, Tsallis and quadratic
//! entropies, the mutual information and measured Holevo quantity built from
//! them, and the discord `δ_K(P_a,b) = S_K(a:b) − χ_K(P_a,b)` for arbitrary
//! POVMs. On top of that it checks firm subadditivity (`δ_K ≥ 0`) and its
//! equivalent forms on random instances, and searches for states where it
//! fails.
//!
//! Module map:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, partial trace
//! - [`states`]: density matrices, POVMs, ensembles, channels, random generators
//! - [`entropy`]: entropy families and trace distances
//! - [`infotheory`]: mutual information, Holevo quantities, discord, condition reports
//! - [`search`]: sweeps over `q` and derivative-free counterexample search
//! - [`suites`]: randomized property suites over every inequality
//! - [`io`]: JSON and CSV formats shared with the command-line tool

pub mod entropy;
pub mod error;
pub mod infotheory;
pub mod io;
pub mod linalg;
pub mod search;
pub mod states;
pub mod suites;

pub use entropy::{entropy, EntropyKind};
pub use error::{Error, Result};
pub use infotheory::{discord, holevo, holevo_measured, mutual_information, ConditionReport};
pub use linalg::ComplexMatrix;
pub use states::{DensityMatrix, Ensemble, KrausChannel, Povm, Rng};
