//! Exact algebra for Chen–Strichartz expansions of Lévy-driven SDE flowmaps.

pub mod basis_change;
pub mod chen_strichartz;
pub mod error;
pub mod levy_sim;
pub mod prelie_trees;
pub mod quasi_shuffle_hopf;
pub mod series;
pub mod vector_fields;
pub mod verify;
pub mod word_algebra;

pub use error::{Error, Result};
pub use series::{q, qi, Rational, Series};
