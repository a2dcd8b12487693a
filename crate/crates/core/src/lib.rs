pub mod aut;
pub mod cocycle;
pub mod error;
pub mod group;
pub mod io;
pub mod linalg;
pub mod model;
pub mod nonnormal;
pub mod rep;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use group::{CosetDecomposition, FiniteGroup, GroupHomomorphism, QuotientGroup, Subgroup};
