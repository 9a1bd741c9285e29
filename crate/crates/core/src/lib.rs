//! Contextuality of Pauli observables over Z/p: symplectic linear algebra,
//! the event presheaf, empirical models, exact decision procedures and
//! low-degree topology of the classifying space.

pub mod covers;
pub mod decision;
pub mod error;
pub mod gfp;
pub mod pauli;
pub mod presheaf;
pub mod quantum;
pub mod rational;
pub mod topology;

pub use error::{Error, Result};
