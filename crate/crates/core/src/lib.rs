//! Checkable algebra behind open-image Galois representation constructions:
//! root systems, Chevalley bases over `Z` and `F_p`, bracket filtrations,
//! finite-level Chevalley groups, irregular primes, and witness certificates.

pub mod chevalley;
pub mod chevgroup;
pub mod error;
pub mod filtration;
pub mod irregular;
pub mod linalg;
pub mod modp;
pub mod rootsys;
pub mod witness;

pub use error::{Error, Result};
