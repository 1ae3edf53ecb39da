//! Poisson quasi-Nijenhuis calculus on R^{2n}, evaluated pointwise with exact
//! forward-mode jets, together with closed Toda lattice models, the Flaschka
//! reduction and Hamiltonian flow integration.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod dd;
pub mod diffgeo;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod flaschka;
pub mod form;
pub mod jet;
pub mod linalg;
pub mod poisson;
pub mod pqn;
pub mod toda;

pub use error::{Error, Result};
pub use field::{Chart, Field, Point};
pub use form::Form;
pub use jet::Jet;
pub use linalg::Matrix;
