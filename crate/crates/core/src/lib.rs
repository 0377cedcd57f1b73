//! Finitely presented C∞-rings over `R^n` with certified zero-set reasoning.
//!
//! Elements are symbolic smooth functions ([`termlang::Term`]); every
//! statement that quantifies over points of `R^n` is answered relative to a
//! compact rational box by [`zerocert`], which returns a three-valued
//! [`zerocert::Verdict`] backed by a re-checkable certificate.

pub mod cring;
pub mod filterideal;
pub mod order;
pub mod radical;
pub mod rational;
pub mod session;
pub mod sheaf;
pub mod spectrum;
pub mod termlang;
pub mod upoly;
pub mod zerocert;
