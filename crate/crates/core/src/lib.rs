//! Exact Noether-Cremona transformations for hypersurfaces preserved by
//! diagonal finite abelian group actions, with finite-field verification.

pub mod action;
pub mod cli;
pub mod coeffs;
pub mod lattice;
pub mod nc;
pub mod poly;
pub mod scenarios;
pub mod verify;
