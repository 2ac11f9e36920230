//! Exact arithmetic for the negative-correlation behaviour of spanning
//! forests.
//!
//! The crate computes spanning-forest and spanning-tree generating
//! polynomials of multigraphs, their Rayleigh differences
//! `ΔG{e,f} = G_e·G_f − G·G_{ef}`, and the companion quantity
//! `ΦG{e} = (G^e − G_e)·G_e`, all over arbitrary-precision integers.
//! On top of that it builds and checks sum-of-squares certificates for
//! those quantities: recursively over the series-parallel structure of a
//! graph, or by exhaustive sign search on small general graphs.
//!
//! Everything in here is pure and allocation-only; IO, file formats and
//! the command-line front end live in the companion `rayforest-cli`
//! crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cert;
pub mod construct;
pub mod graph;
pub mod poly;
pub mod rayleigh;
pub mod rng;
pub mod sp;

pub use cert::{DeltaCert, PhiCert, SearchOutcome, Sign, VerifyOutcome};
pub use construct::CertPair;
pub use graph::{EdgeId, GraphError, MultiGraph};
pub use poly::{Monomial, PolyError, Polynomial, RationalPoint};
pub use sp::{SpBase, SpRecipe, SpStep};
