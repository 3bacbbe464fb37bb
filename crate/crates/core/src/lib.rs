//! Correlated bond-triangular ("flower") percolation on hexagonal tilings.
//!
//! The crate has two halves that share one lattice and one model:
//!
//! * an exact side ([`flower`]) that enumerates a single flower in rational
//!   arithmetic and checks the colour-switching, permission and correlation
//!   identities of the model;
//! * a Monte Carlo side ([`estimator`]) that samples whole domains, measures
//!   crossing, separation, ring and one-arm events, and compares the
//!   Cardy–Carleson functions with the harmonic triple in [`cardy`].
//!
//! Sampling runs replica-parallel on rayon when the `parallel` feature is
//! enabled (the default). Every study takes an [`engine::Engine`]; a single
//! worker gives a sequential run with bit-identical output.

pub mod cardy;
pub mod connectivity;
pub mod dsu;
pub mod engine;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod flower;
pub mod geometry;
pub mod model;
pub mod render;

pub use error::{Error, Result};
pub use geometry::{ArcName, Domain, FloralArrangement, HexCoord, VertexId};
pub use model::{Color, Configuration, HexState, ModelParams, PetalConfig};
