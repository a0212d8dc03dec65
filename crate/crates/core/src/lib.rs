//! Wall-crossing for two families of BPS charges: scattering diagrams, attractor
//! flow trees, the jump-map expansion, and tropical curve counts.

pub mod cli;
pub mod error;
pub mod jump_engine;
pub mod lattice;
pub mod numeric;
pub mod quantum_algebra;
pub mod ring;
pub mod scattering;
pub mod trees;
pub mod tropical;
pub mod torus_algebra;

pub use error::{Error, Result};
