//! kleinvol computes volumes of moduli spaces of bordered Klein surfaces:
//! closed forms at Euler characteristic −1, the ε-regularised volume
//! recursion with its b-deformation, exact orientable Weil–Petersson
//! polynomials by rational reconstruction, and the refined-topological-
//! recursion side of the volume/correlator dictionary.

pub mod cheb;
pub mod chi1;
pub mod engine;
pub mod error;
pub mod identities;
pub mod kernels;
pub mod quad;
pub mod real;
pub mod specfun;
pub mod surrogate;
pub mod topology;
pub mod wp;

pub use error::{Error, Result};
pub use kernels::RegEps;
pub use real::{Field, Precision, Real};
pub use engine::{DispatchPath, Engine, EngineConfig, VolumeQuery, VolumeResult};
pub use topology::{Topology, VolumeKind};
