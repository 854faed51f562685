//! Quasi-periodic CMV matrices: sampling models on the torus, Szegő and
//! Gesztesy–Zinchenko transfer cocycles, Lyapunov exponents and large
//! deviation estimates, finite-volume Green's functions, eigenphases and
//! the split-step quantum walks that share the same unitary structure.

pub mod cmvop;
pub mod cocycle;
pub mod error;
pub mod linalg;
pub mod lyapunov;
pub mod model;
pub mod qwalk;
pub mod spectral;
pub mod torus;

pub use cmvop::{CharDet, FiniteCMV};
pub use cocycle::{CocycleKind, SpectralPoint};
pub use error::{Error, Result};
pub use model::{CoinField, SamplingFunction, TrigPoly};
pub use torus::{Frequency, Phase};
