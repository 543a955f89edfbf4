//! Adversarial hypothesis testing for quantum, classical-quantum and
//! entanglement-breaking channels.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: Hermitian eigendecomposition, spectral functions, the
//!   Fréchet derivative of the logarithm.
//! * [`qobjects`]: states, Kraus channels, CQ channels, distributions.
//! * [`divergences`]: relative entropies, fidelity, Neyman–Pearson tests and
//!   the minimax errors for families of operators.
//! * [`optimize`]: convex minimisation of channel divergences.
//! * [`multicopy`]: tensor powers, the method of types, finite-n estimates.
//! * [`harness`]: named instances, Stein-exponent experiments, JSON and CSV.

pub mod divergences;
pub mod error;
pub mod harness;
pub mod linalg;
mod lp;
pub mod multicopy;
mod numeric;
pub mod optimize;
pub mod qobjects;
pub mod random;

pub use divergences::{BetaResult, Divergence, TestOperator};
pub use error::{Error, Result};
pub use linalg::{HermitianMatrix, Spectrum};
pub use optimize::OptResult;
pub use qobjects::{CQChannel, Channel, DensityMatrix, ProbDist};
