//! Hidden-variable models of Bell correlations in which a conservation law
//! removes part of the hidden-variable measure space, together with an exact
//! two-qubit quantum oracle, Monte-Carlo estimators, CHSH tooling and the
//! calibration of the angular-momentum spread against quantum mechanics.

pub mod bell;
mod error;
pub mod fitting;
pub mod io;
pub mod lhv;
pub mod quantum;
pub mod sampler;

pub use error::{Error, Result};
pub use quantum::StateKind;
