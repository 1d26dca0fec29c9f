//! Magnetic translation groups, theta-function bases and Landau spectra for
//! charged particles on flat tori `ℝⁿ/2πℤⁿ` with constant magnetic field.

pub mod bundle;
pub mod error;
pub mod gauge;
pub mod quadrature;
pub mod skewform;
pub mod spectra;
pub mod theta;
pub mod weyl;

pub use error::{Error, Result};
pub use gauge::{FourierScalar, FourierVector, GaugeConfig, PhaseDescriptor, QuasiFactor};
pub use skewform::{FrobeniusForm, IntMatrix, SkewIntMatrix};
pub use spectra::{HamiltonianSpec, LevelTruncation, SpectralResult};
pub use theta::{BasisIndex, ThetaState};
pub use weyl::{GroupContext, RepLabel, WeylElement};
