//! Spectral decomposition of the Morse-potential Schrödinger operator and
//! its application to arithmetic-average Asian options.
//!
//! The numerical core is generic over the scalar type (see [`Real`]);
//! `f64` aliases for the main types live at the crate root.

pub mod asian;
pub mod cli;
pub mod error;
pub mod mc;
pub mod morse;
pub mod quadrature;
pub mod real;
pub mod specfun;
pub mod tabulated;

pub use error::{Error, Result};
pub use real::Real;

pub type MorsePotential = morse::MorsePotential<f64>;
pub type DiscreteState = morse::DiscreteState<f64>;
pub type ContinuumEigenfunction = morse::ContinuumEigenfunction<f64>;
pub type Resolvent = morse::Resolvent<f64>;
pub type GreenEval = morse::GreenEval<f64>;
pub type ReconstructSpec = morse::ReconstructSpec<f64>;
pub type Reconstruction = morse::Reconstruction<f64>;
pub type WhittakerW = specfun::WhittakerW<f64>;
pub type QuadratureSpec = quadrature::QuadratureSpec<f64>;
pub type QuadratureResult = quadrature::QuadratureResult<f64>;
pub type Tabulated = tabulated::Tabulated<f64>;
pub type MarketParams = asian::MarketParams<f64>;
pub type ReducedParams = asian::ReducedParams<f64>;
pub type PriceBreakdown = asian::PriceBreakdown<f64>;
pub type HeatKernel = asian::HeatKernel<f64>;
pub type WeightFunctions = asian::WeightFunctions<f64>;
