//! Closed-form states of a three-dimensional harmonic trap with
//! time-dependent mass and frequency, reflection-deformed derivatives and an
//! angular barrier — together with the discretized operator oracles, the
//! auxiliary-trajectory integrator and the reference propagator that verify
//! every analytic ingredient numerically.
//!
//! All numerical kernels are generic over the scalar type through
//! [`real::Real`]; concrete `f64` aliases live at the crate root.

pub mod angular;
pub mod error;
pub mod ermakov;
pub mod fd;
pub mod grid;
pub mod operators;
pub mod params;
pub mod propagator;
pub mod quadrature;
pub mod real;
pub mod specfun;
pub mod wavefunction;

pub use error::{Error, Result};
pub use real::Real;

pub use params::{Parity, ParitySector, QuantumNumbers};

/// Concrete double-precision aliases.
pub type ModelParams64 = params::ModelParams<f64>;
pub type SpectralConstants64 = params::SpectralConstants<f64>;
pub type Grid1D64 = grid::Grid1D<f64>;
pub type GridField64 = grid::GridField<f64>;
pub type AngularGrid64 = grid::AngularGrid<f64>;
pub type AngularField64 = grid::AngularField<f64>;
pub type AngularMode64 = angular::AngularMode<f64>;
pub type TimeProfile64 = ermakov::TimeProfile<f64>;
pub type EpSolution64 = ermakov::EpSolution<f64>;
pub type RadialMode64 = wavefunction::RadialMode<f64>;
pub type StateGrids64 = wavefunction::StateGrids<f64>;
pub type StateSnapshot64 = wavefunction::StateSnapshot<f64>;
pub type PropagatorConfig64 = propagator::PropagatorConfig<f64>;
