//! Exact diagonalization of an open, nonintegrable quantum Ising chain with
//! transverse and longitudinal fields.
//!
//! The crate covers the full workflow behind desk-scale chain studies:
//!
//! - [`basis`]: bitstring computational basis and reflection-parity sectors;
//! - [`hamiltonian`]: dense Hamiltonian assembly, local-term decomposition
//!   `H = Σ_r H_r`, the distance-weighted spread operator, and parity
//!   projections;
//! - [`eigensolver`]: verified full spectral decompositions, parity-block
//!   bundles, and an on-disk decomposition cache;
//! - [`dynamics`]: random product-state sampling, exact evolution
//!   `ψ(t) = Q e^{−iΛt} Qᵀ ψ(0)`, and infinite-temperature Heisenberg traces;
//! - [`observables`]: entanglement entropy, its random-state saturation
//!   value, the energy-spread distance `R(t)`, ensemble statistics, scaling
//!   collapse, and growth-law fits;
//! - [`spectral`]: level-spacing ratio statistics against GOE/Poisson
//!   references, and spectral histograms;
//! - [`reference`]: slow brute-force implementations (series propagator,
//!   explicit density-matrix transport) used to cross-check the fast paths.
//!
//! Data-parallel loops run on rayon behind the default `parallel` feature
//! and fall back to sequential execution without it; results are
//! bit-identical either way (see [`exec`]).

pub mod basis;
pub mod dynamics;
pub mod eigensolver;
pub mod error;
pub mod exec;
pub mod hamiltonian;
pub mod observables;
pub mod reference;
pub mod spectral;

pub use basis::{Parity, ParitySectors, SpinBasis};
pub use dynamics::{PureState, SamplingMode};
pub use eigensolver::{
    eigendecompose, BlockedDecomposition, EigenCache, SpectralDecomposition,
};
pub use error::{Error, Result};
pub use hamiltonian::{CouplingParams, SymmetricMatrix, TermIndex};
pub use observables::{EnsembleSeries, FitKind, FitResult};
