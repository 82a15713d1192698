//! Strong-field Breit-Wheeler pair creation by a gamma quantum colliding
//! head-on with two consecutive short laser pulses.
//!
//! Natural units are used throughout: `m = 1`, lengths in units of the
//! reduced Compton wavelength `λ_e = 1/m`, and the positron charge is
//! `e = √α` (Gaussian units, `ħ = c = 1`).
//!
//! The crate is organised bottom-up:
//!
//! * [`kinematics`]: light-cone momenta and the pair partner on the
//!   conservation shell `Q⁻ = 0`, `Q⊥ = 0`.
//! * [`pulse`]: pulse shapes, amplitude normalisation and Volkov phases.
//! * [`amplitude`]: reduced matrix elements, the single-pulse amplitudes
//!   `F_j` and the dynamical phase between the two pathways.
//! * [`probability`]: momentum grids, differential probabilities, spectra
//!   and totals.
//! * [`sweep`]: delay sweeps, order exchange and sum-rule checks.
//! * [`model`]: laser-dressed energy statistics and the Gaussian ratio model.
//! * [`config`] and [`output`]: run configuration, presets and CSV emission.

pub mod amplitude;
pub mod config;
pub mod constants;
mod error;
pub mod extrema;
pub mod kinematics;
pub mod model;
pub mod output;
pub mod probability;
pub mod pulse;
pub mod quadrature;
pub mod sweep;

pub use num_complex::Complex64;

pub use amplitude::{
    combined_intensity, dynamical_phase, pulse_amplitude, reduced_elements, AmplitudeParts,
    PhaseDecomposition, QuadConfig, ReducedElements,
};
pub use config::{load_config, DelaySpec, GridConfig, RunConfig};
pub use error::{Error, Result};
pub use kinematics::{lightcone_decompose, solve_partner, GammaProbe, LightConeMomentum, PairKinematics};
pub use model::{dressed_energy_stats, gaussian_ratio_model, DressedEnergyStats, EnergyEstimate, GaussianFit};
pub use probability::{
    differential_probability, energy_spectrum, total_probability, GridSpec, MomentumGrid,
    PulseSequence, PulseTable, Simulator, SpectrumTable,
};
pub use pulse::{
    normalize_amplitude, shape, shape_derivative, volkov_coefficients, PulseField, PulseSpec,
    VolkovCoefficients,
};
pub use sweep::{
    exchange_order, order_sum_check, sweep_delay, DoublePulseConfig, InterferenceCache,
    OrderSumCheck, RatioCurve, RatioMode,
};
