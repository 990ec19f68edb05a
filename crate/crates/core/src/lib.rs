//! Neutrino flavor oscillations under wave-function collapse models.
//!
//! The crate computes oscillation probabilities with the damping predicted by
//! the mass-proportional CSL model ([`csl`]), compares it with the
//! Diosi-Penrose estimate ([`dp`]) and with environmental decoherence
//! ([`decoherence`]), and checks the approximations behind the closed-form
//! rate numerically ([`oracles`], [`phase_noise`]).
//!
//! Units: energies and rest masses in eV, times in s, lengths in cm unless a
//! field says otherwise. See [`units`].

pub mod csl;
pub mod decoherence;
pub mod dp;
pub mod error;
pub mod neutrino;
pub mod oracles;
pub mod phase_noise;
pub mod quadrature;
pub mod units;

pub use csl::{
    oscillate, source_table, transition_probability, transition_probability_decaying, xi,
    xi_matrix, CollapseParams, DampingMode, OscillationResult, SourceRow,
};
pub use decoherence::{
    cross_section, decoherence_damping, decoherence_rate, standard_path, Channel, CrossSectionSet,
    Environment,
};
pub use dp::{lambda_g, Cutoff, DpParams, DpResult};
pub use error::{Error, Result};
pub use neutrino::{
    energy, ur_expansion_error_rate, Flight, Kinematics, Mixing, NeutrinoModel, Scenario, Source,
};
pub use oracles::{
    dimensional_estimates, energy_weight_check, g_of_s, g_taylor, phase_average_check,
    DimensionalEstimates, DimensionlessRegime, EnergyWeightReport, PhaseAverageReport,
};
pub use phase_noise::{
    fit_decay_rate, simulate_interference, DecayFit, InterferenceSeries, McConfig, PhaseNoiseModel,
};
pub use quadrature::{Integral, Quadrature};
pub use units::{PhysicalConstants, Quantity, Unit};
