//! Environmental decoherence estimates, `Lambda ~ n v sigma`.
//!
//! Cross sections are linear in the neutrino energy. The rate sums the two
//! flavor-sensitive channels seen by an electron neutrino: scattering off
//! ambient electrons (`nu_e e`) and off relic neutrinos (`nu_e nu_e`). The
//! relative velocity is `c` for every channel. Proton scattering is neutral
//! current only and leaves the oscillation untouched, so it is not included.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::units::C_CM_PER_S;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    NuEElectron,
    NuMuElectron,
    NuENuE,
    NuENuMu,
}

impl Channel {
    pub const ALL: [Channel; 4] = [
        Channel::NuEElectron,
        Channel::NuMuElectron,
        Channel::NuENuE,
        Channel::NuENuMu,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Channel::NuEElectron => "nue-e",
            Channel::NuMuElectron => "numu-e",
            Channel::NuENuE => "nue-nue",
            Channel::NuENuMu => "nue-numu",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::UnknownChannel(s.to_string()))
    }
}

/// Cross-section slopes `sigma / (E / GeV)`, cm^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionSet {
    pub nue_e: f64,
    pub numu_e: f64,
    pub nue_nue: f64,
    pub nue_numu: f64,
}

impl Default for CrossSectionSet {
    fn default() -> Self {
        Self {
            nue_e: 7e-42,
            numu_e: 1e-42,
            nue_nue: 2.8e-47,
            nue_numu: 4e-48,
        }
    }
}

impl CrossSectionSet {
    pub fn slope(&self, channel: Channel) -> f64 {
        match channel {
            Channel::NuEElectron => self.nue_e,
            Channel::NuMuElectron => self.numu_e,
            Channel::NuENuE => self.nue_nue,
            Channel::NuENuMu => self.nue_numu,
        }
    }

    /// Cross section at neutrino energy `energy` (eV), cm^2.
    pub fn cross_section(&self, channel: Channel, energy: f64) -> Result<f64> {
        require_positive("energy", energy)?;
        Ok(self.slope(channel) * (energy / 1e9))
    }
}

/// Cross section for a channel given by label, with the default slopes.
pub fn cross_section(channel: &str, energy: f64) -> Result<f64> {
    let channel: Channel = channel.parse()?;
    CrossSectionSet::default().cross_section(channel, energy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Medium {
    OuterSpace,
    Atmosphere,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub label: Medium,
    /// cm^-3
    pub electron_density: f64,
    /// cm^-3
    pub neutrino_density: f64,
    /// Typical crossing time, s.
    pub traversal_time: f64,
}

/// Relic neutrino density, cm^-3 (1e8 per m^3).
pub const RELIC_NEUTRINO_DENSITY: f64 = 1e2;
/// Time to cross the atmosphere, s.
pub const ATMOSPHERE_CROSSING_S: f64 = 1e-4;

impl Environment {
    /// One electron per m^3.
    pub const OUTER_SPACE: Environment = Environment {
        label: Medium::OuterSpace,
        electron_density: 1e-6,
        neutrino_density: RELIC_NEUTRINO_DENSITY,
        traversal_time: f64::INFINITY,
    };

    /// 2e26 electrons per m^3.
    pub const ATMOSPHERE: Environment = Environment {
        label: Medium::Atmosphere,
        electron_density: 2e20,
        neutrino_density: RELIC_NEUTRINO_DENSITY,
        traversal_time: ATMOSPHERE_CROSSING_S,
    };

    pub fn custom(electron_density: f64, neutrino_density: f64) -> Result<Self> {
        require_non_negative("electron_density", electron_density)?;
        require_non_negative("neutrino_density", neutrino_density)?;
        Ok(Self {
            label: Medium::Custom,
            electron_density,
            neutrino_density,
            traversal_time: f64::INFINITY,
        })
    }
}

/// Decoherence rate of an electron neutrino of energy `energy` (eV), 1/s.
pub fn decoherence_rate(env: &Environment, energy: f64) -> Result<f64> {
    decoherence_rate_with(env, energy, &CrossSectionSet::default())
}

pub fn decoherence_rate_with(
    env: &Environment,
    energy: f64,
    sigma: &CrossSectionSet,
) -> Result<f64> {
    let electrons = env.electron_density * sigma.cross_section(Channel::NuEElectron, energy)?;
    let relics = env.neutrino_density * sigma.cross_section(Channel::NuENuE, energy)?;
    Ok(C_CM_PER_S * (electrons + relics))
}

/// Accumulated exponent `sum Lambda(env_i, E) dt_i` along a piecewise path.
pub fn decoherence_damping(path: &[(Environment, f64)], energy: f64) -> Result<f64> {
    let mut total = 0.0;
    for (env, duration) in path {
        require_non_negative("duration", *duration)?;
        total += decoherence_rate(env, energy)? * duration;
    }
    Ok(total)
}

/// Outer space for all but the last stretch, then the atmosphere for at most
/// its crossing time.
pub fn standard_path(flight_time: f64) -> Vec<(Environment, f64)> {
    let atmosphere = flight_time.min(ATMOSPHERE_CROSSING_S);
    let space = flight_time - atmosphere;
    let mut path = Vec::with_capacity(2);
    if space > 0.0 {
        path.push((Environment::OUTER_SPACE, space));
    }
    path.push((Environment::ATMOSPHERE, atmosphere));
    path
}
