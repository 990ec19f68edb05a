//! Physical constants and the handful of unit conversions this crate needs.
//!
//! Canonical internal units: energies and rest masses in eV (always as
//! `m c^2`), times in s, lengths in cm. `G` and `G_F` are kept in their
//! customary units and converted where they are used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, eV s (CODATA 2018, exact decimal literal).
pub const HBAR_EV_S: f64 = 6.582119569e-16;
/// Speed of light, cm/s.
pub const C_CM_PER_S: f64 = 2.99792458e10;
/// Speed of light, m/s.
pub const C_M_PER_S: f64 = 299_792_458.0;
/// Newtonian constant of gravitation, m^3 kg^-1 s^-2.
pub const G_SI: f64 = 6.67430e-11;
/// Fermi constant `G_F / (hbar c)^3`, GeV^-2.
pub const G_F_GEV_M2: f64 = 1.1663787e-5;
/// Nucleon rest energy used as the CSL reference mass, eV.
pub const NUCLEON_REST_ENERGY_EV: f64 = 938.272e6;
/// Elementary charge, J per eV (exact).
pub const JOULE_PER_EV: f64 = 1.602176634e-19;
/// Julian year, s.
pub const JULIAN_YEAR_S: f64 = 3.15576e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// eV s
    pub hbar: f64,
    /// cm/s
    pub c: f64,
    /// m^3 kg^-1 s^-2
    pub g: f64,
    /// GeV^-2 (natural-unit convention, `G_F/(hbar c)^3`)
    pub g_f: f64,
    /// eV
    pub m0c2: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR_EV_S,
            c: C_CM_PER_S,
            g: G_SI,
            g_f: G_F_GEV_M2,
            m0c2: NUCLEON_REST_ENERGY_EV,
        }
    }
}

impl PhysicalConstants {
    /// `hbar` in J s.
    pub fn hbar_si(&self) -> f64 {
        self.hbar * JOULE_PER_EV
    }

    /// `c` in m/s.
    pub fn c_si(&self) -> f64 {
        self.c * 1e-2
    }

    /// `hbar c` in eV cm.
    pub fn hbar_c_ev_cm(&self) -> f64 {
        self.hbar * self.c
    }

    /// Fermi constant in energy x volume form, J m^3.
    ///
    /// `G_F = (G_F/(hbar c)^3) (hbar c)^3`, with `(hbar c)` in GeV m and the
    /// trailing GeV converted to J.
    pub fn g_f_si(&self) -> f64 {
        let hbar_c_gev_m = self.hbar * 1e-9 * self.c_si();
        self.g_f * hbar_c_gev_m.powi(3) * 1e9 * JOULE_PER_EV
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Energy,
    Time,
    Length,
    Rate,
    CrossSection,
    Density,
    Dimensionless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    EV,
    KeV,
    MeV,
    GeV,
    Joule,
    Second,
    Year,
    Centimeter,
    Meter,
    Kilometer,
    LightYear,
    PerSecond,
    SquareCentimeter,
    SquareMeter,
    PerCubicCentimeter,
    PerCubicMeter,
    One,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            EV | KeV | MeV | GeV | Joule => Dimension::Energy,
            Second | Year => Dimension::Time,
            Centimeter | Meter | Kilometer | LightYear => Dimension::Length,
            PerSecond => Dimension::Rate,
            SquareCentimeter | SquareMeter => Dimension::CrossSection,
            PerCubicCentimeter | PerCubicMeter => Dimension::Density,
            One => Dimension::Dimensionless,
        }
    }

    /// Multiplier taking a value in this unit to the canonical unit of its
    /// dimension (eV, s, cm, 1/s, cm^2, 1/cm^3).
    pub fn to_canonical(self) -> f64 {
        use Unit::*;
        match self {
            EV => 1.0,
            KeV => 1e3,
            MeV => 1e6,
            GeV => 1e9,
            Joule => 1.0 / JOULE_PER_EV,
            Second => 1.0,
            Year => JULIAN_YEAR_S,
            Centimeter => 1.0,
            Meter => 1e2,
            Kilometer => 1e5,
            LightYear => C_CM_PER_S * JULIAN_YEAR_S,
            PerSecond => 1.0,
            SquareCentimeter => 1.0,
            SquareMeter => 1e4,
            PerCubicCentimeter => 1.0,
            PerCubicMeter => 1e-6,
            One => 1.0,
        }
    }

    pub fn canonical(dimension: Dimension) -> Unit {
        match dimension {
            Dimension::Energy => Unit::EV,
            Dimension::Time => Unit::Second,
            Dimension::Length => Unit::Centimeter,
            Dimension::Rate => Unit::PerSecond,
            Dimension::CrossSection => Unit::SquareCentimeter,
            Dimension::Density => Unit::PerCubicCentimeter,
            Dimension::Dimensionless => Unit::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Self { value, unit }
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    pub fn convert(&self, target: Unit) -> Result<Quantity> {
        self.check_same(target.dimension())?;
        if target == self.unit {
            return Ok(*self);
        }
        let value = self.value * (self.unit.to_canonical() / target.to_canonical());
        Ok(Quantity::new(value, target))
    }

    /// Value expressed in the canonical unit of this quantity's dimension.
    pub fn canonical_value(&self) -> f64 {
        self.value * self.unit.to_canonical()
    }

    pub fn checked_add(&self, other: &Quantity) -> Result<Quantity> {
        let rhs = other.convert(self.unit)?;
        Ok(Quantity::new(self.value + rhs.value, self.unit))
    }

    pub fn checked_sub(&self, other: &Quantity) -> Result<Quantity> {
        let rhs = other.convert(self.unit)?;
        Ok(Quantity::new(self.value - rhs.value, self.unit))
    }

    pub fn scale(&self, factor: f64) -> Quantity {
        Quantity::new(self.value * factor, self.unit)
    }

    fn check_same(&self, target: Dimension) -> Result<()> {
        if self.dimension() == target {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                from: self.dimension(),
                to: target,
            })
        }
    }
}

/// Flight time of a signal moving at `c` across `baseline`.
pub fn light_travel_time(baseline: Quantity) -> Result<Quantity> {
    let cm = baseline.convert(Unit::Centimeter)?;
    Ok(Quantity::new(cm.value / C_CM_PER_S, Unit::Second))
}
