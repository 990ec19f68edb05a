//! Gravity-induced (Diosi-Penrose) damping of the oscillation term.
//!
//! The accumulated damping exponent over a flight of length `L` is
//!
//! ```text
//! Lambda_G = 8 pi G/(hbar c) [ 3 (m_j + m_k) hbar^2 / (5 G_F)
//!            - m_j m_k E / (2 pi hbar c) ln( 6 (m_j + m_k) pi hbar^3 c / (5 m_j m_k G_F E) ) ] L
//! ```
//!
//! Every quantity is converted to SI before it is combined: masses in kg,
//! `E` in J, `L` in m, and `G_F` in J m^3 (`G_F/(hbar c)^3 = 1.1663787e-5 GeV^-2`
//! multiplied by `(hbar c)^3`). Both bracket terms then carry kg^2/m and the
//! logarithm's argument is a pure number.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_non_negative, require_positive, Result};
use crate::units::{PhysicalConstants, JOULE_PER_EV};

/// Mass-distribution radius used to regularise the self-energy integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    /// `R ~ G_F m / hbar^2`, the choice built into the closed form. Far
    /// below any physical length scale; results using it are not trusted.
    FermiLength,
    /// `R = 1e-15 m`.
    Nuclear,
    /// `R = 1e-7 m`, the CSL correlation length.
    GrwScale,
}

impl Cutoff {
    pub fn trusted(self) -> bool {
        !matches!(self, Cutoff::FermiLength)
    }

    /// Radius in m; the Fermi length depends on the mass (eV).
    pub fn radius_m(self, mass_c2: f64, constants: &PhysicalConstants) -> f64 {
        match self {
            Cutoff::FermiLength => {
                let m = mass_kg(mass_c2, constants);
                let hbar = constants.hbar_si();
                constants.g_f_si() * m / (hbar * hbar)
            }
            Cutoff::Nuclear => 1e-15,
            Cutoff::GrwScale => 1e-7,
        }
    }

    /// Recomputing the closed form for a different radius would need the
    /// underlying double integral; only the Fermi-length cutoff matches it.
    pub fn matches_closed_form(self) -> bool {
        matches!(self, Cutoff::FermiLength)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpParams {
    /// Gravitational coupling of the self-energy difference, `-G` (SI).
    pub xi_bar: f64,
    pub cutoff: Cutoff,
    /// eV
    pub m_j_c2: f64,
    /// eV
    pub m_k_c2: f64,
    /// eV
    pub energy: f64,
    /// m
    pub distance: f64,
}

impl DpParams {
    pub fn new(m_j_c2: f64, m_k_c2: f64, energy: f64, distance: f64) -> Self {
        Self {
            xi_bar: -PhysicalConstants::default().g,
            cutoff: Cutoff::FermiLength,
            m_j_c2,
            m_k_c2,
            energy,
            distance,
        }
    }

    /// `E = 1e19 eV`, `L = 1e25 m`.
    pub fn cosmogenic(m_j_c2: f64, m_k_c2: f64) -> Self {
        Self::new(m_j_c2, m_k_c2, 1e19, 1e25)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpResult {
    pub lambda: f64,
    /// `3 (m_j + m_k) hbar^2 / (5 G_F)`, kg^2/m.
    pub self_energy_term: f64,
    /// `m_j m_k E / (2 pi hbar c) ln(...)`, kg^2/m.
    pub overlap_term: f64,
    pub cutoff_trusted: bool,
}

fn mass_kg(mass_c2: f64, constants: &PhysicalConstants) -> f64 {
    let c = constants.c_si();
    mass_c2 * JOULE_PER_EV / (c * c)
}

pub fn lambda_g(params: &DpParams) -> Result<DpResult> {
    lambda_g_with(params, &PhysicalConstants::default())
}

pub fn lambda_g_with(params: &DpParams, constants: &PhysicalConstants) -> Result<DpResult> {
    require_positive("m_j_c2", params.m_j_c2)?;
    require_positive("m_k_c2", params.m_k_c2)?;
    require_positive("energy", params.energy)?;
    require_non_negative("distance", params.distance)?;
    if params.xi_bar.is_nan() || params.xi_bar >= 0.0 {
        return Err(invalid("xi_bar", "coupling must be negative (set to -G)"));
    }
    let g = -params.xi_bar;
    let hbar = constants.hbar_si();
    let c = constants.c_si();
    let g_f = constants.g_f_si();
    let mj = mass_kg(params.m_j_c2, constants);
    let mk = mass_kg(params.m_k_c2, constants);
    let e = params.energy * JOULE_PER_EV;

    let first = 3.0 * (mj + mk) * hbar * hbar / (5.0 * g_f);
    let log_arg = 6.0 * (mj + mk) * PI * hbar.powi(3) * c / (5.0 * mj * mk * g_f * e);
    let second = mj * mk * e / (2.0 * PI * hbar * c) * log_arg.ln();
    let per_metre = 8.0 * PI * g / (hbar * c) * (first - second);

    Ok(DpResult {
        lambda: per_metre * params.distance,
        self_energy_term: first,
        overlap_term: second,
        cutoff_trusted: params.cutoff.trusted(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_distance() {
        let r = lambda_g(&DpParams::new(0.05, 0.06, 1e19, 0.0)).unwrap();
        assert_eq!(r.lambda, 0.0);
    }

    #[test]
    fn rejects_log_domain() {
        assert!(lambda_g(&DpParams::new(0.0, 0.06, 1e19, 1.0)).is_err());
        assert!(lambda_g(&DpParams::new(0.05, -0.06, 1e19, 1.0)).is_err());
        assert!(lambda_g(&DpParams::new(0.05, 0.06, 0.0, 1.0)).is_err());
        let mut p = DpParams::new(0.05, 0.06, 1e19, 1.0);
        p.xi_bar = 1.0;
        assert!(lambda_g(&p).is_err());
    }

    #[test]
    fn linear_in_distance() {
        let a = lambda_g(&DpParams::new(0.1, 0.2, 1e19, 1e25))
            .unwrap()
            .lambda;
        let b = lambda_g(&DpParams::new(0.1, 0.2, 1e19, 2e25))
            .unwrap()
            .lambda;
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn self_energy_term_scales_with_mass() {
        let a = lambda_g(&DpParams::cosmogenic(0.1, 0.2)).unwrap();
        let b = lambda_g(&DpParams::cosmogenic(0.2, 0.4)).unwrap();
        assert!((b.self_energy_term / a.self_energy_term - 2.0).abs() < 1e-14);
        assert!(a.self_energy_term > 1e3 * a.overlap_term);
    }

    #[test]
    fn cutoffs() {
        let k = PhysicalConstants::default();
        assert!(!Cutoff::FermiLength.trusted());
        assert!(Cutoff::Nuclear.trusted());
        assert_eq!(Cutoff::GrwScale.radius_m(1.0, &k), 1e-7);
        // G_F m / hbar^2 lands around 1e-31 m (within a decade either way) for sub-eV masses.
        let r = Cutoff::FermiLength.radius_m(0.1, &k);
        assert!(r > 1e-33 && r < 1e-30, "{r}");
    }
}
