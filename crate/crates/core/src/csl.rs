//! Oscillation damping under the mass-proportional CSL model.
//!
//! The interference term between mass eigenstates `j` and `k` decays at
//!
//! ```text
//! xi_jk = gamma / (16 pi^(3/2) r_C^3 (m0 c^2)^2) * (m_j^2 c^4 / E_j - m_k^2 c^4 / E_k)^2
//! ```
//!
//! with exact energies `E_j = sqrt((p c)^2 + (m_j c^2)^2)` at common momentum.
//! The damping factor applied to that term is either the perturbative
//! `1 - xi t` or the resummed `exp(-xi t)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::neutrino::{NeutrinoModel, Scenario, Source, DEFAULT_DELTA_M2_EV2};
use crate::units::{PhysicalConstants, NUCLEON_REST_ENERGY_EV};

/// Correlation length of the collapse noise, cm.
pub const DEFAULT_R_C_CM: f64 = 1e-5;
/// Collapse strength, cm^3/s.
pub const GRW_GAMMA: f64 = 1e-30;
/// Collapse strength, cm^3/s.
pub const ADLER_GAMMA: f64 = 1e-22;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseParams {
    /// cm^3/s
    pub gamma: f64,
    /// cm
    pub r_c: f64,
    /// eV
    pub m0c2: f64,
}

impl CollapseParams {
    pub fn new(gamma: f64, r_c: f64, m0c2: f64) -> Result<Self> {
        require_non_negative("gamma", gamma)?;
        require_positive("r_c", r_c)?;
        require_positive("m0c2", m0c2)?;
        Ok(Self { gamma, r_c, m0c2 })
    }

    pub const GRW: CollapseParams = CollapseParams {
        gamma: GRW_GAMMA,
        r_c: DEFAULT_R_C_CM,
        m0c2: NUCLEON_REST_ENERGY_EV,
    };

    pub const ADLER: CollapseParams = CollapseParams {
        gamma: ADLER_GAMMA,
        r_c: DEFAULT_R_C_CM,
        m0c2: NUCLEON_REST_ENERGY_EV,
    };

    pub fn preset(name: &str) -> Option<CollapseParams> {
        match name.to_ascii_lowercase().as_str() {
            "grw" => Some(Self::GRW),
            "adler" => Some(Self::ADLER),
            _ => None,
        }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    /// Mass-proportional coupling `gamma (m/m0)^2`, cm^3/s.
    pub fn gamma_m(&self, mass_c2: f64) -> f64 {
        let ratio = mass_c2 / self.m0c2;
        self.gamma * ratio * ratio
    }

    /// `gamma / (16 pi^(3/2) r_C^3 (m0 c^2)^2)`, s^-1 eV^-2.
    pub fn rate_prefactor(&self) -> f64 {
        self.gamma / (16.0 * PI.powf(1.5) * self.r_c.powi(3) * self.m0c2 * self.m0c2)
    }

    /// Ultra-relativistic coefficient `C` in `xi t = C t / E^2`, s^-1 eV^2.
    pub fn ultra_relativistic_coefficient(&self, delta_m2: f64) -> f64 {
        self.rate_prefactor() * delta_m2 * delta_m2
    }
}

impl Default for CollapseParams {
    fn default() -> Self {
        Self::ADLER
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingMode {
    /// `1 - xi t`; only valid while `xi t <= 1`.
    Linear,
    /// `exp(-xi t)`.
    #[default]
    Exponential,
}

impl DampingMode {
    fn factor(self, xi_t: f64) -> f64 {
        match self {
            DampingMode::Linear => 1.0 - xi_t,
            DampingMode::Exponential => (-xi_t).exp(),
        }
    }

    /// `ln D`, kept separately so that `xi t ~ 1e-55` survives output.
    fn log_factor(self, xi_t: f64) -> f64 {
        match self {
            DampingMode::Linear => (-xi_t).ln_1p(),
            DampingMode::Exponential => -xi_t,
        }
    }
}

/// CSL decay rate `xi_jk` of the `(j, k)` interference term, 1/s.
pub fn xi(
    params: &CollapseParams,
    model: &NeutrinoModel,
    scenario: &Scenario,
    j: usize,
    k: usize,
) -> Result<f64> {
    model.check_index(j)?;
    model.check_index(k)?;
    if j == k {
        return Ok(0.0);
    }
    let (lo, hi) = (j.min(k), j.max(k));
    let m_lo = model.masses_c2()[lo];
    let e_lo = model.energy_of(scenario, lo)?;
    let e_hi = model.energy_of(scenario, hi)?;
    let dm2 = model.delta_m2(lo, hi)?;
    let gap = dm2 / (e_lo + e_hi);
    // m_lo^2/E_lo - m_hi^2/E_hi over a common denominator, with E_hi - E_lo
    // taken from the stable gap.
    let diff = (m_lo * m_lo * gap - dm2 * e_lo) / (e_lo * e_hi);
    Ok(params.rate_prefactor() * diff * diff)
}

#[allow(clippy::needless_range_loop)]
pub fn xi_matrix(
    params: &CollapseParams,
    model: &NeutrinoModel,
    scenario: &Scenario,
) -> Result<Vec<Vec<f64>>> {
    let n = model.n();
    let mut out = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in (j + 1)..n {
            let x = xi(params, model, scenario, j, k)?;
            out[j][k] = x;
            out[k][j] = x;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationResult {
    pub mode: DampingMode,
    pub initial_flavor: usize,
    /// Transition probabilities into each final flavor.
    pub probabilities: Vec<f64>,
    /// `xi_jk`, 1/s.
    pub xi_matrix: Vec<Vec<f64>>,
    /// `xi_jk t`.
    pub xi_t: Vec<Vec<f64>>,
    /// Factor applied to each interference term.
    pub damping_factors: Vec<Vec<f64>>,
    /// `ln` of `damping_factors`.
    pub log_deficit: Vec<Vec<f64>>,
    /// `exp(-Gamma_k t / hbar)`, present when the model carries widths.
    pub survival_weights: Option<Vec<f64>>,
}

/// Probabilities into every final flavor, including decay widths when the
/// model carries any.
pub fn oscillate(
    params: &CollapseParams,
    model: &NeutrinoModel,
    scenario: &Scenario,
    mode: DampingMode,
) -> Result<OscillationResult> {
    oscillate_with(params, model, scenario, mode, &PhysicalConstants::default())
}

pub fn oscillate_with(
    params: &CollapseParams,
    model: &NeutrinoModel,
    scenario: &Scenario,
    mode: DampingMode,
    constants: &PhysicalConstants,
) -> Result<OscillationResult> {
    let n = model.n();
    let alpha = scenario.initial_flavor;
    model.check_index(alpha)?;
    let t = scenario.time();
    let hbar = constants.hbar;

    let xi_matrix = xi_matrix(params, model, scenario)?;
    let mut xi_t = vec![vec![0.0; n]; n];
    let mut damping = vec![vec![1.0; n]; n];
    let mut log_deficit = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let x = xi_matrix[j][k] * t;
            if mode == DampingMode::Linear && x > 1.0 {
                let (lo, hi) = (j.min(k), j.max(k));
                return Err(Error::PerturbativeBound {
                    j: lo,
                    k: hi,
                    xi_t: x,
                });
            }
            xi_t[j][k] = x;
            damping[j][k] = mode.factor(x);
            log_deficit[j][k] = mode.log_factor(x);
        }
    }

    let survival: Option<Vec<f64>> = model.has_widths().then(|| {
        model
            .widths()
            .iter()
            .map(|w| (-w * t / hbar).exp())
            .collect()
    });

    let mut phases = vec![vec![0.0; n]; n];
    for (j, row) in phases.iter_mut().enumerate() {
        for (k, phase) in row.iter_mut().enumerate().skip(j + 1) {
            *phase = model.energy_gap(scenario, j, k)? * t / hbar;
        }
    }

    let u = model.mixing();
    let probabilities = (0..n)
        .map(|beta| {
            let mut p = 0.0;
            for k in 0..n {
                let w = survival.as_ref().map_or(1.0, |s| s[k]);
                let a = u.get(alpha, k) * u.get(beta, k);
                p += w * a * a;
            }
            for j in 0..n {
                for k in (j + 1)..n {
                    let w = survival.as_ref().map_or(1.0, |s| (s[j] * s[k]).sqrt());
                    let amp = u.get(alpha, k) * u.get(beta, k) * u.get(alpha, j) * u.get(beta, j);
                    p += 2.0 * amp * w * damping[j][k] * phases[j][k].cos();
                }
            }
            p
        })
        .collect();

    Ok(OscillationResult {
        mode,
        initial_flavor: alpha,
        probabilities,
        xi_matrix,
        xi_t,
        damping_factors: damping,
        log_deficit,
        survival_weights: survival,
    })
}

/// `P(alpha -> beta)` for a model without decay widths.
pub fn transition_probability(
    params: &CollapseParams,
    model: &NeutrinoModel,
    scenario: &Scenario,
    beta: usize,
    mode: DampingMode,
) -> Result<f64> {
    model.check_index(beta)?;
    let stable = model.clone().with_widths(vec![0.0; model.n()])?;
    Ok(oscillate(params, &stable, scenario, mode)?.probabilities[beta])
}

/// `P(alpha -> beta)` with eigenstate `k` depleted as `exp(-Gamma_k t / hbar)`
/// and each interference term by `exp(-(Gamma_j + Gamma_k) t / 2 hbar)`.
pub fn transition_probability_decaying(
    params: &CollapseParams,
    model: &NeutrinoModel,
    scenario: &Scenario,
    beta: usize,
    mode: DampingMode,
) -> Result<f64> {
    model.check_index(beta)?;
    Ok(oscillate(params, model, scenario, mode)?.probabilities[beta])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRow {
    pub source: Source,
    /// eV
    pub energy: f64,
    /// s
    pub time: f64,
    /// Exact-dispersion `xi t` for the lightest pair.
    pub xi_t: f64,
    /// `C t / E^2` from the ultra-relativistic coefficient.
    pub xi_t_ultra_relativistic: f64,
}

/// Damping exponents for the cosmogenic, solar and laboratory sources, with
/// a massless lightest state and the default splitting.
pub fn source_table(params: &CollapseParams) -> Result<Vec<SourceRow>> {
    let model = NeutrinoModel::two_flavor(0.0, DEFAULT_DELTA_M2_EV2, 0.0)?;
    let coefficient = params.ultra_relativistic_coefficient(DEFAULT_DELTA_M2_EV2);
    Source::ALL
        .iter()
        .map(|&source| {
            let scenario = source.scenario();
            let rate = xi(params, &model, &scenario, 0, 1)?;
            let (e, t) = (source.energy(), source.flight_time());
            Ok(SourceRow {
                source,
                energy: e,
                time: t,
                xi_t: rate * t,
                xi_t_ultra_relativistic: coefficient * t / (e * e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neutrino::Mixing;
    use std::f64::consts::FRAC_PI_4;

    fn two_flavor_scenario(phase: f64, model: &NeutrinoModel, p: f64) -> Scenario {
        let s = Scenario::from_momentum(p, 1.0, 0).unwrap();
        let gap = model.energy_gap(&s, 0, 1).unwrap();
        s.with_time(phase * PhysicalConstants::default().hbar / gap)
    }

    #[test]
    fn presets() {
        assert_eq!(CollapseParams::preset("ADLER"), Some(CollapseParams::ADLER));
        assert_eq!(CollapseParams::GRW.gamma, 1e-30);
        assert_eq!(CollapseParams::GRW.r_c, 1e-5);
        assert!(CollapseParams::preset("other").is_none());
        assert!(CollapseParams::new(-1.0, 1e-5, 1.0).is_err());
        assert!(CollapseParams::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn ultra_relativistic_coefficient_matches_direct_arithmetic() {
        // 1e-22 / (16 * pi^1.5 * 1e-15 * 938.272e6^2) * (7.59e-5)^2
        let direct = 1e-22 / (16.0 * 5.568327996831708 * 1e-15 * 8.803543459840001e17) * 5.76081e-9;
        let c = CollapseParams::ADLER.ultra_relativistic_coefficient(7.59e-5);
        assert!((c / direct - 1.0).abs() < 1e-12);
        assert!((c / 7.33e-36 - 1.0).abs() < 0.02);
    }

    #[test]
    fn xi_diagonal_and_range() {
        let model = NeutrinoModel::two_flavor(0.3, 7.59e-5, 0.0).unwrap();
        let s = Scenario::from_energy(1e6, 1.0, 0).unwrap();
        assert_eq!(xi(&CollapseParams::ADLER, &model, &s, 1, 1).unwrap(), 0.0);
        assert!(xi(&CollapseParams::ADLER, &model, &s, 0, 3).is_err());
    }

    #[test]
    fn table_rows() {
        let rows = source_table(&CollapseParams::ADLER).unwrap();
        let reference = [2.31e-55, 3.66e-45, 1.56e-57];
        for (row, expected) in rows.iter().zip(reference) {
            assert!((row.xi_t / expected - 1.0).abs() < 0.02, "{row:?}");
            assert!((row.xi_t / row.xi_t_ultra_relativistic - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let u = Mixing::from_angles(3, &[0.6, 0.15, 0.8]).unwrap();
        let model = NeutrinoModel::from_splittings(0.01, &[7.59e-5, 2.4e-3], u).unwrap();
        for alpha in 0..3 {
            let s = Scenario::from_energy(1e9, 0.0, alpha).unwrap();
            let r =
                oscillate(&CollapseParams::ADLER, &model, &s, DampingMode::Exponential).unwrap();
            for (beta, p) in r.probabilities.iter().enumerate() {
                let delta = if alpha == beta { 1.0 } else { 0.0 };
                assert!((p - delta).abs() < 1e-15, "{alpha}->{beta}: {p}");
            }
        }
    }

    #[test]
    fn exaggerated_damping_half_period() {
        // theta = pi/4, xi t = 0.5, phase = pi: 1/2 + 1/2 e^-0.5 cos(pi)
        let model = NeutrinoModel::two_flavor(FRAC_PI_4, 1.0, 0.0).unwrap();
        let s = two_flavor_scenario(PI, &model, 10.0);
        let rate =
            xi(&CollapseParams::ADLER, &model, &s, 0, 1).unwrap() / CollapseParams::ADLER.gamma;
        let params = CollapseParams::ADLER.with_gamma(0.5 / (rate * s.time()));
        let p = transition_probability(&params, &model, &s, 0, DampingMode::Exponential).unwrap();
        let expected = 0.5 - 0.5 * (-0.5f64).exp();
        assert!((p - expected).abs() < 1e-12, "{p}");
        assert!((p - 0.19673).abs() < 1e-5);
        let lin = transition_probability(&params, &model, &s, 0, DampingMode::Linear).unwrap();
        assert!((lin - 0.25).abs() < 1e-12);
    }

    #[test]
    fn linear_mode_rejects_nonperturbative_times() {
        let model = NeutrinoModel::two_flavor(FRAC_PI_4, 1.0, 0.0).unwrap();
        let s = Scenario::from_momentum(10.0, 1.0, 0).unwrap();
        let params = CollapseParams::ADLER.with_gamma(1e30);
        let err = oscillate(&params, &model, &s, DampingMode::Linear).unwrap_err();
        assert!(matches!(err, Error::PerturbativeBound { j: 0, k: 1, .. }));
        assert!(err.to_string().contains("perturbative"));
        assert!(oscillate(&params, &model, &s, DampingMode::Exponential).is_ok());
    }

    #[test]
    fn decaying_two_flavor_example() {
        // Gamma/hbar = 1 and 2 per second, t = 1 s, zero phase, no collapse.
        let hbar = PhysicalConstants::default().hbar;
        let model = NeutrinoModel::new(vec![1.0, 1.0], Mixing::two_flavor(FRAC_PI_4))
            .unwrap()
            .with_widths(vec![hbar, 2.0 * hbar])
            .unwrap();
        let s = Scenario::from_momentum(1e3, 1.0, 0).unwrap();
        let params = CollapseParams::ADLER.with_gamma(0.0);
        let p = transition_probability_decaying(&params, &model, &s, 0, DampingMode::Exponential)
            .unwrap();
        let e = std::f64::consts::E;
        let expected = 0.25 / e + 0.25 / (e * e) + 0.5 * (-1.5f64).exp();
        assert!((p - expected).abs() < 1e-12, "{p} vs {expected}");
        assert!((p - 0.237_368_8).abs() < 1e-7);
    }

    #[test]
    fn decaying_reduces_and_factorizes() {
        let hbar = PhysicalConstants::default().hbar;
        let u = Mixing::from_angles(3, &[0.6, 0.15, 0.8]).unwrap();
        let base = NeutrinoModel::from_splittings(0.0, &[7.59e-5, 2.4e-3], u).unwrap();
        let s = Scenario::from_energy(1e6, 3e-3, 1).unwrap();
        let params = CollapseParams::ADLER.with_gamma(1e-5);
        let zero = base.clone().with_widths(vec![0.0; 3]).unwrap();
        let g = 0.7 * hbar;
        let equal = base.clone().with_widths(vec![g; 3]).unwrap();
        for beta in 0..3 {
            let plain =
                transition_probability(&params, &base, &s, beta, DampingMode::Exponential).unwrap();
            let z =
                transition_probability_decaying(&params, &zero, &s, beta, DampingMode::Exponential)
                    .unwrap();
            assert_eq!(plain, z);
            let d = transition_probability_decaying(
                &params,
                &equal,
                &s,
                beta,
                DampingMode::Exponential,
            )
            .unwrap();
            let expected = (-0.7 * s.time()).exp() * plain;
            assert!((d - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn massless_limit_has_no_damping() {
        let model = NeutrinoModel::new(vec![0.0, 0.0], Mixing::two_flavor(0.4)).unwrap();
        assert!(model.has_degenerate_masses());
        let s = Scenario::from_energy(1e6, 1e20, 0).unwrap();
        let r = oscillate(
            &CollapseParams::ADLER.with_gamma(1.0),
            &model,
            &s,
            DampingMode::Exponential,
        )
        .unwrap();
        assert_eq!(r.xi_matrix[0][1], 0.0);
        assert_eq!(r.damping_factors[0][1], 1.0);
    }

    #[test]
    fn log_deficit_keeps_tiny_exponents() {
        let model = NeutrinoModel::two_flavor(0.5, 7.59e-5, 0.0).unwrap();
        let s = Source::Cosmogenic.scenario();
        let r = oscillate(&CollapseParams::ADLER, &model, &s, DampingMode::Exponential).unwrap();
        assert_eq!(r.damping_factors[0][1], 1.0);
        assert!((-r.log_deficit[0][1] / 2.31e-55 - 1.0).abs() < 0.02);
        let lin = oscillate(&CollapseParams::ADLER, &model, &s, DampingMode::Linear).unwrap();
        assert!((-lin.log_deficit[0][1] / r.xi_t[0][1] - 1.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn model_and_scenario() -> impl Strategy<Value = (NeutrinoModel, Scenario)> {
            (
                0.0f64..1.0,
                proptest::collection::vec(1e-6f64..1e-2, 2),
                proptest::collection::vec(-3.2f64..3.2, 3),
                1e3f64..1e12,
                0.0f64..1e4,
                0usize..3,
            )
                .prop_map(|(m0, dm, angles, e, t, a)| {
                    let u = Mixing::from_angles(3, &angles).unwrap();
                    let mut dm = dm;
                    dm.sort_by(f64::total_cmp);
                    let model = NeutrinoModel::from_splittings(m0, &dm, u).unwrap();
                    (model, Scenario::from_energy(e, t, a).unwrap())
                })
        }

        proptest! {
            #[test]
            fn xi_symmetric_and_linear_in_gamma((model, s) in model_and_scenario(), g in 1e-30f64..1e-10) {
                let p = CollapseParams::ADLER.with_gamma(g);
                let p2 = CollapseParams::ADLER.with_gamma(2.0 * g);
                for j in 0..3 {
                    prop_assert_eq!(xi(&p, &model, &s, j, j).unwrap(), 0.0);
                    for k in 0..3 {
                        let a = xi(&p, &model, &s, j, k).unwrap();
                        prop_assert_eq!(a, xi(&p, &model, &s, k, j).unwrap());
                        prop_assert!(a >= 0.0);
                        let b = xi(&p2, &model, &s, j, k).unwrap();
                        prop_assert!((b - 2.0 * a).abs() <= 4.0 * f64::EPSILON * b);
                    }
                }
            }

            #[test]
            fn modes_agree_to_first_order(x in 0.0f64..1.0) {
                let lin = DampingMode::Linear.factor(x);
                let exp = DampingMode::Exponential.factor(x);
                prop_assert!((exp - lin).abs() <= x * x / 2.0 + 1e-16);
            }

            #[test]
            fn zero_gamma_is_undamped((model, s) in model_and_scenario()) {
                let r = oscillate(&CollapseParams::ADLER.with_gamma(0.0), &model, &s, DampingMode::Linear).unwrap();
                for row in &r.damping_factors {
                    for &d in row {
                        prop_assert_eq!(d, 1.0);
                    }
                }
            }

            #[test]
            fn linear_mode_conserves_probability((model, s) in model_and_scenario()) {
                // Scale gamma so the largest xi t is at most 1.
                let base = xi_matrix(&CollapseParams::ADLER, &model, &s).unwrap();
                let max = base.iter().flatten().cloned().fold(0.0, f64::max) * s.time();
                let params = if max > 0.0 {
                    CollapseParams::ADLER.with_gamma(CollapseParams::ADLER.gamma * 0.999 / max)
                } else {
                    CollapseParams::ADLER
                };
                let r = oscillate(&params, &model, &s, DampingMode::Linear).unwrap();
                let total: f64 = r.probabilities.iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-12);
            }
        }
    }
}
