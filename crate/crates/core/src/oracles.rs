//! Numerical checks of the approximations behind the closed-form decay rate.
//!
//! Everything here runs in the dimensionless variables
//!
//! * `s = (p - p_i) r_C / hbar`, the integration variable,
//! * `y = r_C p_i / hbar`,
//! * `a_j = (r_C m_j c / hbar)^2`,
//! * `tau = c t / r_C`,
//!
//! because the physical magnitudes (`tau` reaches `1e32`) are useless to a
//! quadrature routine.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::csl::{xi, CollapseParams};
use crate::error::{invalid, require_non_negative, require_positive, Result};
use crate::neutrino::{Mixing, NeutrinoModel, Scenario};
use crate::quadrature::Quadrature;
use crate::units::PhysicalConstants;

/// Half-width of the truncated Gaussian integration range; `exp(-100)` is
/// far below every tolerance used here.
const GAUSS_HALF_WIDTH: f64 = 10.0;
/// Below this `|g|` the removable singularity of `(e^{ig} - 1)/(ig)` is
/// evaluated by its series.
const SERIES_THRESHOLD: f64 = 1e-4;
/// Above `tau (a_j - a_k) / y^2` of this size the exact phase is used.
const TAYLOR_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessRegime {
    pub y: f64,
    pub a_j: f64,
    pub a_k: f64,
    pub tau: f64,
}

impl DimensionlessRegime {
    pub fn new(y: f64, a_j: f64, a_k: f64, tau: f64) -> Result<Self> {
        require_positive("y", y)?;
        require_non_negative("a_j", a_j)?;
        require_non_negative("a_k", a_k)?;
        require_non_negative("tau", tau)?;
        Ok(Self { y, a_j, a_k, tau })
    }

    /// From momentum `p c` (eV), rest energies (eV), flight time (s).
    pub fn from_physical(
        r_c: f64,
        momentum_c: f64,
        m_j_c2: f64,
        m_k_c2: f64,
        time: f64,
        constants: &PhysicalConstants,
    ) -> Result<Self> {
        let per_ev = r_c / constants.hbar_c_ev_cm();
        Self::new(
            per_ev * momentum_c,
            (per_ev * m_j_c2).powi(2),
            (per_ev * m_k_c2).powi(2),
            constants.c * time / r_c,
        )
    }

    pub fn delta_a(&self) -> f64 {
        self.a_j - self.a_k
    }

    /// `tau (a_j - a_k) / y^2`, the size of the phase across the Gaussian.
    pub fn phase_scale(&self) -> f64 {
        self.tau * self.delta_a().abs() / (self.y * self.y)
    }

    /// `y >= 10 sqrt(tau (a_j - a_k))`.
    pub fn condition_satisfied(&self) -> bool {
        self.y >= 10.0 * (self.tau * self.delta_a().max(0.0)).sqrt()
    }
}

/// `sqrt(x^2 + a_k) - sqrt(x^2 + a_j)` without cancellation.
fn root_gap(x: f64, a_j: f64, a_k: f64) -> f64 {
    (a_k - a_j) / ((x * x + a_k).sqrt() + (x * x + a_j).sqrt())
}

/// `sqrt(y^2 + a) - sqrt((y + s)^2 + a)` without cancellation.
fn shift_gap(y: f64, s: f64, a: f64) -> f64 {
    let lo = (y * y + a).sqrt();
    let hi = ((y + s) * (y + s) + a).sqrt();
    let sum = lo + hi;
    if sum == 0.0 {
        0.0
    } else {
        -s * (2.0 * y + s) / sum
    }
}

/// Relative phase picked up between the two eigenstates over the flight,
///
/// `g(s) = tau (sqrt((s+y)^2 + a_k) - sqrt((s+y)^2 + a_j) - sqrt(y^2 + a_k) + sqrt(y^2 + a_j))`.
///
/// The four square roots are regrouped so nothing nearly equal is
/// subtracted; `g(0)` is exactly zero.
pub fn g_of_s(regime: &DimensionlessRegime, s: f64) -> f64 {
    let DimensionlessRegime { y, a_j, a_k, tau } = *regime;
    if s == 0.0 || a_j == a_k || tau == 0.0 {
        return 0.0;
    }
    let x = s + y;
    // (A(x) - A(y)) with A(u) = sqrt(u^2+a_k) - sqrt(u^2+a_j)
    //   = (a_k - a_j) (1/S(x) - 1/S(y)),  S(u) = sqrt(u^2+a_k) + sqrt(u^2+a_j)
    //   = (a_k - a_j) (S(y) - S(x)) / (S(x) S(y)).
    let s_x = (x * x + a_k).sqrt() + (x * x + a_j).sqrt();
    let s_y = (y * y + a_k).sqrt() + (y * y + a_j).sqrt();
    if s_x == 0.0 {
        return tau * (root_gap(x, a_j, a_k) - root_gap(y, a_j, a_k));
    }
    let diff = shift_gap(y, s, a_k) + shift_gap(y, s, a_j);
    tau * (a_k - a_j) * diff / (s_x * s_y)
}

/// First-order expansion of [`g_of_s`] for `y^2 >> a_j, a_k`:
/// `tau (a_j - a_k) s / (2 (s + y) y)`.
pub fn g_taylor(regime: &DimensionlessRegime, s: f64) -> f64 {
    let DimensionlessRegime { y, a_j, a_k, tau } = *regime;
    tau * (a_j - a_k) * s / (2.0 * (s + y) * y)
}

/// `(e^{ig} - 1)/(ig) - 1`.
fn phase_average_minus_one(g: f64) -> Complex64 {
    if !g.is_finite() {
        return Complex64::new(-1.0, 0.0);
    }
    if g.abs() < SERIES_THRESHOLD {
        let g2 = g * g;
        return Complex64::new(-g2 / 6.0, g / 2.0 - g2 * g / 24.0);
    }
    let half = 0.5 * g;
    Complex64::new(g.sin() / g - 1.0, 2.0 * half.sin() * half.sin() / g)
}

fn gaussian_breakpoints(y: f64) -> Vec<f64> {
    let mut pts = vec![-GAUSS_HALF_WIDTH, 0.0, GAUSS_HALF_WIDTH];
    if -y > -GAUSS_HALF_WIDTH {
        pts.push(-y);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyWeightReport {
    /// `int ds (s+y)/sqrt((s+y)^2 + a) exp(-s^2)`.
    pub numeric: f64,
    /// `sqrt(pi)`.
    pub closed_form: f64,
    pub relative_error: f64,
    pub quadrature_error: f64,
}

/// Checks that `int ds (s+y)/sqrt((s+y)^2 + a_j) e^{-s^2}` is close to `sqrt(pi)`,
/// i.e. that the `1/E_p` weight can be pulled out of the Gaussian average.
///
/// The quadrature runs on the deficit `[(s+y)/sqrt((s+y)^2+a) - 1] e^{-s^2}`
/// so the relative error stays resolved long after it drops below `1e-16`.
pub fn energy_weight_check(
    regime: &DimensionlessRegime,
    quad: &Quadrature,
) -> Result<EnergyWeightReport> {
    let (y, a) = (regime.y, regime.a_j);
    let deficit = |s: f64| {
        let x = s + y;
        let r = (x * x + a).sqrt();
        let h = if x > 0.0 {
            -a / (r * (x + r))
        } else if r == 0.0 {
            -1.0
        } else {
            x / r - 1.0
        };
        h * (-s * s).exp()
    };
    let integral = quad.integrate(deficit, &gaussian_breakpoints(y))?;
    let closed_form = PI.sqrt();
    Ok(EnergyWeightReport {
        numeric: closed_form + integral.value,
        closed_form,
        relative_error: integral.value.abs() / closed_form,
        quadrature_error: integral.error / closed_form,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseAverageReport {
    pub regime: DimensionlessRegime,
    /// `(1/sqrt(pi)) int ds (s/y + 1) (e^{ig}-1)/(ig) e^{-s^2}`.
    pub ratio: Complex64,
    /// `|ratio - 1|`.
    pub deviation: f64,
    pub condition_satisfied: bool,
    pub used_taylor_phase: bool,
    pub quadrature_error: f64,
}

/// Evaluates the Gaussian average of `(e^{ig(s)} - 1)/(ig(s))` and reports how
/// far it is from the `g = 0` value the closed form assumes.
pub fn phase_average_check(
    regime: &DimensionlessRegime,
    quad: &Quadrature,
) -> Result<PhaseAverageReport> {
    if regime.a_j < regime.a_k {
        return Err(invalid("a_j", "expected a_j >= a_k"));
    }
    let used_taylor = regime.phase_scale() < TAYLOR_THRESHOLD;
    let reg = *regime;
    let phase = move |s: f64| {
        if used_taylor {
            g_taylor(&reg, s)
        } else {
            g_of_s(&reg, s)
        }
    };
    let y = regime.y;
    let part = |s: f64| (s / y + 1.0) * phase_average_minus_one(phase(s)) * (-s * s).exp();

    let sqrt_pi = PI.sqrt();
    let q = Quadrature {
        abs_tol: quad.abs_tol.max(quad.rel_tol * 1e-3 * sqrt_pi),
        ..*quad
    };
    let points = gaussian_breakpoints(y);
    let re = q.integrate(|s| part(s).re, &points)?;
    let im = q.integrate(|s| part(s).im, &points)?;
    let offset = Complex64::new(re.value, im.value) / sqrt_pi;
    Ok(PhaseAverageReport {
        regime: *regime,
        ratio: Complex64::new(1.0, 0.0) + offset,
        deviation: offset.norm(),
        condition_satisfied: regime.condition_satisfied(),
        used_taylor_phase: used_taylor,
        quadrature_error: (re.error + im.error) / sqrt_pi,
    })
}

/// `y` from `1e3` to `1e8` for a handful of mass parameters up to `0.1`.
pub fn energy_weight_grid() -> Vec<DimensionlessRegime> {
    let mut out = Vec::new();
    for &a in &[0.0, 1e-3, 1e-2, 1e-1] {
        for e in 3..=8 {
            out.push(DimensionlessRegime {
                y: 10f64.powi(e),
                a_j: a,
                a_k: a,
                tau: 0.0,
            });
        }
    }
    out
}

/// Regimes on both sides of the validity condition, skipping those whose
/// phase is so large the integrand needs more than a few thousand
/// subintervals, plus the cosmogenic worst case.
pub fn phase_average_grid() -> Vec<DimensionlessRegime> {
    let mut out = Vec::new();
    for &y in &[1e1, 1e2, 1e3, 1e5] {
        for &tau in &[0.0, 1e2, 1e4, 1e6, 1e8] {
            for &da in &[1e-5, 1e-3, 1e-1] {
                let r = DimensionlessRegime {
                    y,
                    a_j: 1e-2 + da,
                    a_k: 1e-2,
                    tau,
                };
                if r.phase_scale() <= 1e2 {
                    out.push(r);
                }
            }
        }
    }
    out.push(cosmogenic_phase_regime());
    out
}

/// `tau = 1e32`, `a_j - a_k = 1e-5`, `y = 1e18`.
pub fn cosmogenic_phase_regime() -> DimensionlessRegime {
    DimensionlessRegime {
        y: 1e18,
        a_j: 1e-5,
        a_k: 0.0,
        tau: 1e32,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalEstimates {
    /// `gamma/(r_C^3 m0^2) (m_j - m_k)^2 t`
    pub xi1_t: f64,
    /// `gamma/(r_C^3 m0^2) |m_j^2 - m_k^2| t`
    pub xi2_t: f64,
    /// Full rate times `t`.
    pub xi_exact_t: f64,
}

/// Naive dimensional guesses for the decay rate next to the real one.
/// The guesses carry no numeric prefactor, only their order of magnitude
/// means anything.
pub fn dimensional_estimates(
    params: &CollapseParams,
    m_j_c2: f64,
    m_k_c2: f64,
    energy: f64,
    time: f64,
) -> Result<DimensionalEstimates> {
    require_non_negative("m_j_c2", m_j_c2)?;
    require_non_negative("m_k_c2", m_k_c2)?;
    require_non_negative("time", time)?;
    let scale = params.gamma / (params.r_c.powi(3) * params.m0c2 * params.m0c2);
    let diff = m_j_c2 - m_k_c2;
    let xi1 = scale * diff * diff;
    let xi2 = scale * (diff * (m_j_c2 + m_k_c2)).abs();
    let (lo, hi) = if m_j_c2 <= m_k_c2 {
        (m_j_c2, m_k_c2)
    } else {
        (m_k_c2, m_j_c2)
    };
    let model = NeutrinoModel::new(vec![lo, hi], Mixing::identity(2))?;
    let scenario = Scenario::from_energy(energy, time, 0)?;
    let exact = xi(params, &model, &scenario, 0, 1)?;
    Ok(DimensionalEstimates {
        xi1_t: xi1 * time,
        xi2_t: xi2 * time,
        xi_exact_t: exact * time,
    })
}
