//! Monte Carlo model of collapse-induced dephasing between mass eigenstates.
//!
//! Each eigenstate `j` accumulates a deterministic phase `omega_j t` plus a
//! noisy one `sigma_j W_t`, where a single Wiener process `W` is shared by
//! all eigenstates: the collapse noise field is the same at the common
//! location of the wave packets. The relative phase of a pair is then
//!
//! ```text
//! phi_jk(t) = (omega_k - omega_j) t + (sigma_j - sigma_k) W_t
//! ```
//!
//! and `E[exp(i phi_jk)] = exp(-(sigma_j - sigma_k)^2 t / 2) exp(i (omega_k - omega_j) t)`.
//!
//! With `sigma_j = sqrt(gamma_{m_j} / (8 pi^(3/2) r_C^3)) m_j c^2 / E_j` the
//! decay rate `(sigma_j - sigma_k)^2 / 2` is algebraically identical to the
//! closed-form CSL rate. The physical rates (`~1e-55` per flight) cannot be
//! simulated, so runs use synthetic amplitudes; the identity is what ties
//! them to the physical model.
//!
//! Paths are processed in fixed-size batches. Batch `b` draws from ChaCha8
//! seeded with `seed` on stream `b`, and batch sums are reduced in batch
//! order, so results do not depend on the number of worker threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csl::CollapseParams;
use crate::error::{invalid, require_positive, Error, Result};
use crate::neutrino::{NeutrinoModel, Scenario};
use crate::units::PhysicalConstants;

/// Paths per random stream.
pub const BATCH_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseNoiseModel {
    /// Noise amplitude per eigenstate, s^-1/2.
    pub sigma: Vec<f64>,
    /// Angular frequency per eigenstate, s^-1.
    pub omega: Vec<f64>,
    pub shared_noise: bool,
}

impl PhaseNoiseModel {
    pub fn new(sigma: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if sigma.len() != omega.len() {
            return Err(invalid(
                "sigma",
                "sigma and omega must have the same length",
            ));
        }
        if let Some(s) = sigma.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(invalid(
                "sigma",
                format!("amplitudes must be >= 0, got {s}"),
            ));
        }
        if let Some(w) = omega.iter().find(|w| !w.is_finite()) {
            return Err(invalid("omega", format!("non-finite frequency {w}")));
        }
        Ok(Self {
            sigma,
            omega,
            shared_noise: true,
        })
    }

    /// Two eigenstates with relative decay rate `rate` (1/s) and relative
    /// angular frequency `omega_diff` (1/s).
    pub fn synthetic_pair(rate: f64, omega_diff: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(invalid("rate", format!("must be >= 0, got {rate}")));
        }
        Self::new(vec![(2.0 * rate).sqrt(), 0.0], vec![0.0, omega_diff])
    }

    /// Amplitudes and frequencies implied by the collapse parameters.
    pub fn from_physics(
        params: &CollapseParams,
        model: &NeutrinoModel,
        scenario: &Scenario,
        constants: &PhysicalConstants,
    ) -> Result<Self> {
        let coupling = 8.0 * PI.powf(1.5) * params.r_c.powi(3);
        let mut sigma = Vec::with_capacity(model.n());
        let mut omega = Vec::with_capacity(model.n());
        for (j, &m) in model.masses_c2().iter().enumerate() {
            let e = model.energy_of(scenario, j)?;
            sigma.push((params.gamma_m(m) / coupling).sqrt() * m / e);
            omega.push(e / constants.hbar);
        }
        Self::new(sigma, omega)
    }

    /// `(sigma_j - sigma_k)^2 / 2`, 1/s.
    pub fn relative_rate(&self, j: usize, k: usize) -> f64 {
        let d = self.sigma[j] - self.sigma[k];
        0.5 * d * d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: usize,
    /// s
    pub dt: f64,
    /// s
    pub t_max: f64,
    pub seed: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(invalid("n_paths", "need at least one path"));
        }
        require_positive("dt", self.dt)?;
        require_positive("t_max", self.t_max)?;
        if self.dt > self.t_max {
            return Err(invalid("dt", "dt must not exceed t_max"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceSeries {
    /// s, starting at 0.
    pub times: Vec<f64>,
    /// Ensemble mean of `exp(i phi)`.
    pub mean: Vec<Complex64>,
    /// Standard error of `mean`.
    pub std_error: Vec<f64>,
    pub n_paths: usize,
}

impl InterferenceSeries {
    pub fn moduli(&self) -> Vec<f64> {
        self.mean.iter().map(|z| z.norm()).collect()
    }
}

#[derive(Clone)]
struct Sums {
    cos: Vec<f64>,
    sin: Vec<f64>,
    cos2: Vec<f64>,
    sin2: Vec<f64>,
}

impl Sums {
    fn zeros(n: usize) -> Self {
        Self {
            cos: vec![0.0; n],
            sin: vec![0.0; n],
            cos2: vec![0.0; n],
            sin2: vec![0.0; n],
        }
    }

    fn add(&mut self, other: &Sums) {
        for i in 0..self.cos.len() {
            self.cos[i] += other.cos[i];
            self.sin[i] += other.sin[i];
            self.cos2[i] += other.cos2[i];
            self.sin2[i] += other.sin2[i];
        }
    }
}

/// Ensemble average of `exp(i phi_jk(t))` on the grid `t = 0, dt, ..., t_max`.
pub fn simulate_interference(
    model: &PhaseNoiseModel,
    j: usize,
    k: usize,
    cfg: &McConfig,
) -> Result<InterferenceSeries> {
    cfg.validate()?;
    for idx in [j, k] {
        if idx >= model.sigma.len() {
            return Err(Error::IndexOutOfRange {
                index: idx,
                len: model.sigma.len(),
            });
        }
    }
    if !model.shared_noise {
        return Err(invalid(
            "shared_noise",
            "the relative phase needs a single shared Wiener process",
        ));
    }
    let steps = cfg.steps();
    let points = steps + 1;
    let d_omega = model.omega[k] - model.omega[j];
    let d_sigma = model.sigma[j] - model.sigma[k];
    let sqrt_dt = cfg.dt.sqrt();
    let n_batches = cfg.n_paths.div_ceil(BATCH_SIZE);

    let batches: Vec<Result<Sums>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let first = b * BATCH_SIZE;
            let last = (first + BATCH_SIZE).min(cfg.n_paths);
            let mut sums = Sums::zeros(points);
            for path in first..last {
                let mut w = 0.0;
                sums.cos[0] += 1.0;
                sums.cos2[0] += 1.0;
                for i in 1..points {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    w += sqrt_dt * z;
                    let phi = d_omega * (i as f64 * cfg.dt) + d_sigma * w;
                    if !phi.is_finite() {
                        return Err(Error::NonFinitePath { path });
                    }
                    let (s, c) = phi.sin_cos();
                    sums.cos[i] += c;
                    sums.sin[i] += s;
                    sums.cos2[i] += c * c;
                    sums.sin2[i] += s * s;
                }
            }
            Ok(sums)
        })
        .collect();

    let mut total = Sums::zeros(points);
    for b in batches {
        total.add(&b?);
    }

    let n = cfg.n_paths as f64;
    let mut mean = Vec::with_capacity(points);
    let mut std_error = Vec::with_capacity(points);
    for i in 0..points {
        let (mc, ms) = (total.cos[i] / n, total.sin[i] / n);
        mean.push(Complex64::new(mc, ms));
        let se = if cfg.n_paths > 1 {
            let var_c = ((total.cos2[i] - n * mc * mc) / (n - 1.0)).max(0.0);
            let var_s = ((total.sin2[i] - n * ms * ms) / (n - 1.0)).max(0.0);
            ((var_c + var_s) / n).sqrt()
        } else {
            0.0
        };
        std_error.push(se);
    }
    let times = (0..points).map(|i| i as f64 * cfg.dt).collect();
    Ok(InterferenceSeries {
        times,
        mean,
        std_error,
        n_paths: cfg.n_paths,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// 1/s
    pub rate: f64,
    /// Propagated from the per-point standard errors with no assumption
    /// about their correlation: `sum |c_i| sigma_i` for slope weights `c_i`.
    /// The grid points share paths, so they are strongly correlated.
    pub std_error: f64,
    /// Same propagation assuming independent points; a lower bound.
    pub std_error_uncorrelated: f64,
}

/// Weighted least-squares rate for `-ln|E[exp(i phi)]| = rate t`. The line
/// goes through the origin since every path starts at `phi = 0`.
pub fn fit_decay_rate(series: &InterferenceSeries) -> Result<DecayFit> {
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    let mut sig = Vec::new();
    for ((&t, z), &se) in series.times.iter().zip(&series.mean).zip(&series.std_error) {
        let m = z.norm();
        if m.is_nan() || m <= 0.0 {
            return Err(invalid(
                "series",
                format!("non-positive modulus {m} at t = {t}"),
            ));
        }
        if t > 0.0 {
            ts.push(t);
            ys.push(-m.ln());
            sig.push(se / m);
        }
    }
    if ts.is_empty() {
        return Err(invalid("series", "no points with t > 0"));
    }
    let weights: Vec<f64> = if sig.iter().all(|&s| s > 0.0) {
        sig.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; ts.len()]
    };
    let norm: f64 = ts.iter().zip(&weights).map(|(t, w)| w * t * t).sum();
    let coeff: Vec<f64> = ts.iter().zip(&weights).map(|(t, w)| w * t / norm).collect();
    let rate = coeff.iter().zip(&ys).map(|(c, y)| c * y).sum();
    let std_error = coeff.iter().zip(&sig).map(|(c, s)| c.abs() * s).sum();
    let std_error_uncorrelated = coeff
        .iter()
        .zip(&sig)
        .map(|(c, s)| c * c * s * s)
        .sum::<f64>()
        .sqrt();
    Ok(DecayFit {
        rate,
        std_error,
        std_error_uncorrelated,
    })
}
