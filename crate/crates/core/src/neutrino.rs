//! Mass eigenstates, real mixing, and flight kinematics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_non_negative, require_positive, Error, Result};
use crate::units::C_CM_PER_S;

/// Solar mass splitting `m_2^2 c^4 - m_1^2 c^4`, eV^2.
pub const DEFAULT_DELTA_M2_EV2: f64 = 7.59e-5;

const UNITARITY_TOL: f64 = 1e-12;

/// Exact relativistic energy `sqrt((p c)^2 + (m c^2)^2)`.
pub fn energy(momentum_c: f64, mass_c2: f64) -> Result<f64> {
    require_non_negative("momentum_c", momentum_c)?;
    require_non_negative("mass_c2", mass_c2)?;
    Ok(momentum_c.hypot(mass_c2))
}

/// Rate at which the second-order term dropped by the ultra-relativistic
/// expansion of `E_k - E_j` accumulates phase:
/// `|dm2| (m_k^2 + m_j^2) c^4 / (8 E^3 hbar)`, in 1/s.
///
/// Multiply by the flight time to get the phase error.
pub fn ur_expansion_error_rate(energy: f64, m_j_c2: f64, m_k_c2: f64, hbar: f64) -> Result<f64> {
    require_positive("energy", energy)?;
    require_non_negative("m_j_c2", m_j_c2)?;
    require_non_negative("m_k_c2", m_k_c2)?;
    let dm2 = (m_k_c2 - m_j_c2) * (m_k_c2 + m_j_c2);
    let sum = m_k_c2 * m_k_c2 + m_j_c2 * m_j_c2;
    Ok(dm2.abs() * sum / (8.0 * energy.powi(3) * hbar))
}

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mixing {
    n: usize,
    entries: Vec<f64>,
}

impl Mixing {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(invalid("mixing", "matrix is empty"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(
                    "mixing",
                    format!("row {i} has {} entries, expected {n}", row.len()),
                ));
            }
            if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                return Err(invalid(
                    "mixing",
                    format!("non-finite entry {x} in row {i}"),
                ));
            }
            entries.extend_from_slice(row);
        }
        let m = Self { n, entries };
        m.check_unitary()?;
        Ok(m)
    }

    /// Accepts a complex matrix only if every imaginary part is exactly zero.
    pub fn from_complex_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if let Some(j) = row.iter().position(|z| z.im != 0.0) {
                return Err(Error::ComplexMixing { row: i, col: j });
            }
        }
        let real: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|z| z.re).collect())
            .collect();
        Self::from_rows(&real)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries }
    }

    /// `[[cos, sin], [-sin, cos]]`.
    pub fn two_flavor(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            n: 2,
            entries: vec![c, s, -s, c],
        }
    }

    /// Product of plane rotations, one per index pair `(a, b)` with `a < b`,
    /// angles listed in lexicographic pair order. The last pair acts leftmost,
    /// so for `n = 3` and angles `[t12, t13, t23]` this is `R23 R13 R12`.
    pub fn from_angles(n: usize, angles: &[f64]) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if n < 2 || angles.len() != expected {
            return Err(invalid(
                "angles",
                format!("{n} flavors need {expected} angles, got {}", angles.len()),
            ));
        }
        let mut u = Self::identity(n);
        let mut idx = 0;
        for a in 0..n {
            for b in (a + 1)..n {
                u = rotation(n, a, b, angles[idx]).matmul(&u);
                idx += 1;
            }
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, flavor: usize, mass: usize) -> f64 {
        self.entries[flavor * self.n + mass]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    fn matmul(&self, rhs: &Mixing) -> Mixing {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                for j in 0..n {
                    out[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        Mixing { n, entries: out }
    }

    fn check_unitary(&self) -> Result<()> {
        let n = self.n;
        for r in 0..n {
            for c in 0..n {
                let dot: f64 = (0..n).map(|i| self.get(i, r) * self.get(i, c)).sum();
                let target = if r == c { 1.0 } else { 0.0 };
                let deviation = (dot - target).abs();
                if deviation > UNITARITY_TOL {
                    return Err(Error::NotUnitary {
                        row: r,
                        col: c,
                        deviation,
                    });
                }
            }
        }
        Ok(())
    }
}

fn rotation(n: usize, a: usize, b: usize, theta: f64) -> Mixing {
    let mut r = Mixing::identity(n);
    let (s, c) = theta.sin_cos();
    r.entries[a * n + a] = c;
    r.entries[b * n + b] = c;
    r.entries[a * n + b] = s;
    r.entries[b * n + a] = -s;
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeutrinoModel {
    masses_c2: Vec<f64>,
    mixing: Mixing,
    widths: Vec<f64>,
    degenerate: bool,
}

impl NeutrinoModel {
    /// Masses are rest energies in eV and must be non-decreasing; equal
    /// neighbours are accepted and reported by [`Self::has_degenerate_masses`].
    pub fn new(masses_c2: Vec<f64>, mixing: Mixing) -> Result<Self> {
        if masses_c2.len() != mixing.dim() {
            return Err(invalid(
                "masses_c2",
                format!(
                    "{} masses for a {}x{} mixing matrix",
                    masses_c2.len(),
                    mixing.dim(),
                    mixing.dim()
                ),
            ));
        }
        for &m in &masses_c2 {
            require_non_negative("masses_c2", m)?;
        }
        let mut degenerate = false;
        for w in masses_c2.windows(2) {
            if w[1] < w[0] {
                return Err(invalid(
                    "masses_c2",
                    format!("masses must be ascending, got {} after {}", w[1], w[0]),
                ));
            }
            degenerate |= w[1] == w[0];
        }
        let n = masses_c2.len();
        Ok(Self {
            masses_c2,
            mixing,
            widths: vec![0.0; n],
            degenerate,
        })
    }

    /// Builds masses from the lightest one and the splittings
    /// `m_k^2 - m_0^2` for `k = 1..n`.
    pub fn from_splittings(lightest_c2: f64, delta_m2: &[f64], mixing: Mixing) -> Result<Self> {
        require_non_negative("lightest_mass", lightest_c2)?;
        let base = lightest_c2 * lightest_c2;
        let mut masses = vec![lightest_c2];
        for &d in delta_m2 {
            require_non_negative("delta_m2", d)?;
            masses.push((base + d).sqrt());
        }
        Self::new(masses, mixing)
    }

    pub fn two_flavor(theta: f64, delta_m2: f64, lightest_c2: f64) -> Result<Self> {
        Self::from_splittings(lightest_c2, &[delta_m2], Mixing::two_flavor(theta))
    }

    pub fn with_widths(mut self, widths: Vec<f64>) -> Result<Self> {
        if widths.len() != self.n() {
            return Err(invalid(
                "widths",
                format!("{} widths for {} eigenstates", widths.len(), self.n()),
            ));
        }
        for &w in &widths {
            require_non_negative("widths", w)?;
        }
        self.widths = widths;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.masses_c2.len()
    }

    pub fn masses_c2(&self) -> &[f64] {
        &self.masses_c2
    }

    pub fn mixing(&self) -> &Mixing {
        &self.mixing
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn has_widths(&self) -> bool {
        self.widths.iter().any(|&w| w > 0.0)
    }

    pub fn has_degenerate_masses(&self) -> bool {
        self.degenerate
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                len: self.n(),
            })
        }
    }

    /// `m_k^2 c^4 - m_j^2 c^4`, eV^2.
    pub fn delta_m2(&self, j: usize, k: usize) -> Result<f64> {
        self.check_index(j)?;
        self.check_index(k)?;
        let (mj, mk) = (self.masses_c2[j], self.masses_c2[k]);
        Ok((mk - mj) * (mk + mj))
    }

    /// Energy of mass eigenstate `j` at the scenario's momentum.
    pub fn energy_of(&self, scenario: &Scenario, j: usize) -> Result<f64> {
        self.check_index(j)?;
        energy(scenario.momentum_c(), self.masses_c2[j])
    }

    /// `E^(k) - E^(j)` at common momentum, from the exact dispersion relation.
    ///
    /// Evaluated as `(m_k^2 - m_j^2) / (E_k + E_j)`; the direct difference
    /// loses every significant digit once `p c >> m c^2`.
    pub fn energy_gap(&self, scenario: &Scenario, j: usize, k: usize) -> Result<f64> {
        self.check_index(j)?;
        self.check_index(k)?;
        if j == k {
            return Ok(0.0);
        }
        let (lo, hi) = (j.min(k), j.max(k));
        let e_lo = self.energy_of(scenario, lo)?;
        let e_hi = self.energy_of(scenario, hi)?;
        let gap = self.delta_m2(lo, hi)? / (e_lo + e_hi);
        Ok(if j < k { gap } else { -gap })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kinematics {
    /// `p_i c`, eV.
    Momentum(f64),
    /// Beam energy, eV, identified with `p_i c` (ultra-relativistic).
    Energy(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flight {
    /// s
    Time(f64),
    /// cm, travelled at `c`.
    Baseline(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kinematics: Kinematics,
    pub flight: Flight,
    pub initial_flavor: usize,
}

impl Scenario {
    pub fn new(kinematics: Kinematics, flight: Flight, initial_flavor: usize) -> Result<Self> {
        match kinematics {
            Kinematics::Momentum(p) => require_positive("momentum_c", p)?,
            Kinematics::Energy(e) => require_positive("energy", e)?,
        };
        match flight {
            Flight::Time(t) => require_non_negative("flight_time", t)?,
            Flight::Baseline(l) => require_non_negative("baseline", l)?,
        };
        Ok(Self {
            kinematics,
            flight,
            initial_flavor,
        })
    }

    pub fn from_energy(energy: f64, time: f64, initial_flavor: usize) -> Result<Self> {
        Self::new(
            Kinematics::Energy(energy),
            Flight::Time(time),
            initial_flavor,
        )
    }

    pub fn from_momentum(momentum_c: f64, time: f64, initial_flavor: usize) -> Result<Self> {
        Self::new(
            Kinematics::Momentum(momentum_c),
            Flight::Time(time),
            initial_flavor,
        )
    }

    pub fn momentum_c(&self) -> f64 {
        match self.kinematics {
            Kinematics::Momentum(p) | Kinematics::Energy(p) => p,
        }
    }

    pub fn is_ultra_relativistic(&self) -> bool {
        matches!(self.kinematics, Kinematics::Energy(_))
    }

    /// Flight time in s; baselines are converted with `t = L / c`.
    pub fn time(&self) -> f64 {
        match self.flight {
            Flight::Time(t) => t,
            Flight::Baseline(l) => l / C_CM_PER_S,
        }
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.flight = Flight::Time(time);
        self
    }

    pub fn with_momentum(mut self, momentum_c: f64) -> Self {
        self.kinematics = match self.kinematics {
            Kinematics::Momentum(_) => Kinematics::Momentum(momentum_c),
            Kinematics::Energy(_) => Kinematics::Energy(momentum_c),
        };
        self
    }
}

/// The three neutrino sources of the reference comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Cosmogenic,
    Solar,
    Laboratory,
}

impl Source {
    pub const ALL: [Source; 3] = [Source::Cosmogenic, Source::Solar, Source::Laboratory];

    /// Typical energy, eV.
    pub fn energy(self) -> f64 {
        match self {
            Source::Cosmogenic => 1e19,
            Source::Solar => 1e6,
            Source::Laboratory => 1e10,
        }
    }

    /// Typical time of flight, s.
    pub fn flight_time(self) -> f64 {
        match self {
            Source::Cosmogenic => 3.15e18,
            Source::Solar => 5e2,
            Source::Laboratory => 2.13e-2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Source::Cosmogenic => "cosmogenic",
            Source::Solar => "solar",
            Source::Laboratory => "laboratory",
        }
    }

    pub fn scenario(self) -> Scenario {
        Scenario {
            kinematics: Kinematics::Energy(self.energy()),
            flight: Flight::Time(self.flight_time()),
            initial_flavor: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::HBAR_EV_S;

    #[test]
    fn energy_examples() {
        assert_eq!(energy(0.0, 5.0).unwrap(), 5.0);
        assert_eq!(energy(3.0, 4.0).unwrap(), 5.0);
        assert_eq!(energy(7.5, 0.0).unwrap(), 7.5);
        assert!(energy(-1.0, 1.0).is_err());
        assert!(energy(1.0, -1.0).is_err());
    }

    #[test]
    fn energy_ultra_relativistic_against_series() {
        // sqrt(p^2 + m^2) = p (1 + x/2 - x^2/8 + ...), x = m^2/p^2 = 4.84e-12.
        let p = 1e6;
        let x: f64 = 4.84e-12;
        let series = p * (1.0 + x / 2.0 - x * x / 8.0);
        let e = energy(p, 2.2).unwrap();
        assert!(
            (e - series).abs() <= 2.0 * f64::EPSILON * p,
            "{e} vs {series}"
        );
        assert!(((e / p - 1.0) - 2.42e-12).abs() < 1e-15);
    }

    #[test]
    fn energy_gap_matches_first_order() {
        let model = NeutrinoModel::two_flavor(0.5, DEFAULT_DELTA_M2_EV2, 0.0).unwrap();
        let s = Scenario::from_momentum(1e6, 1.0, 0).unwrap();
        let gap = model.energy_gap(&s, 0, 1).unwrap();
        let first = DEFAULT_DELTA_M2_EV2 / 2e6;
        assert!((first - 3.795e-11).abs() < 1e-20);
        // Second-order correction relative size is ~ m^2/(4 p^2) ~ 1e-17.
        assert!((gap / first - 1.0).abs() < 1e-14);
        assert_eq!(model.energy_gap(&s, 1, 1).unwrap(), 0.0);
        assert_eq!(model.energy_gap(&s, 1, 0).unwrap(), -gap);
        assert!(matches!(
            model.energy_gap(&s, 0, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn energy_gap_against_exact_difference_at_low_momentum() {
        // At p ~ m the naive difference is well conditioned.
        let model = NeutrinoModel::new(vec![1.0, 2.0], Mixing::identity(2)).unwrap();
        let s = Scenario::from_momentum(1.5, 1.0, 0).unwrap();
        let naive = 1.5f64.hypot(2.0) - 1.5f64.hypot(1.0);
        assert!((model.energy_gap(&s, 0, 1).unwrap() - naive).abs() < 1e-15);
    }

    #[test]
    fn ur_error_rate_examples() {
        assert_eq!(
            ur_expansion_error_rate(1e6, 2.2, 2.2, HBAR_EV_S).unwrap(),
            0.0
        );
        assert!(ur_expansion_error_rate(0.0, 1.0, 2.0, HBAR_EV_S).is_err());

        let mk = 2.2f64;
        let mj = (mk * mk - 7.59e-5).sqrt();
        let rate = ur_expansion_error_rate(1e6, mj, mk, HBAR_EV_S).unwrap();
        // mj carries a rounding error that (mk - mj) amplifies to ~1e-11.
        let oracle = 7.59e-5 * (2.0 * 4.84 - 7.59e-5) / (8.0 * 1e18 * 6.582119569e-16);
        assert!((rate / oracle - 1.0).abs() < 1e-10, "{rate} vs {oracle}");
        assert!((rate - 1.4e-7).abs() < 0.01e-7);
    }

    #[test]
    fn mixing_validation() {
        assert!(matches!(
            Mixing::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]),
            Err(Error::NotUnitary { .. })
        ));
        assert!(Mixing::from_rows(&[vec![1.0, 0.0]]).is_err());
        let z = |re: f64, im: f64| Complex64::new(re, im);
        let err = Mixing::from_complex_rows(&[
            vec![z(1.0, 0.0), z(0.0, 0.0)],
            vec![z(0.0, 0.0), z(0.0, 1e-3)],
        ])
        .unwrap_err();
        assert_eq!(err, Error::ComplexMixing { row: 1, col: 1 });
        let ok = Mixing::from_complex_rows(&[
            vec![z(0.0, 0.0), z(1.0, 0.0)],
            vec![z(1.0, 0.0), z(0.0, 0.0)],
        ]);
        assert!(ok.is_ok());
    }

    #[test]
    fn three_flavor_angles_follow_standard_ordering() {
        let (t12, t13, t23) = (0.59, 0.15, 0.78);
        let u = Mixing::from_angles(3, &[t12, t13, t23]).unwrap();
        let (s12, c12) = t12.sin_cos();
        let (s13, c13) = t13.sin_cos();
        let (s23, c23) = t23.sin_cos();
        // Standard parameterization with vanishing CP phase.
        let expected = [
            [c12 * c13, s12 * c13, s13],
            [
                -s12 * c23 - c12 * s23 * s13,
                c12 * c23 - s12 * s23 * s13,
                s23 * c13,
            ],
            [
                s12 * s23 - c12 * c23 * s13,
                -c12 * s23 - s12 * c23 * s13,
                c23 * c13,
            ],
        ];
        for (a, row) in expected.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                assert!((u.get(a, i) - v).abs() < 1e-15, "({a},{i})");
            }
        }
    }

    #[test]
    fn model_validation() {
        let u = Mixing::identity(2);
        assert!(NeutrinoModel::new(vec![1.0, 0.5], u.clone()).is_err());
        assert!(NeutrinoModel::new(vec![-1.0, 0.5], u.clone()).is_err());
        assert!(NeutrinoModel::new(vec![0.5], u.clone()).is_err());
        let degenerate = NeutrinoModel::new(vec![0.5, 0.5], u.clone()).unwrap();
        assert!(degenerate.has_degenerate_masses());
        let m = NeutrinoModel::new(vec![0.0, 0.5], u).unwrap();
        assert!(!m.has_degenerate_masses());
        assert!(m.clone().with_widths(vec![0.0, -1.0]).is_err());
        assert!(m.clone().with_widths(vec![0.0]).is_err());
        assert!(m.with_widths(vec![0.0, 1.0]).unwrap().has_widths());
    }

    #[test]
    fn scenario_baseline_converts_at_c() {
        let s = Scenario::new(
            Kinematics::Energy(1e9),
            Flight::Baseline(C_CM_PER_S * 2.0),
            0,
        )
        .unwrap();
        assert!((s.time() - 2.0).abs() < 1e-15);
        assert!(s.is_ultra_relativistic());
        assert!(Scenario::from_energy(0.0, 1.0, 0).is_err());
        assert!(Scenario::from_energy(1.0, -1.0, 0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn energy_bounds(p in 0.0f64..1e20, m in 0.0f64..1e3) {
                let e = energy(p, m).unwrap();
                prop_assert!(e >= p.max(m));
            }

            #[test]
            fn orthonormal_rows_and_columns(angles in proptest::collection::vec(-3.2f64..3.2, 6)) {
                let u = Mixing::from_angles(4, &angles).unwrap();
                for a in 0..4 {
                    for b in 0..4 {
                        let rows: f64 = (0..4).map(|i| u.get(a, i) * u.get(b, i)).sum();
                        let cols: f64 = (0..4).map(|i| u.get(i, a) * u.get(i, b)).sum();
                        let t = if a == b { 1.0 } else { 0.0 };
                        prop_assert!((rows - t).abs() < 1e-12);
                        prop_assert!((cols - t).abs() < 1e-12);
                    }
                }
            }

            #[test]
            fn gap_antisymmetric(p in 1e-3f64..1e19, m0 in 0.0f64..3.0, d in 0.0f64..1.0) {
                let model = NeutrinoModel::two_flavor(0.3, d, m0).unwrap();
                let s = Scenario::from_momentum(p, 1.0, 0).unwrap();
                let a = model.energy_gap(&s, 0, 1).unwrap();
                let b = model.energy_gap(&s, 1, 0).unwrap();
                prop_assert_eq!(a, -b);
            }
        }
    }
}
