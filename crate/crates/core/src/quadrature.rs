//! Globally adaptive 21-point Gauss-Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_tol, rel_tol * |I|)` or the subdivision cap
//! is reached. Reaching the cap is an error, never a silent result.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for i in 0..10 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[i] = f1;
        fv2[i] = f2;
        kronrod += WGK[i] * (f1 + f2);
        res_abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for i in 0..10 {
        res_asc += WGK[i] * ((fv1[i] - mean).abs() + (fv2[i] - mean).abs());
    }
    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `[points[0], points[last]]`, starting from the
    /// subintervals delimited by `points` (which must be sorted).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<Integral> {
        assert!(
            points.len() >= 2,
            "need at least the two integration limits"
        );
        let mut heap = BinaryHeap::new();
        for w in points.windows(2) {
            if w[1] > w[0] {
                heap.push(gauss_kronrod(&f, w[0], w[1]));
            }
        }
        let mut intervals = heap.len();
        // Segments too narrow to split further; their error is final.
        let mut settled_value = 0.0;
        let mut settled_error = 0.0;
        loop {
            let value: f64 = settled_value + heap.iter().map(|s| s.value).sum::<f64>();
            let error: f64 = settled_error + heap.iter().map(|s| s.error).sum::<f64>();
            let tol = self.abs_tol.max(self.rel_tol * value.abs());
            if !value.is_finite() || !error.is_finite() {
                return Err(Error::QuadratureNotConverged {
                    estimate: value,
                    error,
                    intervals,
                });
            }
            if error <= tol {
                return Ok(Integral {
                    value,
                    error,
                    intervals,
                });
            }
            let worst = match heap.pop() {
                Some(s) => s,
                None => {
                    return Err(Error::QuadratureNotConverged {
                        estimate: value,
                        error,
                        intervals,
                    })
                }
            };
            let mid = 0.5 * (worst.a + worst.b);
            let scale = worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE);
            if intervals >= self.max_intervals || (worst.b - worst.a) <= 1e3 * f64::EPSILON * scale
            {
                if intervals >= self.max_intervals {
                    heap.push(worst);
                    let value: f64 = settled_value + heap.iter().map(|s| s.value).sum::<f64>();
                    let error: f64 = settled_error + heap.iter().map(|s| s.error).sum::<f64>();
                    return Err(Error::QuadratureNotConverged {
                        estimate: value,
                        error,
                        intervals,
                    });
                }
                settled_value += worst.value;
                settled_error += worst.error;
                continue;
            }
            heap.push(gauss_kronrod(&f, worst.a, mid));
            heap.push(gauss_kronrod(&f, mid, worst.b));
            intervals += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let q = Quadrature::default();
        let r = q.integrate(|x| 3.0 * x * x, &[0.0, 2.0]).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian() {
        let q = Quadrature::with_rel_tol(1e-12);
        let r = q
            .integrate(|x: f64| (-x * x).exp(), &[-10.0, 0.0, 10.0])
            .unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn kink_with_breakpoint_and_without() {
        let q = Quadrature::with_rel_tol(1e-10);
        let with = q.integrate(|x: f64| x.abs(), &[-1.0, 0.0, 2.0]).unwrap();
        let without = q.integrate(|x: f64| (x - 0.3).abs(), &[-1.0, 2.0]).unwrap();
        assert!((with.value - 2.5).abs() < 1e-12);
        assert!((without.value - (1.3f64.powi(2) + 1.7f64.powi(2)) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn oscillatory() {
        let q = Quadrature {
            abs_tol: 1e-13,
            ..Quadrature::with_rel_tol(1e-10)
        };
        let r = q.integrate(|x: f64| (50.0 * x).cos(), &[0.0, PI]).unwrap();
        assert!(r.value.abs() < 1e-10);
        let r = q
            .integrate(|x: f64| (50.0 * x).sin() * x, &[0.0, PI])
            .unwrap();
        assert!((r.value + PI / 50.0).abs() < 1e-10);
    }

    #[test]
    fn zero_integrand() {
        let r = Quadrature::default()
            .integrate(|_| 0.0, &[0.0, 1.0])
            .unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn non_convergence_is_reported() {
        let q = Quadrature {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_intervals: 4,
        };
        let err = q
            .integrate(|x: f64| (1.0 / x).sin(), &[1e-6, 1.0])
            .unwrap_err();
        assert!(matches!(
            err,
            Error::QuadratureNotConverged { intervals: 4, .. }
        ));
    }
}
