//! Globally adaptive Gauss-Kronrod (10/21-point) integration over a
//! caller-supplied initial partition.
//!
//! The oscillatory kernels used by the spectral module are integrated by
//! first cutting the domain at the kernel's zero crossings, so every initial
//! panel holds at most one half-period. Panels are then bisected in order of
//! largest local error estimate until the global estimate meets tolerance.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_233_768,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Estimate {
    pub value: f64,
    pub abs_error: f64,
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
        self.cmp(other) == Ordering::Equal
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
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// One 21-point Kronrod evaluation with the embedded 10-point Gauss rule.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = 0.0;
    let mut res_kronrod = WGK[10] * f_center;
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let error = rescale_error((res_kronrod - res_gauss) * half, res_abs, res_asc);
    Segment { a, b, value, error }
}

/// Integrates `f` over the union of `panels` (each `(a, b)` with `a < b`).
pub(crate) fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    panels: &[(f64, f64)],
    tol: Tolerance,
) -> Result<Estimate> {
    let mut heap: BinaryHeap<Segment> = panels
        .iter()
        .filter(|(a, b)| b > a)
        .map(|&(a, b)| gk21(f, a, b))
        .collect();

    let mut value: f64 = heap.iter().map(|s| s.value).sum();
    let mut error: f64 = heap.iter().map(|s| s.error).sum();
    let mut subdivisions = 0;

    while error > tol.abs.max(tol.rel * value.abs()) {
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                abs_error: error,
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot refine below floating-point resolution.
            heap.push(worst);
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                abs_error: error,
                subdivisions,
            });
        }
        let left = gk21(f, worst.a, mid);
        let right = gk21(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    // Re-sum in domain order so the result does not depend on heap layout.
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().map(|s| s.value).sum();
    let abs_error = segments.iter().map(|s| s.error).sum();
    Ok(Estimate { value, abs_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance {
        rel: 1e-12,
        abs: 1e-14,
        max_subdivisions: 1000,
    };

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(&|x: f64| x.powi(5) - 3.0 * x * x, &[(0.0, 2.0)], TOL).unwrap();
        assert!((est.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_over_split_panels() {
        let panels: Vec<_> = (-10..10).map(|k| (k as f64, k as f64 + 1.0)).collect();
        let est = integrate(&|x: f64| (-x * x).exp(), &panels, TOL).unwrap();
        assert!((est.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sqrt_endpoint_needs_refinement() {
        let est = integrate(&|x: f64| x.sqrt(), &[(0.0, 1.0)], TOL).unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn reports_non_convergence() {
        let tol = Tolerance {
            max_subdivisions: 2,
            ..TOL
        };
        let err = integrate(&|x: f64| 1.0 / x.sqrt(), &[(0.0, 1.0)], tol).unwrap_err();
        match err {
            Error::QuadratureNonConvergence { subdivisions, .. } => assert_eq!(subdivisions, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_domain_is_zero() {
        let est = integrate(&|_| 1.0, &[], TOL).unwrap();
        assert_eq!(est.value, 0.0);
    }
}
