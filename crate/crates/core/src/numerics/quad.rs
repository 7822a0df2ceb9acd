//! Adaptive Gauss-Kronrod quadrature and Gauss-Legendre rules.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights at the odd Kronrod nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

fn gk15<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let two = T::lit(2.0);
    let center = (a + b) / two;
    let half = (b - a) / two;
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive G7-K15 integration of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the total
/// estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T, F>(f: F, a: T, b: T, abs_tol: T, rel_tol: T, max_intervals: usize) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(QuadResult { value: T::zero(), error: T::zero(), evaluations: 0 });
    }
    let mut intervals: Vec<(T, T, T, T)> = Vec::new();
    let (v, e) = gk15(&f, a, b);
    intervals.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let total: T = intervals.iter().fold(T::zero(), |s, iv| s + iv.2);
        let err: T = intervals.iter().fold(T::zero(), |s, iv| s + iv.3);
        if !total.is_finite() {
            return Err(Error::NonConvergent("integrand produced a non-finite value".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        if intervals.len() >= max_intervals {
            return Err(Error::NonConvergent(format!(
                "quadrature error {err:e} above tolerance after {max_intervals} subintervals"
            )));
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = (lo + hi) / T::lit(2.0);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre<T: Scalar>(points: usize) -> (Vec<T>, Vec<T>) {
    assert!(points >= 1);
    let n = T::from_usize_lossy(points);
    let mut nodes = vec![T::zero(); points];
    let mut weights = vec![T::zero(); points];
    let half = T::lit(0.5);
    for i in 0..points.div_ceil(2) {
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (n + half)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (T::one(), x);
            for k in 2..=points {
                let kf = T::from_usize_lossy(k);
                let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if points == 1 { x } else { p1 };
            let pm1 = if points == 1 { T::one() } else { p0 };
            dp = n * (x * p - pm1) / (x * x - T::one());
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        if points == 1 {
            x = T::zero();
            dp = T::one();
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[points - 1 - i] = x;
        weights[i] = w;
        weights[points - 1 - i] = w;
    }
    if points == 1 {
        weights[0] = T::lit(2.0);
    }
    (nodes, weights)
}
