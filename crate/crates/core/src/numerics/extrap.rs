//! Limits from sampled sequences: power-law tails at infinity and
//! polynomial extrapolation to zero.

use crate::scalar::Scalar;

/// Linear least squares `min |A c - b|` through modified Gram-Schmidt QR.
/// Columns are normalised first so badly scaled bases stay solvable.
pub fn least_squares<T: Scalar>(rows: &[Vec<T>], rhs: &[T]) -> Option<Vec<T>> {
    let m = rows.len();
    let k = rows.first()?.len();
    if m < k || rhs.len() != m {
        return None;
    }
    let mut cols: Vec<Vec<T>> = (0..k).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let norms: Vec<T> = cols
        .iter()
        .map(|c| c.iter().fold(T::zero(), |s, &x| s + x * x).sqrt())
        .collect();
    for (c, &nrm) in cols.iter_mut().zip(&norms) {
        if nrm == T::zero() {
            return None;
        }
        c.iter_mut().for_each(|x| *x = *x / nrm);
    }
    let mut r = vec![vec![T::zero(); k]; k];
    let mut q: Vec<Vec<T>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut v = cols[j].clone();
        for (i, qi) in q.iter().enumerate() {
            let d = qi.iter().zip(&v).fold(T::zero(), |s, (&a, &b)| s + a * b);
            r[i][j] = d;
            v.iter_mut().zip(qi).for_each(|(x, &y)| *x = *x - d * y);
        }
        let nrm = v.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
        if nrm <= T::epsilon() * T::lit(16.0) {
            return None;
        }
        r[j][j] = nrm;
        v.iter_mut().for_each(|x| *x = *x / nrm);
        q.push(v);
    }
    let qtb: Vec<T> = q
        .iter()
        .map(|qi| qi.iter().zip(rhs).fold(T::zero(), |s, (&a, &b)| s + a * b))
        .collect();
    let mut c = vec![T::zero(); k];
    for i in (0..k).rev() {
        let mut s = qtb[i];
        for j in i + 1..k {
            s = s - r[i][j] * c[j];
        }
        c[i] = s / r[i][i];
    }
    Some(c.iter().zip(&norms).map(|(&x, &nrm)| x / nrm).collect())
}

/// Successive estimates of `lim_{r→∞} f(r)` for a tail of the form
/// `c0 + c1 r^{-p} + c2 r^{-(p+1)} + ...` sampled on a geometric grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TailLimit<T> {
    pub radii: Vec<T>,
    pub values: Vec<T>,
    /// `estimates[j]` uses the exponents `p, ..., p + j`.
    pub estimates: Vec<T>,
    pub limit: T,
    /// Change between the last two estimates.
    pub error: T,
}

/// Richardson elimination of `r^{-p}, r^{-(p+1)}, ...` on radii with a
/// constant ratio, keeping every intermediate limit.
pub fn tail_limit<T: Scalar>(radii: &[T], values: &[T], leading_exponent: T) -> TailLimit<T> {
    assert!(radii.len() >= 2 && radii.len() == values.len());
    let q = radii[1] / radii[0];
    debug_assert!(radii.windows(2).all(|w| ((w[1] / w[0]) / q - T::one()).abs() < T::lit(1e-9)));
    let mut column = values.to_vec();
    let mut estimates = Vec::new();
    for j in 0..radii.len() - 1 {
        let f = q.powf(leading_exponent + T::from_usize_lossy(j));
        column = column.windows(2).map(|w| (f * w[1] - w[0]) / (f - T::one())).collect();
        estimates.push(*column.last().unwrap());
    }
    let limit = *estimates.last().unwrap_or(values.last().unwrap());
    let error = if estimates.len() >= 2 {
        (estimates[estimates.len() - 1] - estimates[estimates.len() - 2]).abs()
    } else {
        (limit - *values.last().unwrap()).abs()
    };
    TailLimit { radii: radii.to_vec(), values: values.to_vec(), estimates, limit, error }
}

/// Neville extrapolation of samples `(x_i, y_i)` to `x = 0`.
pub fn extrapolate_to_zero<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    assert_eq!(xs.len(), ys.len());
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xa, xb) = (xs[i], xs[i + level]);
            p[i] = (xb * p[i] - xa * p[i + 1]) / (xb - xa);
        }
    }
    p[0]
}

/// Least-squares slope of `ln|y|` against `ln x`.
pub fn log_log_slope<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    let rows: Vec<Vec<T>> = xs.iter().map(|&x| vec![T::one(), x.ln()]).collect();
    let rhs: Vec<T> = ys.iter().map(|&y| y.abs().ln()).collect();
    least_squares(&rows, &rhs).map(|c| c[1]).unwrap_or(T::nan())
}

/// `count` points from `lo` to `hi` spaced evenly in `ln r`.
pub fn geometric_grid<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / T::from_usize_lossy(count - 1);
    (0..count)
        .map(|k| if k + 1 == count { hi } else { lo * (step * T::from_usize_lossy(k)).exp() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_limit_recovers_constant() {
        let f = |r: f64| 0.25 + 3.0 / r + 7.0 / (r * r) - 2.0 / (r * r * r);
        let radii = geometric_grid(1e2, 1e4, 5);
        let values: Vec<f64> = radii.iter().map(|&r| f(r)).collect();
        let t = tail_limit(&radii, &values, 1.0);
        assert_eq!(t.estimates.len(), 4);
        assert!((t.limit - 0.25).abs() < 1e-14, "{}", t.limit);
        // three decades alone leave the cubic term at the 1e-9 level
        let coarse = [1e2, 1e3, 1e4];
        let v: Vec<f64> = coarse.iter().map(|&r| f(r)).collect();
        assert!((tail_limit(&coarse, &v, 1.0).limit - 0.25).abs() > 1e-10);
    }

    #[test]
    fn neville_is_exact_on_quadratics() {
        let f = |x: f64| 1.5 - 2.0 * x + 0.75 * x * x;
        let xs = [0.4, 0.2, 0.1];
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        assert!((extrapolate_to_zero(&xs, &ys) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = geometric_grid(1e2f64, 1e4, 9);
        let ys: Vec<f64> = xs.iter().map(|&x| 5.0 * x.powf(-1.5)).collect();
        assert!((log_log_slope(&xs, &ys) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn least_squares_overdetermined_line() {
        let rows = vec![vec![1.0f64, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]];
        let c = least_squares(&rows, &[1.0, 3.0, 5.0]).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-14 && (c[1] - 2.0).abs() < 1e-14);
    }
}
