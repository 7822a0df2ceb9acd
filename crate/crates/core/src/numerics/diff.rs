//! Central finite differences refined by Richardson extrapolation.
//!
//! Every stencil here is symmetric, so the raw estimate carries an error
//! series in even powers of the step. Halving the step and eliminating the
//! leading terms (the Ridders tableau) drives truncation error down fast;
//! the tableau stops as soon as successive estimates stop improving, which
//! is where round-off takes over.

use crate::scalar::Scalar;

/// Outcome of an extrapolated difference: estimate plus error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated<T> {
    pub value: Vec<T>,
    pub error: T,
}

/// Default tableau depth (number of step halvings).
pub const DEFAULT_LEVELS: usize = 10;

/// Richardson tableau over steps `h, h/2, h/4, ...` for a vector-valued raw
/// estimate whose error expands in even powers of `h`.
///
/// `raw(h)` returns the un-extrapolated difference quotient at step `h`.
/// The returned error is the max-norm disagreement of the best tableau entry
/// with its neighbours, relative to nothing (absolute units of the output).
pub fn richardson_tableau<T, F>(mut raw: F, h: T, levels: usize) -> Extrapolated<T>
where
    T: Scalar,
    F: FnMut(T) -> Vec<T>,
{
    assert!(levels >= 1);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let dist = |a: &[T], b: &[T]| {
        a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
    };

    let mut prev: Vec<Vec<T>> = vec![raw(h)];
    let mut best = prev[0].clone();
    let mut best_err = T::infinity();
    let mut step = h;
    for _ in 1..levels {
        step = step / two;
        let mut row: Vec<Vec<T>> = Vec::with_capacity(prev.len() + 1);
        row.push(raw(step));
        let mut fac = four;
        for j in 1..=prev.len() {
            let upper = &row[j - 1];
            let lower = &prev[j - 1];
            let next: Vec<T> = upper
                .iter()
                .zip(lower)
                .map(|(&a, &b)| (a * fac - b) / (fac - T::one()))
                .collect();
            let err = dist(&next, upper).max(dist(&next, lower));
            if err <= best_err {
                best_err = err;
                best = next.clone();
            }
            row.push(next);
            fac = fac * four;
        }
        let k = row.len() - 1;
        // Round-off dominates once the diagonal gets worse than the previous one.
        if dist(&row[k], &prev[k - 1]) >= two * best_err {
            break;
        }
        prev = row;
    }
    if best_err == T::infinity() {
        best_err = T::zero();
    }
    Extrapolated { value: best, error: best_err }
}

/// Exactly two steps (`h` and `h/2`) combined once: error `O(h^4)`.
pub fn richardson_two_step<T, F>(mut raw: F, h: T) -> Vec<T>
where
    T: Scalar,
    F: FnMut(T) -> Vec<T>,
{
    let coarse = raw(h);
    let fine = raw(h / T::lit(2.0));
    let three = T::lit(3.0);
    fine.iter().zip(&coarse).map(|(&f, &c)| (T::lit(4.0) * f - c) / three).collect()
}

/// First derivative of a scalar function.
pub fn derivative<T, F>(f: F, x: T, h: T) -> Extrapolated<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    richardson_tableau(|s| vec![(f(x + s) - f(x - s)) / (s + s)], h, DEFAULT_LEVELS)
}

/// Second derivative of a scalar function.
pub fn second_derivative<T, F>(f: F, x: T, h: T) -> Extrapolated<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let f0 = f(x);
    richardson_tableau(
        |s| vec![(f(x + s) - f0 - f0 + f(x - s)) / (s * s)],
        h,
        DEFAULT_LEVELS,
    )
}

/// Partial derivatives of a vector-valued field at `x` along every coordinate.
///
/// Returns `d[k]` = ∂_k F(x), each a vector of the field's components.
pub fn gradient<T, F>(field: &F, x: &[T], steps: &[T]) -> (Vec<Vec<T>>, T)
where
    T: Scalar,
    F: Fn(&[T]) -> Vec<T>,
{
    let mut err = T::zero();
    let grads = (0..x.len())
        .map(|k| {
            let ex = richardson_tableau(
                |s| {
                    let mut p = x.to_vec();
                    let mut m = x.to_vec();
                    p[k] = p[k] + s;
                    m[k] = m[k] - s;
                    field(&p)
                        .iter()
                        .zip(field(&m))
                        .map(|(&a, b)| (a - b) / (s + s))
                        .collect()
                },
                steps[k],
                DEFAULT_LEVELS,
            );
            err = err.max(ex.error);
            ex.value
        })
        .collect();
    (grads, err)
}

/// All second partial derivatives `d[k][m]` = ∂_k ∂_m F(x) (symmetric).
pub fn hessian<T, F>(field: &F, x: &[T], steps: &[T]) -> (Vec<Vec<Vec<T>>>, T)
where
    T: Scalar,
    F: Fn(&[T]) -> Vec<T>,
{
    let dim = x.len();
    let f0 = field(x);
    let mut err = T::zero();
    let mut out = vec![vec![Vec::new(); dim]; dim];
    for k in 0..dim {
        for m in k..dim {
            let ex = if k == m {
                richardson_tableau(
                    |s| {
                        let mut p = x.to_vec();
                        let mut q = x.to_vec();
                        p[k] = p[k] + s;
                        q[k] = q[k] - s;
                        field(&p)
                            .iter()
                            .zip(field(&q))
                            .zip(&f0)
                            .map(|((&a, b), &c)| (a - c - c + b) / (s * s))
                            .collect()
                    },
                    steps[k],
                    DEFAULT_LEVELS,
                )
            } else {
                let ratio = steps[m] / steps[k];
                richardson_tableau(
                    |s| {
                        let t = s * ratio;
                        let eval = |sk: T, sm: T| {
                            let mut p = x.to_vec();
                            p[k] = p[k] + sk;
                            p[m] = p[m] + sm;
                            field(&p)
                        };
                        let pp = eval(s, t);
                        let pm = eval(s, -t);
                        let mp = eval(-s, t);
                        let mm = eval(-s, -t);
                        let denom = T::lit(4.0) * s * t;
                        (0..pp.len())
                            .map(|c| (pp[c] - pm[c] - mp[c] + mm[c]) / denom)
                            .collect()
                    },
                    steps[k],
                    DEFAULT_LEVELS,
                )
            };
            err = err.max(ex.error);
            out[k][m] = ex.value.clone();
            out[m][k] = ex.value;
        }
    }
    (out, err)
}
