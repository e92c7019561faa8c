//! Weighted least squares and tail fits.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Weighted polynomial fit `y ~ sum_j c_j x^j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyFit {
    pub coefficients: Vec<f64>,
    /// Standard errors taken from `(X' W X)^-1`, i.e. weights are read as
    /// inverse variances.
    pub std_errors: Vec<f64>,
    /// Standard errors scaled by the residual variance; `None` without
    /// spare degrees of freedom.
    pub residual_std_errors: Option<Vec<f64>>,
    pub r2: f64,
    pub n: usize,
}

pub fn poly_fit(x: &[f64], y: &[f64], w: &[f64], degree: usize) -> Option<PolyFit> {
    let n = x.len();
    let k = degree + 1;
    if n < k || y.len() != n || w.len() != n {
        return None;
    }
    let design = DMatrix::from_fn(n, k, |i, j| x[i].powi(j as i32));
    let wm = DMatrix::from_diagonal(&DVector::from_column_slice(w));
    let yv = DVector::from_column_slice(y);
    let xtw = design.transpose() * &wm;
    let cov = (&xtw * &design).try_inverse()?;
    let beta = &cov * (&xtw * &yv);
    let fitted = &design * &beta;
    let wsum: f64 = w.iter().sum();
    let ybar = w.iter().zip(y).map(|(wi, yi)| wi * yi).sum::<f64>() / wsum;
    let ss_res: f64 = (0..n).map(|i| w[i] * (y[i] - fitted[i]).powi(2)).sum();
    let ss_tot: f64 = (0..n).map(|i| w[i] * (y[i] - ybar).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    let std_errors: Vec<f64> = (0..k).map(|j| cov[(j, j)].sqrt()).collect();
    let residual_std_errors = (n > k).then(|| {
        let s2 = ss_res / (n - k) as f64;
        (0..k).map(|j| (cov[(j, j)] * s2).sqrt()).collect()
    });
    Some(PolyFit { coefficients: beta.iter().copied().collect(), std_errors, residual_std_errors, r2, n })
}

/// Straight-line fit `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_se: f64,
    pub r2: f64,
    pub n: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Option<LinearFit> {
    let f = poly_fit(x, y, w, 1)?;
    let slope_se = f.residual_std_errors.as_ref().map_or(f.std_errors[1], |s| s[1]);
    Some(LinearFit { intercept: f.coefficients[0], slope: f.coefficients[1], slope_se, r2: f.r2, n: f.n })
}

/// Fit of a log-survival curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailFit {
    /// Slope of log-survival: the decay rate is `-slope` for exponential
    /// tails and the power-law exponent otherwise.
    pub slope: f64,
    pub se: f64,
    pub r2: f64,
    /// Number of underlying observations.
    pub n: usize,
    pub censored: usize,
    /// Points of the survival curve used in the fit.
    pub points: usize,
}

/// Empirical `P{V >= m}` for `m = 1..=max`.
pub fn survival_ge(values: &[u64]) -> Vec<(u64, f64)> {
    let max = values.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; max as usize + 2];
    for &v in values {
        counts[v as usize] += 1;
    }
    let n = values.len() as f64;
    let mut at_least = values.len() as u64;
    let mut out = Vec::new();
    for (m, &c) in counts.iter().enumerate().take(max as usize + 1) {
        if m >= 1 {
            out.push((m as u64, at_least as f64 / n));
        }
        at_least -= c;
    }
    out
}

/// Weighted fit of `ln P{V >= m}` against `m` over the support where the
/// survival lies strictly inside (0,1). Weights are the inverse delta-method
/// variances `n S / (1 - S)`.
pub fn exponential_tail_fit(values: &[u64], censored: usize) -> Option<TailFit> {
    let n = values.len() as f64;
    let (mut x, mut y, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for (m, s) in survival_ge(values) {
        if s > 0.0 && s < 1.0 {
            x.push(m as f64);
            y.push(s.ln());
            w.push(n * s / (1.0 - s));
        }
    }
    let f = linear_fit(&x, &y, &w)?;
    Some(TailFit { slope: f.slope, se: f.slope_se, r2: f.r2, n: values.len(), censored, points: x.len() })
}

/// Least-squares fit of `ln S(t)` against `ln t`.
pub fn power_law_fit(curve: &[(f64, f64)], n: usize, censored: usize) -> Option<TailFit> {
    let pts: Vec<(f64, f64)> = curve.iter().filter(|(_, s)| *s > 0.0).map(|&(t, s)| (t.ln(), s.ln())).collect();
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let f = linear_fit(&x, &y, &vec![1.0; x.len()])?;
    Some(TailFit { slope: f.slope, se: f.slope_se, r2: f.r2, n, censored, points: x.len() })
}

/// `count` points spaced evenly in log scale over `[lo, hi]`, rounded.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<i64> {
    let mut out: Vec<i64> = (0..count)
        .map(|i| {
            let f = i as f64 / (count - 1) as f64;
            (lo.ln() + f * (hi.ln() - lo.ln())).exp().round() as i64
        })
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = linear_fit(&x, &y, &[1.0; 4]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_recovers_coefficients() {
        let x = [1.0, 4.0, 16.0, 64.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 0.5 * v - 0.01 * v * v).collect();
        let f = poly_fit(&x, &y, &[1.0; 4], 2).unwrap();
        assert!((f.coefficients[2] + 0.01).abs() < 1e-9);
        assert!(f.residual_std_errors.is_some());
    }

    #[test]
    fn geometric_tail_is_linear() {
        // exact geometric(1/2) frequencies
        let mut v = Vec::new();
        for m in 1..=12u64 {
            for _ in 0..(1u64 << (12 - m)) {
                v.push(m);
            }
        }
        let f = exponential_tail_fit(&v, 0).unwrap();
        assert!(f.r2 > 0.99);
        assert!((f.slope + std::f64::consts::LN_2).abs() < 0.05);
    }

    #[test]
    fn survival_counts() {
        let s = survival_ge(&[1, 1, 2, 3]);
        assert_eq!(s, vec![(1, 1.0), (2, 0.5), (3, 0.25)]);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(100.0, 10000.0, 5);
        assert_eq!(g, vec![100, 316, 1000, 3162, 10000]);
    }
}
