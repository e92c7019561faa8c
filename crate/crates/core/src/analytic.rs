//! Exact law of the first increment in d = 2 and the resulting series for
//! the scaling constants.

use crate::error::{Error, Result};

const TERM_FLOOR: f64 = 1e-15;

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("p", format!("must lie in (0,1), got {p}")))
    }
}

/// `P{Y_1 > m} = (1-p)^((m+1)^2 - 1)`: all of `V(u,m)` closed.
pub fn y_tail(p: f64, m: u32) -> f64 {
    let e = (m as f64 + 1.0).powi(2) - 1.0;
    (1.0 - p).powf(e)
}

/// `P{Y_1 = k}` for `k >= 1`.
pub fn y_pmf(p: f64, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    y_tail(p, k - 1) - y_tail(p, k)
}

/// Largest `m` whose tail term is still needed. Past it the remaining
/// series is bounded by a geometric sum with ratio below the last term.
fn series_len(p: f64) -> u32 {
    let mut m = 0;
    while y_tail(p, m) >= TERM_FLOOR {
        m += 1;
    }
    m
}

/// `gamma = E[Y_1] = sum_{m>=0} P{Y_1 > m}`.
pub fn gamma_exact(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((0..=series_len(p)).map(|m| y_tail(p, m)).sum())
}

/// `sigma^2 = Var(X_1) = E[Y_1 (Y_1 + 1)] / 3`.
pub fn sigma2_exact(p: f64) -> Result<f64> {
    check_p(p)?;
    let top = series_len(p) + 1;
    Ok((1..=top).map(|k| (k as f64) * (k as f64 + 1.0) * y_pmf(p, k) / 3.0).sum())
}

/// Law of `X_1` given `Y_1 = k`: uniform on `{-k..k}`, listed from `-k`.
pub fn x_given_y(p: f64, k: u32) -> Result<Vec<f64>> {
    check_p(p)?;
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let n = 2 * k as usize + 1;
    Ok(vec![1.0 / n as f64; n])
}

/// Tail and conditional law bundled for one `p`.
#[derive(Clone, Copy, Debug)]
pub struct IncrementLaw {
    pub p: f64,
}

impl IncrementLaw {
    pub fn new(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(IncrementLaw { p })
    }

    pub fn tail(&self, m: u32) -> f64 {
        y_tail(self.p, m)
    }

    pub fn pmf(&self, k: u32) -> f64 {
        y_pmf(self.p, k)
    }

    pub fn conditional(&self, k: u32) -> Result<Vec<f64>> {
        x_given_y(self.p, k)
    }

    /// Joint mass `P{X_1 = x, Y_1 = k}`.
    pub fn joint(&self, x: i64, k: u32) -> f64 {
        if x.unsigned_abs() > k as u64 || k == 0 {
            0.0
        } else {
            self.pmf(k) / (2 * k + 1) as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_values() {
        assert_eq!(y_tail(0.5, 0), 1.0);
        assert_eq!(y_tail(0.5, 1), 0.125);
        assert_eq!(y_tail(0.5, 2), 2f64.powi(-8));
    }

    #[test]
    fn gamma_series_at_half() {
        let direct = 1.0 + 2f64.powi(-3) + 2f64.powi(-8) + 2f64.powi(-15) + 2f64.powi(-24) + 2f64.powi(-35) + 2f64.powi(-48);
        assert!((gamma_exact(0.5).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn sigma2_series_at_half() {
        let q: f64 = 0.5;
        let mut s = 0.0;
        for k in 1..30i32 {
            s += (k * (k + 1)) as f64 * (q.powi(k * k - 1) - q.powi((k + 1) * (k + 1) - 1)) / 3.0;
        }
        assert!((sigma2_exact(0.5).unwrap() - s).abs() < 1e-14);
    }

    #[test]
    fn limits_near_one() {
        let p = 1.0 - 1e-9;
        assert!((gamma_exact(p).unwrap() - 1.0).abs() < 1e-6);
        assert!((sigma2_exact(p).unwrap() - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn truncation_error_is_small_for_small_p() {
        let p = 0.02;
        let full: f64 = (0..2000).map(|m| y_tail(p, m)).sum();
        assert!((gamma_exact(p).unwrap() - full).abs() < 1e-12);
    }

    #[test]
    fn conditional_is_palindromic_probability_vector() {
        for k in 1..=4 {
            let v = x_given_y(0.3, k).unwrap();
            assert_eq!(v.len(), 2 * k as usize + 1);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            let mut r = v.clone();
            r.reverse();
            assert_eq!(v, r);
        }
    }

    #[test]
    fn pmf_sums_to_one() {
        let law = IncrementLaw::new(0.3).unwrap();
        let s: f64 = (1..40).map(|k| law.pmf(k)).sum();
        assert!((s - 1.0).abs() < 1e-14);
        let j: f64 = (1..40).flat_map(|k| (-(k as i64)..=k as i64).map(move |x| (x, k))).map(|(x, k)| law.joint(x, k)).sum();
        assert!((j - 1.0).abs() < 1e-12);
    }
}
