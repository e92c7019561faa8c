//! Interval estimates and goodness-of-fit helpers.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Two-sided normal quantile for confidence level `level`.
pub fn z_value(level: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.5 + level / 2.0)
}

/// Point estimate with a symmetric normal-theory interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Estimate {
    pub fn new(value: f64, se: f64, n: usize, level: f64) -> Self {
        let z = z_value(level);
        Estimate { value, se, lo: value - z * se, hi: value + z * se, n }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Estimate) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Same estimate with the interval recomputed at another level.
    pub fn at_level(&self, level: f64) -> Self {
        Estimate::new(self.value, self.se, self.n, level)
    }
}

/// Running sums for mean, variance and higher central moments.
#[derive(Clone, Copy, Debug, Default)]
pub struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let t1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += t1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += t1;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n as f64 - 1.0)
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Fourth central sample moment.
    pub fn central4(&self) -> f64 {
        self.m4 / self.n as f64
    }

    pub fn mean_estimate(&self, level: f64) -> Estimate {
        Estimate::new(self.mean, (self.variance() / self.n as f64).sqrt(), self.n, level)
    }

    /// Sample variance with a delta-method standard error.
    pub fn variance_estimate(&self, level: f64) -> Estimate {
        let v = self.variance();
        let se = ((self.central4() - v * v).max(0.0) / self.n as f64).sqrt();
        Estimate::new(v, se, self.n, level)
    }

    /// Sample standard deviation with a delta-method standard error.
    pub fn sd_estimate(&self, level: f64) -> Estimate {
        let v = self.variance_estimate(level);
        let s = v.value.sqrt();
        Estimate::new(s, v.se / (2.0 * s), self.n, level)
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(xs: I) -> Self {
        let mut m = Moments::default();
        for x in xs {
            m.push(x);
        }
        m
    }
}

pub fn mean_estimate(xs: &[f64], level: f64) -> Estimate {
    Moments::from_iter(xs.iter().copied()).mean_estimate(level)
}

/// Binomial proportion with a Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proportion {
    pub k: u64,
    pub n: u64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn wilson(k: u64, n: u64, level: f64) -> Self {
        let (lo, hi) = wilson(k, n, level);
        Proportion { k, n, value: if n == 0 { 0.0 } else { k as f64 / n as f64 }, lo, hi }
    }

    /// Binomial standard error of the point estimate.
    pub fn se(&self) -> f64 {
        (self.value * (1.0 - self.value) / self.n as f64).sqrt()
    }
}

pub fn wilson(k: u64, n: u64, level: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = z_value(level);
    let nf = n as f64;
    let ph = k as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let center = (ph + z * z / (2.0 * nf)) / denom;
    let half = z * (ph * (1.0 - ph) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k >= n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Kolmogorov-Smirnov statistic against `cdf` and its asymptotic p-value.
pub fn ks_test<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> (f64, f64) {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    (d, kolmogorov_sf((n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d))
}

/// `P{K > lambda}` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

pub fn ks_standard_normal(xs: &[f64]) -> (f64, f64) {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    ks_test(xs, |x| n.cdf(x))
}

/// Pearson chi-square of `observed` counts against cell probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> (f64, f64) {
    let total: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    let pval = ChiSquared::new(df).expect("positive df").sf(stat);
    (stat, pval)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_two_pass() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0, 7.0];
        let m = Moments::from_iter(xs);
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        let c4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / 6.0;
        assert!((m.mean() - mean).abs() < 1e-12);
        assert!((m.variance() - var).abs() < 1e-12);
        assert!((m.central4() - c4).abs() < 1e-9);
    }

    #[test]
    fn z_values() {
        assert!((z_value(0.95) - 1.959964).abs() < 1e-5);
        assert!((z_value(0.99) - 2.575829).abs() < 1e-5);
    }

    #[test]
    fn wilson_brackets_estimate() {
        let (lo, hi) = wilson(30, 100, 0.95);
        assert!(lo < 0.3 && hi > 0.3);
        assert!((lo - 0.2189).abs() < 1e-3 && (hi - 0.3958).abs() < 1e-3);
        assert_eq!(wilson(0, 10, 0.95).0, 0.0);
    }

    #[test]
    fn kolmogorov_tail_values() {
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn chi_square_perfect_fit() {
        let (s, p) = chi_square(&[25, 25, 25, 25], &[0.25; 4]);
        assert_eq!(s, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
    }
}
