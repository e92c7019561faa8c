//! Drift of the gap chain between renewals: the martingale check in d = 2,
//! the Lyapunov function and the constant `alpha` in d = 3.

use serde::Serialize;

use crate::env::{LatticePoint, Model, ModelParams, Spatial};
use crate::error::{Error, Result};
use crate::joint::{independent_pair, JointState};
use crate::replicate;
use crate::stats::summary::{Estimate, Moments};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriftBin {
    /// Gaps `gap_lo..=gap_hi`; the last bin is open-ended (`gap_hi = i64::MAX`).
    pub gap_lo: i64,
    pub gap_hi: i64,
    pub mean: Estimate,
    pub second_moment: f64,
    /// Largest absolute increment seen in the bin.
    pub max_abs: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MartingaleConfig {
    /// Bins `0..=max_gap` plus one overflow bin.
    pub max_gap: i64,
    /// Number of pair runs; run `i` starts at gap `1 + i % max_gap`.
    pub runs: u64,
    pub renewals_per_run: usize,
    pub level: f64,
}

/// Gap transitions `(Z_l, Z_{l+1} - Z_l)` of one pair run. After the gap
/// hits 0 one more renewal of the merged pair is taken.
pub fn gap_transitions(model: &Model, start_gap: i64, renewals: usize) -> Result<Vec<(i64, i64)>> {
    let starts = [LatticePoint::new(&[0, 0]), LatticePoint::new(&[start_gap, 0])];
    let mut out = Vec::new();
    let mut z = start_gap;
    for rec in model.regenerations(&starts)?.take(renewals) {
        let rec = rec?;
        let nz = rec.z()[0];
        out.push((z, nz - z));
        z = nz;
        if z == 0 {
            break;
        }
    }
    if z == 0 {
        // absorbed: step the merged pair once more
        let top = LatticePoint::new(&[0, 0]);
        let merged = JointState::new(&[top.clone(), top])?;
        let next = model.joint_step(&merged)?;
        out.push((0, next.gaps()[0][0]));
    }
    Ok(out)
}

pub fn martingale_drift(params: &ModelParams, cfg: &MartingaleConfig) -> Result<Vec<DriftBin>> {
    if params.d != 2 {
        return Err(Error::invalid("d", "martingale drift needs d = 2"));
    }
    if cfg.max_gap < 1 {
        return Err(Error::invalid("gap_bins", "must be at least 1"));
    }
    let runs = replicate::try_map(cfg.runs, |i| {
        let m = Model::new(params.replicate(i));
        gap_transitions(&m, 1 + (i as i64 % cfg.max_gap), cfg.renewals_per_run)
    })?;
    let nbins = cfg.max_gap as usize + 2;
    let mut moments = vec![Moments::default(); nbins];
    let mut sq = vec![0.0f64; nbins];
    let mut max_abs = vec![0i64; nbins];
    for (z, dz) in runs.into_iter().flatten() {
        let b = (z.max(0) as usize).min(nbins - 1);
        moments[b].push(dz as f64);
        sq[b] += (dz * dz) as f64;
        max_abs[b] = max_abs[b].max(dz.abs());
    }
    Ok((0..nbins)
        .filter(|&b| moments[b].n() > 0)
        .map(|b| DriftBin {
            gap_lo: b as i64,
            gap_hi: if b == nbins - 1 { i64::MAX } else { b as i64 },
            mean: moments[b].mean_estimate(cfg.level),
            second_moment: sq[b] / moments[b].n() as f64,
            max_abs: max_abs[b],
        })
        .collect())
}

/// `f(x) = sqrt(ln(1 + |x|^2))`.
pub fn lyapunov_f(x: &[i64]) -> f64 {
    (1.0 + norm2(x)).ln().sqrt()
}

fn norm2(x: &[i64]) -> f64 {
    x.iter().map(|&c| (c as f64).powi(2)).sum()
}

/// Gradient of `f` at `x`.
fn lyapunov_grad(x: &[i64]) -> Vec<f64> {
    let t = norm2(x);
    let g = 1.0 / (2.0 * (1.0 + t) * (1.0 + t).ln().sqrt());
    x.iter().map(|&c| 2.0 * g * c as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapunovDrift {
    pub x: Vec<i64>,
    /// Mean of `f(Z_1) - f(x)`.
    pub plain: Estimate,
    /// Mean of `f(Z_1) - f(x) - grad f(x) . (Z_1 - x)`. Each walker's
    /// displacement up to a renewal has mean zero, so the correction term
    /// has mean zero and the two estimators share their expectation.
    pub controlled: Estimate,
    /// Per-coordinate mean of `Z_1 - x`.
    pub displacement: Vec<Estimate>,
}

/// First-renewal gap `Z_1` of pairs started at gap `x` in d = 3.
pub fn first_renewal_gaps(params: &ModelParams, x: &[i64], n_rep: u64) -> Result<Vec<Spatial>> {
    if params.d != 3 || x.len() != 2 {
        return Err(Error::invalid("d", "needs d = 3 and a gap in Z^2"));
    }
    let v = LatticePoint::new(&[0, 0, 0]);
    let u = LatticePoint::new(&[x[0], x[1], 0]);
    replicate::try_map(n_rep, |i| {
        let m = Model::new(params.replicate(i));
        let rec = m.regenerations(&[v.clone(), u.clone()])?.next().expect("at least one renewal")?;
        Ok(rec.z().clone())
    })
}

pub fn lyapunov_drift(params: &ModelParams, x: &[i64], n_rep: u64, level: f64) -> Result<LyapunovDrift> {
    let zs = first_renewal_gaps(params, x, n_rep)?;
    let fx = lyapunov_f(x);
    let grad = lyapunov_grad(x);
    let mut plain = Moments::default();
    let mut controlled = Moments::default();
    let mut disp = vec![Moments::default(); x.len()];
    for z in &zs {
        let df = lyapunov_f(z) - fx;
        let lin: f64 = grad.iter().zip(z.iter().zip(x)).map(|(g, (a, b))| g * (a - b) as f64).sum();
        plain.push(df);
        controlled.push(df - lin);
        for (k, m) in disp.iter_mut().enumerate() {
            m.push((z[k] - x[k]) as f64);
        }
    }
    Ok(LyapunovDrift {
        x: x.to_vec(),
        plain: plain.mean_estimate(level),
        controlled: controlled.mean_estimate(level),
        displacement: disp.iter().map(|m| m.mean_estimate(level)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaEstimate {
    pub x: Vec<i64>,
    /// Mean of `D = |Z_1|^2 - |x|^2`.
    pub alpha: Estimate,
    /// Mean of `D^2`.
    pub second_moment: Estimate,
    /// `E[D^2] / (2 alpha |x|^2)`.
    pub second_moment_ratio: f64,
    /// Mean of `D^3`.
    pub third_moment: Estimate,
    /// `E[D^3] / |x|^2`.
    pub third_moment_ratio: f64,
}

/// One simultaneous renewal of independent paths from `x` and the origin.
pub fn alpha_estimate(params: &ModelParams, x: &[i64], n_rep: u64, level: f64) -> Result<AlphaEstimate> {
    if params.d != 3 || x.len() != 2 {
        return Err(Error::invalid("d", "needs d = 3 and a gap in Z^2"));
    }
    let u = LatticePoint::new(&[x[0], x[1], 0]);
    let v = LatticePoint::new(&[0, 0, 0]);
    let xs = norm2(x);
    let ds = replicate::try_map(n_rep, |i| {
        let rec = independent_pair(&params.replicate(i), &u, &v, 1)?;
        let z: Vec<i64> = (0..2).map(|k| x[k] + rec.psi_u[0][k] - rec.psi_v[0][k]).collect();
        Ok(norm2(&z) - xs)
    })?;
    let m1 = Moments::from_iter(ds.iter().copied());
    let m2 = Moments::from_iter(ds.iter().map(|d| d * d));
    let m3 = Moments::from_iter(ds.iter().map(|d| d * d * d));
    let alpha = m1.mean_estimate(level);
    let second = m2.mean_estimate(level);
    let third = m3.mean_estimate(level);
    Ok(AlphaEstimate {
        x: x.to_vec(),
        alpha,
        second_moment: second,
        second_moment_ratio: second.value / (2.0 * alpha.value * xs),
        third_moment: third,
        third_moment_ratio: third.value / xs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_at_three_four() {
        assert!((lyapunov_f(&[3, 4]) - 26f64.ln().sqrt()).abs() < 1e-15);
        assert_eq!(lyapunov_f(&[0, 0]), 0.0);
    }

    #[test]
    fn gradient_matches_difference_quotient() {
        let x = [7, -3];
        let g = lyapunov_grad(&x);
        let f = |a: f64, b: f64| (1.0 + a * a + b * b).ln().sqrt();
        let h = 1e-6;
        let d0 = (f(7.0 + h, -3.0) - f(7.0 - h, -3.0)) / (2.0 * h);
        assert!((g[0] - d0).abs() < 1e-8);
    }

    #[test]
    fn absorbed_bin_is_zero() {
        let params = ModelParams::new(2, 0.5, 2).unwrap();
        let cfg = MartingaleConfig { max_gap: 3, runs: 200, renewals_per_run: 200, level: 0.99 };
        let bins = martingale_drift(&params, &cfg).unwrap();
        let zero = bins.iter().find(|b| b.gap_lo == 0).unwrap();
        assert_eq!(zero.mean.value, 0.0);
        assert_eq!(zero.max_abs, 0);
    }

    #[test]
    fn gaps_never_change_sign() {
        let params = ModelParams::new(2, 0.5, 8).unwrap();
        for i in 0..100 {
            let m = Model::new(params.replicate(i));
            let tr = gap_transitions(&m, 1 + (i as i64 % 6), 500).unwrap();
            assert!(tr.iter().all(|(z, dz)| z + dz >= 0));
        }
    }
}
