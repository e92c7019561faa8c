//! Renewal tails, pair coalescence survival and triple collision times.

use serde::Serialize;

use crate::env::{LatticePoint, Model, ModelParams};
use crate::error::{Error, Result};
use crate::joint::{CoalescenceRecord, RegenRecord};
use crate::replicate;
use crate::stats::fit::{exponential_tail_fit, poly_fit, power_law_fit, PolyFit, TailFit};
use crate::stats::summary::{Estimate, Moments, Proportion};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegenTails {
    pub sigma: TailFit,
    pub level_increment: TailFit,
    pub renewals: usize,
    pub runs: u64,
}

/// Renewals of pair runs started at gap `start_gap`, each stopped at
/// coalescence or after `per_run` renewals, until `target` are collected.
pub fn pair_renewals(params: &ModelParams, start_gap: i64, target: usize, per_run: usize) -> Result<(Vec<RegenRecord>, u64)> {
    let mut starts = vec![LatticePoint::origin(params.d); 2];
    starts[1].coords_mut()[0] = start_gap;
    let batch = 256u64;
    let mut out = Vec::with_capacity(target);
    let mut next_run = 0u64;
    while out.len() < target {
        let base = next_run;
        let chunk = replicate::try_map(batch, |j| {
            Model::new(params.replicate(base + j)).run_regenerations(&starts, per_run)
        })?;
        for run in chunk {
            next_run += 1;
            out.extend(run);
            if out.len() >= target {
                break;
            }
        }
    }
    out.truncate(target);
    Ok((out, next_run))
}

pub fn regeneration_tails(params: &ModelParams, start_gap: i64, target: usize, per_run: usize) -> Result<RegenTails> {
    let (recs, runs) = pair_renewals(params, start_gap, target, per_run)?;
    let sigmas: Vec<u64> = recs.iter().map(|r| r.sigma).collect();
    let mut dts = Vec::with_capacity(recs.len());
    let mut prev = 0i64;
    for r in &recs {
        if r.l == 1 {
            prev = 0;
        }
        dts.push((r.t - prev) as u64);
        prev = r.t;
    }
    let fail = || Error::invalid("N", "too few distinct renewal values to fit a tail");
    Ok(RegenTails {
        sigma: exponential_tail_fit(&sigmas, 0).ok_or_else(fail)?,
        level_increment: exponential_tail_fit(&dts, 0).ok_or_else(fail)?,
        renewals: recs.len(),
        runs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalPoint {
    pub t: i64,
    pub survival: Proportion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub x: i64,
    pub n: u64,
    /// Runs still apart at the cap; they count as survivors at every `t`.
    pub censored: u64,
    pub t_cap: i64,
    pub points: Vec<SurvivalPoint>,
}

impl SurvivalCurve {
    pub fn at(&self, t: i64) -> Option<&Proportion> {
        self.points.iter().find(|p| p.t == t).map(|p| &p.survival)
    }

    /// Power-law fit of the curve restricted to `[lo, hi]`.
    pub fn power_law(&self, lo: i64, hi: i64) -> Option<TailFit> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.t >= lo && p.t <= hi)
            .map(|p| (p.t as f64, p.survival.value))
            .collect();
        power_law_fit(&pts, self.n as usize, self.censored as usize)
    }
}

pub fn coalescence_records(params: &ModelParams, x: i64, n_rep: u64, t_cap: i64) -> Result<Vec<CoalescenceRecord>> {
    replicate::try_map(n_rep, |i| Model::new(params.replicate(i)).pair_coalescence(x, t_cap))
}

/// `P{T > t}` for the coalescence level `T` of the pair `(0,0)`, `(x,0)`.
pub fn coalescence_survival(params: &ModelParams, x: i64, n_rep: u64, t_cap: i64, grid: &[i64]) -> Result<SurvivalCurve> {
    if let Some(&t) = grid.iter().find(|&&t| t > t_cap) {
        return Err(Error::invalid("t_cap", format!("grid point {t} exceeds the cap")));
    }
    let recs = coalescence_records(params, x, n_rep, t_cap)?;
    Ok(survival_from_records(x, &recs, t_cap, grid, 0.95))
}

pub fn survival_from_records(x: i64, recs: &[CoalescenceRecord], t_cap: i64, grid: &[i64], level: f64) -> SurvivalCurve {
    let censored = recs.iter().filter(|r| r.hit_cap).count() as u64;
    let n = recs.len() as u64;
    let points = grid
        .iter()
        .map(|&t| {
            let k = recs.iter().filter(|r| r.hit_cap || r.t_at_coalescence > t).count() as u64;
            SurvivalPoint { t, survival: Proportion::wilson(k, n, level) }
        })
        .collect();
    SurvivalCurve { x, n, censored, t_cap, points }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriplePoint {
    pub gap_a: i64,
    pub gap_b: i64,
    pub product: i64,
    pub nu: Estimate,
    pub renewals: Estimate,
    pub first_renewal: Estimate,
    /// Means of `(T_l - T_{l-1})^m` for `m = 1, 2, 3`.
    pub increment_moments: [Estimate; 3],
    pub censored: u64,
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuRegression {
    pub points: Vec<TriplePoint>,
    pub nu_linear: PolyFit,
    pub renewals_linear: PolyFit,
    pub nu_quadratic: PolyFit,
    pub renewals_quadratic: PolyFit,
}

pub fn triple_point(params: &ModelParams, gap_a: i64, gap_b: i64, n_rep: u64, t_cap: i64) -> Result<TriplePoint> {
    if gap_a < 1 || gap_b < 1 {
        return Err(Error::invalid("triples", "gaps must be positive"));
    }
    let runs = replicate::try_map(n_rep, |i| {
        Model::new(params.replicate(i)).triple_collision(0, gap_a, gap_a + gap_b, t_cap)
    })?;
    let mut nu = Moments::default();
    let mut ren = Moments::default();
    let mut first = Moments::default();
    let mut inc = [Moments::default(); 3];
    let mut censored = 0;
    for r in &runs {
        if r.record.hit_cap {
            censored += 1;
        }
        // a censored run contributes its cap level as a lower bound
        nu.push(r.nu.unwrap_or(r.record.t_at_coalescence) as f64);
        ren.push(r.record.n_steps as f64);
        first.push(r.renewal_levels[0] as f64);
        let mut prev = 0;
        for &t in &r.renewal_levels {
            let d = (t - prev) as f64;
            for (m, acc) in inc.iter_mut().enumerate() {
                acc.push(d.powi(m as i32 + 1));
            }
            prev = t;
        }
    }
    Ok(TriplePoint {
        gap_a,
        gap_b,
        product: gap_a * gap_b,
        nu: nu.mean_estimate(0.95),
        renewals: ren.mean_estimate(0.95),
        first_renewal: first.mean_estimate(0.95),
        increment_moments: [inc[0].mean_estimate(0.95), inc[1].mean_estimate(0.95), inc[2].mean_estimate(0.95)],
        censored,
        n: n_rep,
    })
}

/// Fits mean `nu` and mean renewal count against the gap product with
/// inverse-variance weights.
pub fn nu_regression(params: &ModelParams, gaps: &[(i64, i64)], n_rep: u64, t_cap: i64) -> Result<NuRegression> {
    if params.d != 2 {
        return Err(Error::invalid("d", "triple collisions need d = 2"));
    }
    if gaps.len() < 4 {
        return Err(Error::invalid("triples", "need at least four gap configurations"));
    }
    let points: Vec<TriplePoint> =
        gaps.iter().map(|&(a, b)| triple_point(params, a, b, n_rep, t_cap)).collect::<Result<_>>()?;
    let x: Vec<f64> = points.iter().map(|p| p.product as f64).collect();
    let fit = |sel: fn(&TriplePoint) -> Estimate, deg: usize| {
        let y: Vec<f64> = points.iter().map(|p| sel(p).value).collect();
        let w: Vec<f64> = points.iter().map(|p| 1.0 / sel(p).se.powi(2).max(1e-300)).collect();
        poly_fit(&x, &y, &w, deg).ok_or_else(|| Error::invalid("triples", "singular design"))
    };
    Ok(NuRegression {
        nu_linear: fit(|p| p.nu, 1)?,
        renewals_linear: fit(|p| p.renewals, 1)?,
        nu_quadratic: fit(|p| p.nu, 2)?,
        renewals_quadratic: fit(|p| p.renewals, 2)?,
        points,
    })
}
