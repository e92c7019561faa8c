//! Diffusive scaling: the constants `gamma`, `sigma`, rescaled endpoints,
//! scaled grid starts and the counts of distinct paths through a window.

use serde::Serialize;

use crate::analytic;
use crate::env::{LatticePoint, Model, ModelParams};
use crate::error::{Error, Result};
use crate::replicate;
use crate::stats::summary::{Estimate, Moments, Proportion};

/// Scaling used to rescale paths: time by `n^2 gamma`, space by `n sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingParams {
    pub sigma: f64,
    pub gamma: f64,
    pub n: u32,
}

impl ScalingParams {
    pub fn new(sigma: f64, gamma: f64, n: u32) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid("sigma", "must be finite and positive"));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::invalid("gamma", "must be finite and positive"));
        }
        if n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        Ok(ScalingParams { sigma, gamma, n })
    }

    /// Exact d = 2 constants at `p`.
    pub fn exact(p: f64, n: u32) -> Result<Self> {
        Self::new(analytic::sigma2_exact(p)?.sqrt(), analytic::gamma_exact(p)?, n)
    }

    /// `n^2 gamma t` in levels.
    pub fn time(&self, t: f64) -> f64 {
        (self.n as f64).powi(2) * self.gamma * t
    }

    /// `n sigma x` in lattice units.
    pub fn space(&self, x: f64) -> f64 {
        self.n as f64 * self.sigma * x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingEstimate {
    pub gamma: Estimate,
    pub sigma: Estimate,
    pub sigma2: Estimate,
    pub n: usize,
}

/// First increments `(X_1, Y_1)` from the origin in `n` independent
/// environments.
pub fn first_increments(params: &ModelParams, n: u64) -> Result<Vec<(i64, i64)>> {
    let origin = LatticePoint::origin(params.d);
    replicate::try_map(n, |i| {
        let m = Model::new(params.replicate(i));
        let s = m.successor(&origin)?;
        Ok((s.next.coords()[0], s.next.level()))
    })
}

pub fn estimate_scaling(params: &ModelParams, n: u64) -> Result<ScalingEstimate> {
    if n < 1000 {
        return Err(Error::invalid("N", "need at least 1000 replicates"));
    }
    let inc = first_increments(params, n)?;
    Ok(scaling_from_increments(&inc, 0.95))
}

pub fn scaling_from_increments(inc: &[(i64, i64)], level: f64) -> ScalingEstimate {
    let y = Moments::from_iter(inc.iter().map(|&(_, y)| y as f64));
    let x = Moments::from_iter(inc.iter().map(|&(x, _)| x as f64));
    ScalingEstimate {
        gamma: y.mean_estimate(level),
        sigma: x.sd_estimate(level),
        sigma2: x.variance_estimate(level),
        n: inc.len(),
    }
}

/// `pi(n^2 gamma t) / (n sigma)` for paths from the origin in `n_rep`
/// independent environments.
pub fn rescaled_endpoint_sample(params: &ModelParams, scaling: &ScalingParams, n_rep: u64, t: f64) -> Result<Vec<f64>> {
    let horizon = scaling.time(t);
    if horizon < 10.0 {
        return Err(Error::invalid("n", "rescaled horizon must span at least 10 levels"));
    }
    let origin = LatticePoint::origin(params.d);
    replicate::try_map(n_rep, |i| {
        let m = Model::new(params.replicate(i));
        let path = m.trace(&origin, horizon.ceil() as i64)?;
        Ok(path.path_at(horizon)? / scaling.space(1.0))
    })
}

/// Scaled start and the offset `i_n` used to reach an open vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridStart {
    pub point: LatticePoint,
    pub offset: i64,
}

/// First open vertex strictly right of `floor(n sigma x1)` at level
/// `floor(n^2 gamma x2)`.
pub fn grid_start<F: crate::env::UniformField>(model: &Model<F>, scaling: &ScalingParams, x: (f64, f64)) -> Result<GridStart> {
    if model.params.d != 2 {
        return Err(Error::invalid("d", "grid start needs d = 2"));
    }
    let bx = scaling.space(x.0).floor() as i64;
    let level = scaling.time(x.1).floor() as i64;
    let limit = (model.params.max_search_height as i64).pow(2);
    for i in 1..=limit {
        let w = LatticePoint::new(&[bx + i, level]);
        if model.is_open(&w)? {
            return Ok(GridStart { point: w, offset: i });
        }
    }
    Err(Error::SearchExceeded { from: LatticePoint::new(&[bx, level]), limit: model.params.max_search_height })
}

/// Distinct-path counts through a window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaEstimate {
    pub t0: f64,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    /// Lattice points in the start window.
    pub width: u64,
    pub prob_ge2: Proportion,
    pub prob_ge3: Proportion,
    pub n: u64,
}

/// Unscaled window width `ceil(n sigma eps) + 3`.
pub fn eta_window(scaling: &ScalingParams, epsilon: f64) -> u64 {
    scaling.space(epsilon).ceil() as u64 + 3
}

pub fn eta_counts(params: &ModelParams, width: u64, h: f64, n_rep: u64) -> Result<Vec<usize>> {
    if params.d != 2 {
        return Err(Error::invalid("d", "eta estimate needs d = 2"));
    }
    if width == 0 {
        return Err(Error::invalid("epsilon", "window must hold a lattice point"));
    }
    let starts: Vec<LatticePoint> = (0..width as i64).map(|x| LatticePoint::new(&[x, 0])).collect();
    replicate::try_map(n_rep, |i| {
        let m = Model::new(params.replicate(i));
        Ok(m.distinct_at_level(&starts, h)?.len())
    })
}

pub fn eta_estimate(params: &ModelParams, scaling: &ScalingParams, t: f64, epsilon: f64, n_rep: u64) -> Result<EtaEstimate> {
    eta_estimate_with_width(params, scaling, t, epsilon, eta_window(scaling, epsilon), n_rep)
}

pub fn eta_estimate_with_width(
    params: &ModelParams,
    scaling: &ScalingParams,
    t: f64,
    epsilon: f64,
    width: u64,
    n_rep: u64,
) -> Result<EtaEstimate> {
    let counts = eta_counts(params, width, scaling.time(t), n_rep)?;
    let ge2 = counts.iter().filter(|&&c| c >= 2).count() as u64;
    let ge3 = counts.iter().filter(|&&c| c >= 3).count() as u64;
    Ok(EtaEstimate {
        t0: 0.0,
        t,
        a: 0.0,
        b: epsilon,
        width,
        prob_ge2: Proportion::wilson(ge2, n_rep, 0.95),
        prob_ge3: Proportion::wilson(ge3, n_rep, 0.95),
        n: n_rep,
    })
}
