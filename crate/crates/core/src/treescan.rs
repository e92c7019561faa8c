//! Finite-box probes of tree structure: how many trees the paths from a box
//! form, and how often a pair of paths stays apart.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::env::{LatticePoint, Model, ModelParams, UniformField};
use crate::error::{Error, Result};
use crate::replicate;
use crate::stats::summary::Proportion;

/// Most vertices a box may hold.
pub const MAX_BOX_VERTICES: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StartSet {
    /// Every open vertex of the box.
    AllOpen,
    /// Open vertices on the bottom level only.
    BaseRow,
}

/// Spatial extent `[-half_width, half_width]^(d-1)`, levels `0..height`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSpec {
    pub params: ModelParams,
    pub half_width: i64,
    pub height: i64,
    pub starts: StartSet,
}

impl BoxSpec {
    pub fn vertices(&self) -> u64 {
        let side = (2 * self.half_width + 1) as u64;
        let levels = match self.starts {
            StartSet::AllOpen => self.height as u64,
            StartSet::BaseRow => 1,
        };
        side.saturating_pow(self.params.d as u32 - 1).saturating_mul(levels)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub paths: usize,
    pub components_at_top: usize,
    /// Entry `h` counts the classes of paths joined through shared vertices
    /// at levels `<= h`, for `h = 0..=height`.
    pub by_height: Vec<usize>,
}

fn box_starts(spec: &BoxSpec, model: &Model) -> Vec<LatticePoint> {
    let m = spec.params.d - 1;
    let side = 2 * spec.half_width + 1;
    let top = match spec.starts {
        StartSet::AllOpen => spec.height,
        StartSet::BaseRow => 1,
    };
    let mut out = Vec::new();
    let cells = (side as u64).pow(m as u32);
    let mut coords = vec![0i64; m + 1];
    for level in 0..top {
        for idx in 0..cells {
            let mut rem = idx;
            for k in (0..m).rev() {
                coords[k] = (rem % side as u64) as i64 - spec.half_width;
                rem /= side as u64;
            }
            coords[m] = level;
            if model.field.uniform(&coords) < model.params.p {
                out.push(LatticePoint::new(&coords));
            }
        }
    }
    out
}

/// Traces every start up to the box top and counts trees.
pub fn component_count(spec: &BoxSpec) -> Result<ComponentReport> {
    if spec.half_width < 0 || spec.height < 1 {
        return Err(Error::invalid("box", "extents must be positive"));
    }
    let vertices = spec.vertices();
    if vertices > MAX_BOX_VERTICES {
        return Err(Error::TooLarge { vertices, limit: MAX_BOX_VERTICES });
    }
    let model = Model::new(spec.params);
    let starts = box_starts(spec, &model);
    let mut owner: HashMap<LatticePoint, usize> = HashMap::new();
    let mut events: Vec<(i64, usize, usize)> = Vec::new();
    for (i, s) in starts.iter().enumerate() {
        if let Some(&j) = owner.get(s) {
            events.push((s.level(), i, j));
            continue;
        }
        let mut cur = s.clone();
        loop {
            let done = cur.level() >= spec.height;
            let next = if done { None } else { Some(model.successor_unchecked(&cur)?.next) };
            owner.insert(cur, i);
            let Some(next) = next else { break };
            if let Some(&j) = owner.get(&next) {
                events.push((next.level().min(spec.height), i, j));
                break;
            }
            cur = next;
        }
    }
    events.sort_unstable();
    let mut uf = UnionFind::<usize>::new(starts.len());
    let mut by_height = Vec::with_capacity(spec.height as usize + 1);
    let mut classes = starts.len();
    let mut e = 0;
    for h in 0..=spec.height {
        while e < events.len() && events[e].0 <= h {
            if uf.union(events[e].1, events[e].2) {
                classes -= 1;
            }
            e += 1;
        }
        by_height.push(classes);
    }
    Ok(ComponentReport { paths: starts.len(), components_at_top: classes, by_height })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurvivalReport {
    pub d: usize,
    pub spacing: i64,
    pub height: i64,
    /// Pairs still apart at `height`, with a 99% Wilson interval.
    pub survival: Proportion,
    /// d = 2 runs in which the gap changed sign (non-crossing predicts 0).
    pub sign_changes: u64,
}

/// Pairs at the origin and at `spacing` along the first axis, run to `height`.
pub fn pair_survival(params: &ModelParams, spacing: i64, height: i64, n_rep: u64) -> Result<SurvivalReport> {
    if spacing < 0 || height < 1 {
        return Err(Error::invalid("spacing", "spacing must be non-negative and height positive"));
    }
    let a = LatticePoint::origin(params.d);
    let mut b = a.clone();
    b.coords_mut()[0] = spacing;
    let runs = replicate::try_map(n_rep, |i| {
        if spacing == 0 {
            return Ok((false, false));
        }
        let m = Model::new(params.replicate(i));
        let mut flipped = false;
        for rec in m.regenerations(&[a.clone(), b.clone()])? {
            let rec = rec?;
            let z = rec.z();
            if params.d == 2 && z[0] < 0 {
                flipped = true;
            }
            if z.iter().all(|&c| c == 0) {
                return Ok((false, flipped));
            }
            if rec.t > height {
                return Ok((true, flipped));
            }
        }
        unreachable!("renewal stream ends only at coalescence")
    })?;
    let survived = runs.iter().filter(|r| r.0).count() as u64;
    let sign_changes = runs.iter().filter(|r| r.1).count() as u64;
    Ok(SurvivalReport {
        d: params.d,
        spacing,
        height,
        survival: Proportion::wilson(survived, n_rep, 0.99),
        sign_changes,
    })
}
