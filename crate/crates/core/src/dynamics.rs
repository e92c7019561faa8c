//! Single-path dynamics: the successor rule and traced paths.

use std::cmp::Ordering;

use crate::env::{priority_cmp, LatticePoint, Model, ModelParams, Spatial, UniformField};
use crate::error::{Error, Result};
use crate::geometry::for_each_in_ball;

/// Successor of a vertex and the number of levels it jumped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub next: LatticePoint,
    pub level_jump: u32,
}

impl<F: UniformField> Model<F> {
    /// The open vertex of minimal priority in the lowest slab above `u`
    /// that contains an open vertex. Defined for closed `u` as well.
    pub fn successor(&self, u: &LatticePoint) -> Result<Step> {
        self.check_dim(u)?;
        self.successor_unchecked(u)
    }

    pub(crate) fn successor_unchecked(&self, u: &LatticePoint) -> Result<Step> {
        let p = self.params.p;
        let d = u.d();
        let center: Spatial = Spatial::from_slice(u.spatial());
        let mut scratch = u.clone();
        for l in 1..=self.params.max_search_height {
            scratch.coords_mut()[d - 1] = u.level() + l as i64;
            let mut best: Option<(f64, LatticePoint)> = None;
            for_each_in_ball(scratch.coords_mut(), &center, l as i64, &mut |pt: &[i64]| {
                let v = self.field.uniform(pt);
                if v < p {
                    let better = match &best {
                        None => true,
                        Some((bv, bp)) => priority_cmp(v, pt, *bv, bp.coords()) == Ordering::Less,
                    };
                    if better {
                        best = Some((v, LatticePoint::new(pt)));
                    }
                }
            });
            if let Some((_, next)) = best {
                return Ok(Step { next, level_jump: l });
            }
        }
        Err(Error::SearchExceeded { from: u.clone(), limit: self.params.max_search_height })
    }

    /// Path from `u` until it reaches level `u.level + horizon`.
    pub fn trace(&self, u: &LatticePoint, horizon: i64) -> Result<PathRecord> {
        self.check_dim(u)?;
        let target = u.level() + horizon;
        let mut vertices = vec![u.clone()];
        let mut cur = u.clone();
        while cur.level() < target {
            cur = self.successor_unchecked(&cur)?.next;
            vertices.push(cur.clone());
        }
        Ok(PathRecord { vertices })
    }
}

pub fn successor(params: &ModelParams, u: &LatticePoint) -> Result<Step> {
    Model::new(*params).successor(u)
}

pub fn trace(params: &ModelParams, u: &LatticePoint, horizon: i64) -> Result<PathRecord> {
    Model::new(*params).trace(u, horizon)
}

/// Vertices `h_0(u) = u, h_1(u), ...` of a traced path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRecord {
    pub vertices: Vec<LatticePoint>,
}

/// Exact position on a path at an integer level, as `num / den` per
/// spatial coordinate.
#[derive(Clone, Debug)]
pub struct RationalPosition {
    pub num: Spatial,
    pub den: i64,
}

impl PartialEq for RationalPosition {
    fn eq(&self, other: &Self) -> bool {
        self.num.len() == other.num.len()
            && self
                .num
                .iter()
                .zip(&other.num)
                .all(|(a, b)| *a as i128 * other.den as i128 == *b as i128 * self.den as i128)
    }
}

impl PathRecord {
    pub fn start(&self) -> &LatticePoint {
        &self.vertices[0]
    }

    pub fn last(&self) -> &LatticePoint {
        self.vertices.last().expect("path has a start")
    }

    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Horizontal increments `X_k` along the first spatial axis.
    pub fn x_increments(&self) -> Vec<i64> {
        self.vertices.windows(2).map(|w| w[1].coords()[0] - w[0].coords()[0]).collect()
    }

    /// Level increments `Y_k`.
    pub fn y_increments(&self) -> Vec<i64> {
        self.vertices.windows(2).map(|w| w[1].level() - w[0].level()).collect()
    }

    /// Spatial increment of step `k` (1-based).
    pub fn spatial_increment(&self, k: usize) -> Spatial {
        self.vertices[k].spatial_diff(&self.vertices[k - 1])
    }

    /// Index of the last vertex at level `<= t`.
    pub fn segment_index(&self, t: f64) -> Option<usize> {
        if t < self.start().level() as f64 {
            return None;
        }
        let idx = self.vertices.partition_point(|v| (v.level() as f64) <= t);
        Some(idx - 1)
    }

    /// Interpolated first spatial coordinate at level `t`.
    pub fn path_at(&self, t: f64) -> Result<f64> {
        let last = self.last().level() as f64;
        let i = self
            .segment_index(t)
            .filter(|_| t <= last)
            .ok_or_else(|| Error::OutOfRange(format!("level {t}")))?;
        let a = &self.vertices[i];
        if i + 1 == self.vertices.len() {
            return Ok(a.coords()[0] as f64);
        }
        let b = &self.vertices[i + 1];
        let frac = (t - a.level() as f64) / (b.level() - a.level()) as f64;
        Ok(a.coords()[0] as f64 + frac * (b.coords()[0] - a.coords()[0]) as f64)
    }

    /// Exact interpolated spatial position at integer level `t`.
    pub fn position_at_level(&self, t: i64) -> Result<RationalPosition> {
        if t < self.start().level() || t > self.last().level() {
            return Err(Error::OutOfRange(format!("level {t}")));
        }
        let i = self.vertices.partition_point(|v| v.level() <= t) - 1;
        let a = &self.vertices[i];
        if a.level() == t {
            return Ok(RationalPosition { num: Spatial::from_slice(a.spatial()), den: 1 });
        }
        let b = &self.vertices[i + 1];
        let dy = b.level() - a.level();
        let dt = t - a.level();
        let num = a
            .spatial()
            .iter()
            .zip(b.spatial())
            .map(|(x0, x1)| x0 * dy + (x1 - x0) * dt)
            .collect();
        Ok(RationalPosition { num, den: dy })
    }
}

pub fn path_at(record: &PathRecord, t: f64) -> Result<f64> {
    record.path_at(t)
}

/// Axis-aligned box of start vertices in Z^2.
#[derive(Clone, Copy, Debug)]
pub struct Rect {
    pub x0: i64,
    pub x1: i64,
    pub y0: i64,
    pub y1: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlanarityReport {
    pub edges: usize,
    pub crossings: usize,
    /// Edge pairs whose endpoints lie in each other's cones.
    pub shared_cone_pairs: usize,
    /// Such pairs whose endpoints differ.
    pub shared_cone_violations: usize,
}

type Seg = ((i64, i64), (i64, i64));

fn orient(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i64 {
    ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).signum()
}

fn on_segment(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> bool {
    c.0 >= a.0.min(b.0) && c.0 <= a.0.max(b.0) && c.1 >= a.1.min(b.1) && c.1 <= a.1.max(b.1)
}

/// True if the segments meet anywhere other than at a single shared endpoint.
pub fn segments_cross(s: Seg, t: Seg) -> bool {
    let (a, b) = s;
    let (c, e) = t;
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, e);
    let o3 = orient(c, e, a);
    let o4 = orient(c, e, b);
    let shared = [a, b].iter().filter(|p| **p == c || **p == e).count();
    if o1 == 0 && o2 == 0 {
        // collinear: overlap beyond one shared endpoint is a crossing
        let lo = |p: (i64, i64), q: (i64, i64)| p.min(q);
        let hi = |p: (i64, i64), q: (i64, i64)| p.max(q);
        let start = lo(a, b).max(lo(c, e));
        let end = hi(a, b).min(hi(c, e));
        return start < end || (start == end && shared == 0);
    }
    let meet = (o1 != o2 || o1 == 0 || o2 == 0)
        && (o3 != o4 || o3 == 0 || o4 == 0)
        && (o1 != 0 || on_segment(a, b, c))
        && (o2 != 0 || on_segment(a, b, e))
        && (o3 != 0 || on_segment(c, e, a))
        && (o4 != 0 || on_segment(c, e, b));
    let proper = o1 * o2 < 0 && o3 * o4 < 0;
    if proper {
        return true;
    }
    meet && shared == 0
}

impl<F: UniformField> Model<F> {
    /// Draws the successor edge of every open vertex in `rect` and counts
    /// crossings. Only defined for `d = 2`.
    pub fn check_planarity(&self, rect: Rect) -> Result<PlanarityReport> {
        if self.params.d != 2 {
            return Err(Error::invalid("d", "planarity check needs d = 2"));
        }
        let mut edges: Vec<Seg> = Vec::new();
        for y in rect.y0..=rect.y1 {
            for x in rect.x0..=rect.x1 {
                let u = LatticePoint::new(&[x, y]);
                if self.field.uniform(u.coords()) < self.params.p {
                    let n = self.successor_unchecked(&u)?.next;
                    edges.push(((x, y), (n.coords()[0], n.coords()[1])));
                }
            }
        }
        edges.sort_by_key(|e| (e.0 .1, e.0 .0));
        let mut report = PlanarityReport { edges: edges.len(), ..Default::default() };
        for i in 0..edges.len() {
            let (a, b) = edges[i];
            for &(c, e) in &edges[i + 1..] {
                if c.1 > b.1 {
                    break;
                }
                let (ax0, ax1) = (a.0.min(b.0), a.0.max(b.0));
                let (cx0, cx1) = (c.0.min(e.0), c.0.max(e.0));
                if ax1 < cx0 || cx1 < ax0 {
                    continue;
                }
                if segments_cross((a, b), (c, e)) {
                    report.crossings += 1;
                }
                let in_cone = |base: (i64, i64), w: (i64, i64)| {
                    let k = w.1 - base.1;
                    k >= 1 && (w.0 - base.0).abs() <= k
                };
                if in_cone(a, e) && in_cone(c, b) {
                    report.shared_cone_pairs += 1;
                    if b != e {
                        report.shared_cone_violations += 1;
                    }
                }
            }
        }
        Ok(report)
    }
}

pub fn check_planarity(params: &ModelParams, rect: Rect) -> Result<PlanarityReport> {
    Model::new(*params).check_planarity(rect)
}
