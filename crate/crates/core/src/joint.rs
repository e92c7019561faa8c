//! Joint exploration of several walkers in one environment, with history
//! regions, renewals, and coalescence times.
//!
//! Every walker sitting at the minimal level advances; the history region
//! is the part of each higher walker's last search cone that lies above the
//! minimal level. A renewal happens when all walkers share a level, at
//! which point the history region is empty.

use std::collections::BTreeSet;

use crate::dynamics::PathRecord;
use crate::env::{LatticePoint, Model, ModelParams, Spatial, UniformField};
use crate::error::{Error, Result};
use crate::geometry::Trapezoid;

/// Default level cap for coalescence runs.
pub const DEFAULT_T_CAP: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointState {
    pub positions: Vec<LatticePoint>,
    /// Vertex each walker last jumped from.
    pub bases: Vec<LatticePoint>,
    pub r: i64,
    pub s: i64,
    pub step: u64,
}

impl JointState {
    pub fn new(starts: &[LatticePoint]) -> Result<Self> {
        let first = starts.first().ok_or_else(|| Error::invalid("starts", "need at least one walker"))?;
        let d = first.d();
        for w in starts {
            if w.d() != d {
                return Err(Error::DimensionMismatch { expected: d, got: w.d() });
            }
            if w.level() != first.level() {
                return Err(Error::invalid("starts", "all starts must share a level"));
            }
        }
        Ok(JointState {
            positions: starts.to_vec(),
            bases: starts.to_vec(),
            r: first.level(),
            s: first.level(),
            step: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.positions.len()
    }

    pub fn is_renewal(&self) -> bool {
        self.r == self.s
    }

    pub fn fully_coalesced(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] == w[1])
    }

    /// History region: for each walker above `r`, its last search cone
    /// restricted to levels `(r, level]`.
    pub fn history(&self) -> Vec<Trapezoid> {
        let mut out: Vec<Trapezoid> = Vec::new();
        for (pos, base) in self.positions.iter().zip(&self.bases) {
            if pos.level() > self.r {
                let t = Trapezoid::new(base.clone(), self.r - base.level(), pos.level() - base.level());
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    pub fn in_history(&self, w: &LatticePoint) -> bool {
        self.history().iter().any(|t| t.contains(w))
    }

    /// Spatial gaps between consecutive walkers.
    pub fn gaps(&self) -> Vec<Spatial> {
        self.positions.windows(2).map(|w| w[1].spatial_diff(&w[0])).collect()
    }

    fn refresh_levels(&mut self) {
        self.r = self.positions.iter().map(LatticePoint::level).min().expect("nonempty");
        self.s = self.positions.iter().map(LatticePoint::level).max().expect("nonempty");
    }
}

impl<F: UniformField> Model<F> {
    /// Advances every walker at the minimal level by one successor step.
    pub fn joint_step(&self, state: &JointState) -> Result<JointState> {
        let mut next = state.clone();
        self.joint_step_in_place(&mut next)?;
        Ok(next)
    }

    pub fn joint_step_in_place(&self, state: &mut JointState) -> Result<()> {
        let r = state.r;
        let mut cache: Vec<(LatticePoint, LatticePoint)> = Vec::new();
        for i in 0..state.positions.len() {
            if state.positions[i].level() != r {
                continue;
            }
            let from = state.positions[i].clone();
            let to = match cache.iter().find(|(a, _)| *a == from) {
                Some((_, b)) => b.clone(),
                None => {
                    let b = self.successor_unchecked(&from)?.next;
                    cache.push((from.clone(), b.clone()));
                    b
                }
            };
            state.bases[i] = from;
            state.positions[i] = to;
        }
        state.step += 1;
        state.refresh_levels();
        Ok(())
    }

    /// Lazily yields renewals of the joint process started at `starts`.
    pub fn regenerations(&self, starts: &[LatticePoint]) -> Result<Regenerations<'_, F>> {
        for w in starts {
            self.check_dim(w)?;
        }
        let state = JointState::new(starts)?;
        let start_level = state.r;
        Ok(Regenerations { model: self, state, start_level, l: 0, last_tau: 0, done: false })
    }

    pub fn run_regenerations(&self, starts: &[LatticePoint], max_renewals: usize) -> Result<Vec<RegenRecord>> {
        if max_renewals == 0 {
            return Err(Error::invalid("L", "must be at least 1"));
        }
        let mut out = Vec::new();
        for rec in self.regenerations(starts)? {
            let rec = rec?;
            let coalesced = rec.gaps.iter().all(|g| g.iter().all(|&c| c == 0));
            out.push(rec);
            if out.len() >= max_renewals || coalesced {
                break;
            }
        }
        Ok(out)
    }

    /// Coalescence of two walkers started at equal level; stops once the
    /// renewal level exceeds `start level + t_cap`.
    pub fn pair_coalescence_between(&self, a: &LatticePoint, b: &LatticePoint, t_cap: i64) -> Result<CoalescenceRecord> {
        if a == b {
            return Ok(CoalescenceRecord { n_steps: 0, t_at_coalescence: 0, hit_cap: false });
        }
        for rec in self.regenerations(&[a.clone(), b.clone()])? {
            let rec = rec?;
            if rec.gaps[0].iter().all(|&c| c == 0) {
                return Ok(CoalescenceRecord { n_steps: rec.l, t_at_coalescence: rec.t, hit_cap: false });
            }
            if rec.t > t_cap {
                return Ok(CoalescenceRecord { n_steps: rec.l, t_at_coalescence: rec.t, hit_cap: true });
            }
        }
        unreachable!("renewal stream ends only at coalescence")
    }

    /// Pair `v = (0,0)`, `u = (x,0)` in d = 2.
    pub fn pair_coalescence(&self, x: i64, t_cap: i64) -> Result<CoalescenceRecord> {
        if self.params.d != 2 {
            return Err(Error::invalid("d", "pair coalescence needs d = 2"));
        }
        if x < 1 {
            return Err(Error::invalid("x_offset", format!("must be at least 1, got {x}")));
        }
        self.pair_coalescence_between(&LatticePoint::new(&[0, 0]), &LatticePoint::new(&[x, 0]), t_cap)
    }

    /// Three walkers at `(x,0)`, `(y,0)`, `(z,0)` until two of them meet.
    pub fn triple_collision(&self, x: i64, y: i64, z: i64, t_cap: i64) -> Result<TripleCollision> {
        if self.params.d != 2 {
            return Err(Error::invalid("d", "triple collision needs d = 2"));
        }
        if !(x < y && y < z) {
            return Err(Error::invalid("x,y,z", "need x < y < z"));
        }
        let starts = [LatticePoint::new(&[x, 0]), LatticePoint::new(&[y, 0]), LatticePoint::new(&[z, 0])];
        let mut renewal_levels = Vec::new();
        let mut record = None;
        for rec in self.regenerations(&starts)? {
            let rec = rec?;
            renewal_levels.push(rec.t);
            let zero_gap = rec.gaps.iter().any(|g| g[0] == 0);
            if zero_gap || rec.t > t_cap {
                record = Some(CoalescenceRecord { n_steps: rec.l, t_at_coalescence: rec.t, hit_cap: !zero_gap });
                break;
            }
        }
        let record = record.expect("renewal stream ends only at coalescence");
        let top = record.t_at_coalescence;
        let paths: Vec<PathRecord> =
            starts.iter().map(|s| self.trace(s, top)).collect::<Result<_>>()?;
        let mut nu = None;
        'levels: for t in 1..=top {
            let pos: Vec<_> = paths.iter().map(|p| p.position_at_level(t)).collect::<Result<_>>()?;
            if pos[0] == pos[1] || pos[1] == pos[2] {
                nu = Some(t);
                break 'levels;
            }
        }
        Ok(TripleCollision { record, nu, renewal_levels })
    }
}

impl<F: UniformField> Model<F> {
    /// Follows the paths from `starts` and returns, for each distinct path
    /// at level `h`, the last vertex at or below `h`. Paths that meet are
    /// followed once.
    pub fn distinct_at_level(&self, starts: &[LatticePoint], h: f64) -> Result<Vec<LatticePoint>> {
        let mut active: BTreeSet<(i64, LatticePoint)> = BTreeSet::new();
        for w in starts {
            self.check_dim(w)?;
            if (w.level() as f64) <= h {
                active.insert((w.level(), w.clone()));
            }
        }
        let mut done: BTreeSet<LatticePoint> = BTreeSet::new();
        while let Some((_, w)) = active.pop_first() {
            let next = self.successor_unchecked(&w)?.next;
            if next.level() as f64 > h {
                done.insert(w);
            } else {
                active.insert((next.level(), next));
            }
        }
        Ok(done.into_iter().collect())
    }
}

pub fn joint_step(params: &ModelParams, state: &JointState) -> Result<JointState> {
    Model::new(*params).joint_step(state)
}

pub fn run_regenerations(params: &ModelParams, starts: &[LatticePoint], max_renewals: usize) -> Result<Vec<RegenRecord>> {
    Model::new(*params).run_regenerations(starts, max_renewals)
}

pub fn pair_coalescence(params: &ModelParams, x: i64, t_cap: i64) -> Result<CoalescenceRecord> {
    Model::new(*params).pair_coalescence(x, t_cap)
}

pub fn triple_collision(params: &ModelParams, x: i64, y: i64, z: i64, t_cap: i64) -> Result<TripleCollision> {
    Model::new(*params).triple_collision(x, y, z, t_cap)
}

/// One renewal of the joint process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegenRecord {
    pub l: u64,
    pub tau: u64,
    pub sigma: u64,
    /// Renewal level relative to the start level.
    pub t: i64,
    /// Spatial gaps `walker[i+1] - walker[i]`.
    pub gaps: Vec<Spatial>,
}

impl RegenRecord {
    /// Gap of a two-walker run.
    pub fn z(&self) -> &Spatial {
        &self.gaps[0]
    }
}

pub struct Regenerations<'a, F> {
    model: &'a Model<F>,
    state: JointState,
    start_level: i64,
    l: u64,
    last_tau: u64,
    done: bool,
}

impl<F> Regenerations<'_, F> {
    pub fn state(&self) -> &JointState {
        &self.state
    }
}

impl<F: UniformField> Iterator for Regenerations<'_, F> {
    type Item = Result<RegenRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            if let Err(e) = self.model.joint_step_in_place(&mut self.state) {
                self.done = true;
                return Some(Err(e));
            }
            if self.state.is_renewal() {
                break;
            }
        }
        self.l += 1;
        let tau = self.state.step;
        let rec = RegenRecord {
            l: self.l,
            tau,
            sigma: tau - self.last_tau,
            t: self.state.r - self.start_level,
            gaps: self.state.gaps(),
        };
        self.last_tau = tau;
        if self.state.k() > 1 && self.state.fully_coalesced() {
            self.done = true;
        }
        Some(Ok(rec))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoalescenceRecord {
    pub n_steps: u64,
    pub t_at_coalescence: i64,
    pub hit_cap: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleCollision {
    pub record: CoalescenceRecord,
    /// First integer level `>= 1` at which two of the interpolated paths meet.
    pub nu: Option<i64>,
    /// Renewal levels `T_1, T_2, ...` of the three-walker process.
    pub renewal_levels: Vec<i64>,
}

/// Two paths traced in independent environments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependentPairRecord {
    pub path_u: PathRecord,
    pub path_v: PathRecord,
    /// Common levels of both paths, relative to the start level.
    pub renewal_levels: Vec<i64>,
    pub psi_u: Vec<Spatial>,
    pub psi_v: Vec<Spatial>,
    pub n_u: Vec<usize>,
    pub n_v: Vec<usize>,
}

/// Traces `u` in `field_u` and `v` in `field_v` until `max_renewals`
/// simultaneous renewals have been seen.
pub fn independent_pair_in<F: UniformField, G: UniformField>(
    model_u: &Model<F>,
    model_v: &Model<G>,
    u: &LatticePoint,
    v: &LatticePoint,
    max_renewals: usize,
) -> Result<IndependentPairRecord> {
    model_u.check_dim(u)?;
    model_v.check_dim(v)?;
    if u.level() != v.level() {
        return Err(Error::invalid("u,v", "starts must share a level"));
    }
    let mut pu = vec![u.clone()];
    let mut pv = vec![v.clone()];
    let mut rec = IndependentPairRecord {
        path_u: PathRecord { vertices: Vec::new() },
        path_v: PathRecord { vertices: Vec::new() },
        renewal_levels: Vec::new(),
        psi_u: Vec::new(),
        psi_v: Vec::new(),
        n_u: Vec::new(),
        n_v: Vec::new(),
    };
    let (mut last_u, mut last_v) = (0usize, 0usize);
    while rec.renewal_levels.len() < max_renewals {
        let lu = pu.last().expect("nonempty").level();
        let lv = pv.last().expect("nonempty").level();
        if lu <= lv {
            let n = model_u.successor_unchecked(pu.last().expect("nonempty"))?.next;
            pu.push(n);
        }
        if lv <= lu {
            let n = model_v.successor_unchecked(pv.last().expect("nonempty"))?.next;
            pv.push(n);
        }
        let a = pu.last().expect("nonempty");
        let b = pv.last().expect("nonempty");
        if a.level() == b.level() {
            let (iu, iv) = (pu.len() - 1, pv.len() - 1);
            rec.renewal_levels.push(a.level() - u.level());
            rec.psi_u.push(a.spatial_diff(&pu[last_u]));
            rec.psi_v.push(b.spatial_diff(&pv[last_v]));
            rec.n_u.push(iu);
            rec.n_v.push(iv);
            last_u = iu;
            last_v = iv;
        }
    }
    rec.path_u = PathRecord { vertices: pu };
    rec.path_v = PathRecord { vertices: pv };
    Ok(rec)
}

/// Independent pair with environments keyed by `params.seed` and a seed
/// derived from it.
pub fn independent_pair(params: &ModelParams, u: &LatticePoint, v: &LatticePoint, max_renewals: usize) -> Result<IndependentPairRecord> {
    let mu = Model::new(*params);
    let mv = Model::new(params.reseeded(independent_seed(params.seed)));
    independent_pair_in(&mu, &mv, u, v, max_renewals)
}

/// Seed of the second environment of an independent pair.
pub fn independent_seed(seed: u64) -> u64 {
    crate::env::derive_seed(seed, u64::MAX)
}
