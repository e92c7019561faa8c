//! Site environment: one uniform label per lattice vertex, derived from a
//! keyed hash of the seed and the vertex coordinates.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Default cap on the number of levels a successor search may scan.
pub const DEFAULT_MAX_SEARCH_HEIGHT: u32 = 64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const REPLICATE_SALT: u64 = 0x8CB9_2BA7_2F3D_8DD7;

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index` of a run keyed by `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ mix64(index.wrapping_mul(GOLDEN) ^ REPLICATE_SALT)
}

/// Spatial part of a lattice point (all coordinates but the level).
pub type Spatial = SmallVec<[i64; 4]>;

/// A point of Z^d; the last coordinate is the level.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(SmallVec<[i64; 4]>);

impl LatticePoint {
    pub fn new(coords: &[i64]) -> Self {
        LatticePoint(SmallVec::from_slice(coords))
    }

    /// Point with spatial part `spatial` at level `level`.
    pub fn at_level(spatial: &[i64], level: i64) -> Self {
        let mut v: SmallVec<[i64; 4]> = SmallVec::from_slice(spatial);
        v.push(level);
        LatticePoint(v)
    }

    /// Origin of Z^d.
    pub fn origin(d: usize) -> Self {
        LatticePoint(SmallVec::from_elem(0, d))
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }

    pub fn level(&self) -> i64 {
        self.0[self.0.len() - 1]
    }

    pub fn spatial(&self) -> &[i64] {
        &self.0[..self.0.len() - 1]
    }

    /// Spatial displacement `self - other`.
    pub fn spatial_diff(&self, other: &LatticePoint) -> Spatial {
        self.spatial()
            .iter()
            .zip(other.spatial())
            .map(|(a, b)| a - b)
            .collect()
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Validated model parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub d: usize,
    pub p: f64,
    pub seed: u64,
    pub max_search_height: u32,
}

impl ModelParams {
    pub fn new(d: usize, p: f64, seed: u64) -> Result<Self> {
        Self::with_search_height(d, p, seed, DEFAULT_MAX_SEARCH_HEIGHT)
    }

    pub fn with_search_height(d: usize, p: f64, seed: u64, max_search_height: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid("d", format!("must be at least 2, got {d}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("p", format!("must lie in (0,1), got {p}")));
        }
        if max_search_height == 0 {
            return Err(Error::invalid("max_search_height", "must be positive"));
        }
        Ok(ModelParams { d, p, seed, max_search_height })
    }

    /// Same parameters under another seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        ModelParams { seed, ..*self }
    }

    /// Parameters for replicate `index`.
    pub fn replicate(&self, index: u64) -> Self {
        self.reseeded(derive_seed(self.seed, index))
    }
}

/// Source of the uniform labels `U_w`.
pub trait UniformField: Sync {
    fn uniform(&self, coords: &[i64]) -> f64;
}

/// Hash-backed field: `U_w` is a pure function of `(seed, w)`.
#[derive(Clone, Copy, Debug)]
pub struct HashField {
    key: u64,
}

impl HashField {
    pub fn new(seed: u64) -> Self {
        HashField { key: mix64(seed ^ SEED_SALT) }
    }

    #[inline]
    pub fn bits(&self, coords: &[i64]) -> u64 {
        let mut h = self.key;
        for (i, &c) in coords.iter().enumerate() {
            let lane = (c as u64).wrapping_add(GOLDEN.wrapping_mul(i as u64 + 1));
            h = mix64(h ^ mix64(lane));
        }
        mix64(h ^ coords.len() as u64)
    }
}

/// 53-bit mantissa of `bits` as a value in (0,1).
#[inline]
pub fn bits_to_unit(bits: u64) -> f64 {
    let m = bits >> 11;
    if m == 0 {
        f64::MIN_POSITIVE
    } else {
        m as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl UniformField for HashField {
    #[inline]
    fn uniform(&self, coords: &[i64]) -> f64 {
        bits_to_unit(self.bits(coords))
    }
}

/// Explicit labels for hand-built configurations; unlisted sites get `default`.
#[derive(Clone, Debug, Default)]
pub struct FixedField {
    values: HashMap<Vec<i64>, f64>,
    default: f64,
}

impl FixedField {
    /// `default` should be at least `p` for unlisted sites to be closed.
    pub fn new(default: f64) -> Self {
        FixedField { values: HashMap::new(), default }
    }

    pub fn set(&mut self, coords: &[i64], u: f64) -> &mut Self {
        self.values.insert(coords.to_vec(), u);
        self
    }
}

impl UniformField for FixedField {
    fn uniform(&self, coords: &[i64]) -> f64 {
        self.values.get(coords).copied().unwrap_or(self.default)
    }
}

/// Wraps a field and records every coordinate it is asked about.
pub struct RecordingField<F> {
    inner: F,
    seen: Mutex<Vec<Vec<i64>>>,
}

impl<F: UniformField> RecordingField<F> {
    pub fn new(inner: F) -> Self {
        RecordingField { inner, seen: Mutex::new(Vec::new()) }
    }

    /// Drains the queries recorded so far.
    pub fn take(&self) -> Vec<Vec<i64>> {
        std::mem::take(&mut *self.seen.lock().expect("recording lock"))
    }
}

impl<F: UniformField> UniformField for RecordingField<F> {
    fn uniform(&self, coords: &[i64]) -> f64 {
        self.seen.lock().expect("recording lock").push(coords.to_vec());
        self.inner.uniform(coords)
    }
}

/// Parameters plus the field that realises them.
#[derive(Clone, Debug)]
pub struct Model<F = HashField> {
    pub params: ModelParams,
    pub field: F,
}

impl Model<HashField> {
    pub fn new(params: ModelParams) -> Self {
        Model { params, field: HashField::new(params.seed) }
    }
}

impl<F: UniformField> Model<F> {
    pub fn with_field(params: ModelParams, field: F) -> Self {
        Model { params, field }
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub(crate) fn check_dim(&self, w: &LatticePoint) -> Result<()> {
        if w.d() != self.params.d {
            return Err(Error::DimensionMismatch { expected: self.params.d, got: w.d() });
        }
        Ok(())
    }

    pub fn uniform_at(&self, w: &LatticePoint) -> Result<f64> {
        self.check_dim(w)?;
        Ok(self.field.uniform(w.coords()))
    }

    pub fn is_open(&self, w: &LatticePoint) -> Result<bool> {
        Ok(self.uniform_at(w)? < self.params.p)
    }

    /// Strict priority: smaller label first, ties broken lexicographically.
    pub fn priority_less(&self, a: &LatticePoint, b: &LatticePoint) -> Result<bool> {
        let ua = self.uniform_at(a)?;
        let ub = self.uniform_at(b)?;
        Ok(priority_cmp(ua, a.coords(), ub, b.coords()) == Ordering::Less)
    }
}

/// Total order on (label, coordinates).
#[inline]
pub fn priority_cmp(ua: f64, a: &[i64], ub: f64, b: &[i64]) -> Ordering {
    ua.partial_cmp(&ub).unwrap_or(Ordering::Equal).then_with(|| a.cmp(b))
}

pub fn uniform_at(params: &ModelParams, w: &LatticePoint) -> Result<f64> {
    Model::new(*params).uniform_at(w)
}

pub fn is_open(params: &ModelParams, w: &LatticePoint) -> Result<bool> {
    Model::new(*params).is_open(w)
}

pub fn priority_less(params: &ModelParams, a: &LatticePoint, b: &LatticePoint) -> Result<bool> {
    Model::new(*params).priority_less(a, b)
}
