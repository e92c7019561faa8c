//! Cones, slabs and trapezoids above a lattice point.
//!
//! `H(u,k)` is the l1 ball of radius `k` in the level `u.level + k`;
//! `V(u,h)` is the union of `H(u,k)` for `k = 1..=h`. Enumeration is
//! lexicographic within a level, levels ascending.

use crate::env::LatticePoint;

/// `u` moved up by `k` levels.
pub fn apex(u: &LatticePoint, k: i64) -> LatticePoint {
    let mut w = u.clone();
    let d = w.d();
    w.coords_mut()[d - 1] += k;
    w
}

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of points of Z^m with l1 norm at most `r`.
pub fn ball_size(m: usize, r: i64) -> u64 {
    if r < 0 {
        return 0;
    }
    let r = r as u64;
    let mut total: u128 = 0;
    for i in 0..=(m as u64).min(r) {
        total += (1u128 << i) * binom(m as u64, i) * binom(r, i);
    }
    total as u64
}

/// `|H(u,k)|` in dimension `d`.
pub fn slab_size(d: usize, k: i64) -> u64 {
    ball_size(d - 1, k)
}

/// `|V(u,h)|` in dimension `d`.
pub fn cone_size(d: usize, h: i64) -> u64 {
    (1..=h).map(|k| slab_size(d, k)).sum()
}

fn l1_dist(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Calls `f` on every point of the l1 ball of radius `radius` around
/// `center`, written into the leading coordinates of `point`, in
/// lexicographic order. Trailing coordinates of `point` are left alone.
#[inline]
pub fn for_each_in_ball<F: FnMut(&[i64])>(point: &mut [i64], center: &[i64], radius: i64, f: &mut F) {
    ball_rec(point, center, 0, radius, f);
}

fn ball_rec<F: FnMut(&[i64])>(point: &mut [i64], center: &[i64], i: usize, radius: i64, f: &mut F) {
    if i == center.len() {
        f(point);
        return;
    }
    if i + 1 == center.len() {
        for a in -radius..=radius {
            point[i] = center[i] + a;
            f(point);
        }
        return;
    }
    for a in -radius..=radius {
        point[i] = center[i] + a;
        ball_rec(point, center, i + 1, radius - a.abs(), f);
    }
}

/// `H(base,k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSlab {
    pub base: LatticePoint,
    pub k: i64,
}

impl LevelSlab {
    pub fn new(base: LatticePoint, k: i64) -> Self {
        LevelSlab { base, k }
    }

    pub fn level(&self) -> i64 {
        self.base.level() + self.k
    }

    pub fn len(&self) -> u64 {
        if self.k < 0 {
            0
        } else {
            slab_size(self.base.d(), self.k)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, w: &LatticePoint) -> bool {
        w.d() == self.base.d()
            && w.level() == self.level()
            && l1_dist(w.spatial(), self.base.spatial()) <= self.k
    }

    pub fn points(&self) -> Vec<LatticePoint> {
        let mut out = Vec::with_capacity(self.len() as usize);
        if self.k < 0 {
            return out;
        }
        let mut scratch = apex(&self.base, self.k);
        let center: Vec<i64> = self.base.spatial().to_vec();
        for_each_in_ball(scratch.coords_mut(), &center, self.k, &mut |p| {
            out.push(LatticePoint::new(p))
        });
        out
    }
}

/// `V(base,h)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub base: LatticePoint,
    pub h: i64,
}

impl Cone {
    pub fn new(base: LatticePoint, h: i64) -> Self {
        Cone { base, h }
    }

    pub fn len(&self) -> u64 {
        cone_size(self.base.d(), self.h)
    }

    pub fn is_empty(&self) -> bool {
        self.h < 1
    }

    pub fn contains(&self, w: &LatticePoint) -> bool {
        Trapezoid::new(self.base.clone(), 0, self.h).contains(w)
    }

    pub fn points(&self) -> Vec<LatticePoint> {
        Trapezoid::new(self.base.clone(), 0, self.h).points()
    }
}

/// `V(base,s) \ V(base,r)`: the slabs `H(base,k)` with `r < k <= s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trapezoid {
    pub base: LatticePoint,
    pub r: i64,
    pub s: i64,
}

impl Trapezoid {
    pub fn new(base: LatticePoint, r: i64, s: i64) -> Self {
        Trapezoid { base, r: r.max(0), s }
    }

    pub fn is_empty(&self) -> bool {
        self.s <= self.r
    }

    pub fn len(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            cone_size(self.base.d(), self.s) - cone_size(self.base.d(), self.r)
        }
    }

    pub fn contains(&self, w: &LatticePoint) -> bool {
        if w.d() != self.base.d() {
            return false;
        }
        let k = w.level() - self.base.level();
        k > self.r && k <= self.s && l1_dist(w.spatial(), self.base.spatial()) <= k
    }

    pub fn points(&self) -> Vec<LatticePoint> {
        ((self.r + 1)..=self.s)
            .flat_map(|k| LevelSlab::new(self.base.clone(), k).points())
            .collect()
    }
}

pub fn trapezoid_contains(t: &Trapezoid, w: &LatticePoint) -> bool {
    t.contains(w)
}
