//! Independent oracles shared by the integration and acceptance targets.
//! Nothing here calls the crate's geometry or search code.

#![allow(dead_code)]

use drainage::env::{Model, UniformField};
use drainage::LatticePoint;

/// All integer vectors in `[-r, r]^m`, in lexicographic order.
fn box_points(m: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for p in &out {
            for c in -r..=r {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Literal successor rule: the first `l` whose cone `V(u, l)` holds an open
/// vertex, then the open vertex of `V(u, l)` at level `u + l` with the
/// smallest label (ties broken by coordinates). Cones are built by filtering
/// a box, so no ball enumeration is shared with the library.
pub fn brute_successor<F: UniformField>(model: &Model<F>, u: &LatticePoint, max_l: i64) -> Option<(LatticePoint, u32)> {
    let d = u.d();
    let base = u.spatial().to_vec();
    let lvl = u.level();
    for l in 1..=max_l {
        let mut open_in_cone: Vec<(f64, Vec<i64>)> = Vec::new();
        for off in box_points(d - 1, l) {
            for k in 1..=l {
                if off.iter().map(|c| c.abs()).sum::<i64>() > k {
                    continue;
                }
                let mut w: Vec<i64> = base.iter().zip(&off).map(|(b, o)| b + o).collect();
                w.push(lvl + k);
                let uw = model.field.uniform(&w);
                if uw < model.params.p {
                    open_in_cone.push((uw, w));
                }
            }
        }
        if open_in_cone.is_empty() {
            continue;
        }
        let top = open_in_cone.iter().map(|(_, w)| w[d - 1]).min().unwrap();
        let best = open_in_cone
            .into_iter()
            .filter(|(_, w)| w[d - 1] == top)
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)))
            .unwrap();
        return Some((LatticePoint::new(&best.1), (top - lvl) as u32));
    }
    None
}

/// Law of `X_1` given `Y_1 = k` in d = 2 by enumerating every open/closed
/// pattern of the `2k + 1` sites at height `k`. Given the pattern, the
/// labels of the open sites are exchangeable, so the minimum sits at each
/// open site with equal chance.
pub fn conditional_by_enumeration(p: f64, k: u32) -> Vec<f64> {
    let n = 2 * k as usize + 1;
    let mut mass = vec![0.0f64; n];
    let mut total = 0.0;
    for pattern in 1u64..(1u64 << n) {
        let open = pattern.count_ones() as i32;
        let w = p.powi(open) * (1.0 - p).powi(n as i32 - open);
        total += w;
        for (j, m) in mass.iter_mut().enumerate() {
            if pattern >> j & 1 == 1 {
                *m += w / open as f64;
            }
        }
    }
    mass.iter().map(|m| m / total).collect()
}

/// `sum_{k>=1} k * w_k` for `w_k = (1-p)^(k^2-1) - (1-p)^((k+1)^2-1)`.
pub fn gamma_series(p: f64) -> f64 {
    (1..200).map(|k: i32| k as f64 * slab_first_open(p, k)).sum()
}

/// `sum_k k(k+1)/3 * w_k`.
pub fn sigma2_series(p: f64) -> f64 {
    (1..200).map(|k: i32| (k * (k + 1)) as f64 / 3.0 * slab_first_open(p, k)).sum()
}

fn slab_first_open(p: f64, k: i32) -> f64 {
    let q = 1.0 - p;
    q.powi(k * k - 1) - q.powi((k + 1) * (k + 1) - 1)
}
