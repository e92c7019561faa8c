mod common;

use drainage::analytic::{gamma_exact, sigma2_exact, x_given_y, y_tail};
use drainage::env::{FixedField, Model};
use drainage::geometry::{cone_size, slab_size, Trapezoid};
use drainage::{LatticePoint, ModelParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{brute_successor, conditional_by_enumeration, gamma_series, sigma2_series};

#[test]
fn successor_matches_literal_rule_on_random_inputs() {
    let mut rng = StdRng::seed_from_u64(71);
    for _ in 0..2000 {
        let d = rng.gen_range(2..=4);
        let p = rng.gen_range(0.05..0.95);
        let params = ModelParams::new(d, p, rng.gen()).unwrap();
        let coords: Vec<i64> = (0..d).map(|_| rng.gen_range(-1_000_000..1_000_000)).collect();
        let u = LatticePoint::new(&coords);
        let m = Model::new(params);
        let fast = m.successor(&u).unwrap();
        let (w, l) = brute_successor(&m, &u, 64).unwrap();
        assert_eq!((fast.next, fast.level_jump), (w, l), "d={d} p={p} u={u}");
    }
}

#[test]
fn successor_matches_literal_rule_on_tie_fixtures() {
    // every site of the first slab carries the same label
    let params = ModelParams::new(3, 0.5, 0).unwrap();
    let mut field = FixedField::new(0.9);
    for (a, b) in [(1, 0), (0, -1), (0, 0), (-1, 0), (0, 1)] {
        field.set(&[a, b, 1], 0.25);
    }
    let m = Model::with_field(params, field);
    let u = LatticePoint::origin(3);
    let fast = m.successor(&u).unwrap();
    assert_eq!(Some((fast.next.clone(), fast.level_jump)), brute_successor(&m, &u, 5));
    assert_eq!(fast.next, LatticePoint::new(&[-1, 0, 1]));
}

#[test]
fn conditional_law_equals_pattern_enumeration() {
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for k in 1..=6 {
            let a = x_given_y(p, k).unwrap();
            let b = conditional_by_enumeration(p, k);
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12, "p={p} k={k}");
            }
        }
    }
    assert!(x_given_y(0.5, 1).unwrap().iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
    assert!(x_given_y(0.5, 2).unwrap().iter().all(|&v| (v - 0.2).abs() < 1e-15));
}

#[test]
fn series_constants_are_frozen() {
    // exact rational partial sums, evaluated once outside the crate
    let frozen = [
        (0.25, 1.5363981660437473, 1.468547314570073),
        (0.5, 1.1289368272118772, 0.8412274123402478),
        (0.75, 1.0156402597203886, 0.6875305200616637),
    ];
    for (p, g, s2) in frozen {
        assert!((gamma_exact(p).unwrap() - g).abs() < 1e-12, "gamma at {p}");
        assert!((sigma2_exact(p).unwrap() - s2).abs() < 1e-12, "sigma2 at {p}");
        assert!((gamma_series(p) - g).abs() < 1e-12);
        assert!((sigma2_series(p) - s2).abs() < 1e-12);
    }
}

#[test]
fn tail_is_one_minus_cumulative_first_open_slab() {
    for p in [0.2, 0.5, 0.8] {
        for m in 0..6u32 {
            // all sites of V(u, m) closed
            let closed = cone_size(2, m as i64) as i32;
            assert!((y_tail(p, m) - (1.0 - p).powi(closed)).abs() < 1e-15);
        }
    }
}

#[test]
fn trapezoid_matches_cone_difference_by_filtering() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..100 {
        let d = rng.gen_range(2..=3);
        let base: Vec<i64> = (0..d).map(|_| rng.gen_range(-20..20)).collect();
        let r = rng.gen_range(0..=6);
        let s = rng.gen_range(r..=6);
        let t = Trapezoid::new(LatticePoint::new(&base), r, s);
        let mut count = 0u64;
        let lo: Vec<i64> = base.iter().map(|c| c - 8).collect();
        // filter a box around the base
        let mut w = lo.clone();
        loop {
            let k = w[d - 1] - base[d - 1];
            let dist: i64 = (0..d - 1).map(|i| (w[i] - base[i]).abs()).sum();
            let inside = k > r && k <= s && dist <= k;
            assert_eq!(t.contains(&LatticePoint::new(&w)), inside, "{w:?} in {t:?}");
            count += inside as u64;
            let mut i = 0;
            while i < d {
                w[i] += 1;
                if w[i] <= base[i] + 8 {
                    break;
                }
                w[i] = lo[i];
                i += 1;
            }
            if i == d {
                break;
            }
        }
        assert_eq!(count, t.len());
        let slabs: u64 = (r + 1..=s).map(|k| slab_size(d, k)).sum();
        assert_eq!(slabs, t.len());
    }
}
