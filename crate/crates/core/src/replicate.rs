//! Order-preserving replicate fan-out. Results come back indexed by
//! replicate, so any reduction done afterwards is independent of the
//! thread count.

use rayon::prelude::*;

use crate::error::Result;

pub fn map<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

pub fn try_map<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn order_is_kept() {
        let v = super::map(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i as u64));
    }
}
