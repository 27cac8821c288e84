//! Data-parallel execution helpers.
//!
//! Batch work (ensemble solves, matrix assembly, benchmark campaigns) funnels
//! through [`map_indexed`]. With the `parallel` feature (default) a `true`
//! flag runs on the rayon pool; `false` -- or building with
//! `--no-default-features` -- runs the same closure sequentially. Outputs are
//! returned in input order either way, so downstream aggregation is
//! deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, optionally in parallel. Results keep input order.
pub fn map_indexed<T, R, F>(parallel: bool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let _ = parallel;
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Map over a range of indices, optionally in parallel.
pub fn map_range<R, F>(parallel: bool, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..len).map(f).collect()
}

/// Whether the crate was built with rayon support.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let items: Vec<u64> = (0..257).collect();
        let seq = map_indexed(false, &items, |i, x| x * 3 + i as u64);
        let par = map_indexed(true, &items, |i, x| x * 3 + i as u64);
        assert_eq!(seq, par);
        assert_eq!(
            map_range(true, 10, |i| i * i),
            map_range(false, 10, |i| i * i)
        );
    }
}
