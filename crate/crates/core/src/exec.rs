//! Execution policy for the data-parallel loops.
//!
//! With the `parallel` feature (default) [`Parallelism::Parallel`] dispatches
//! to rayon; without it every loop runs sequentially. Results never depend on
//! the policy: maps preserve index order and reductions are performed in a
//! fixed order on the calling thread.

/// Below this many items a parallel request still runs sequentially.
pub const MIN_PARALLEL_LEN: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// True when this policy will actually fan out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// `(0..len).map(f).collect()`, ordered by index.
pub fn map_range<T, F>(par: Parallelism, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() && len >= MIN_PARALLEL_LEN {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = par;
    (0..len).map(f).collect()
}

/// Like [`map_range`] but without the size threshold; for coarse tasks
/// (optimizer restarts, sweep rows) where each item is expensive.
pub fn map_tasks<I, T, F>(par: Parallelism, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = par;
    items.iter().map(f).collect()
}

/// Applies `f(index, &mut item)` to every element.
pub fn for_each_indexed<T, F>(par: Parallelism, items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() && items.len() >= MIN_PARALLEL_LEN {
        use rayon::prelude::*;
        items.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
        return;
    }
    let _ = par;
    items.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
}

/// Applies `f` to consecutive chunks of `chunk` elements; chunk `k` starts
/// at element `k * chunk`.
pub fn for_each_chunk<T, F>(par: Parallelism, items: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if par.is_parallel() && items.len() >= MIN_PARALLEL_LEN && items.len() > chunk {
        use rayon::prelude::*;
        items
            .par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(k, c)| f(k, c));
        return;
    }
    let _ = par;
    items
        .chunks_mut(chunk)
        .enumerate()
        .for_each(|(k, c)| f(k, c));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let len = MIN_PARALLEL_LEN * 3 + 7;
        let a = map_range(Parallelism::Sequential, len, |i| (i as f64).sqrt());
        let b = map_range(Parallelism::Parallel, len, |i| (i as f64).sqrt());
        assert_eq!(a, b);

        let mut x = vec![0usize; len];
        let mut y = vec![0usize; len];
        for_each_chunk(Parallelism::Sequential, &mut x, 64, |k, c| {
            c.iter_mut().enumerate().for_each(|(j, v)| *v = k * 64 + j)
        });
        for_each_chunk(Parallelism::Parallel, &mut y, 64, |k, c| {
            c.iter_mut().enumerate().for_each(|(j, v)| *v = k * 64 + j)
        });
        assert_eq!(x, y);
        assert!(x.iter().enumerate().all(|(i, &v)| i == v));
    }

    #[test]
    fn tasks_keep_order() {
        let items: Vec<u64> = (0..50).collect();
        let out = map_tasks(Parallelism::Parallel, &items, |&x| x * x);
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
    }
}
