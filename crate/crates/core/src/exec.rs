//! Sequential / data-parallel execution of the exhaustive inner loops.
//!
//! Every helper returns the same result under both strategies; the parallel
//! variants only change scheduling. `find_first` always reports the lowest
//! matching index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Uses rayon when built with the `parallel` feature; sequential otherwise.
    #[default]
    Parallel,
}

impl Exec {
    /// Whether work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    pub fn all<F>(self, n: usize, f: F) -> bool
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().all(f);
        }
        (0..n).all(f)
    }

    /// Lowest index `i < n` with `f(i)`.
    pub fn find_first<F>(self, n: usize, f: F) -> Option<usize>
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().position_first(f);
        }
        (0..n).position(f)
    }

    /// Lowest index `i < n` whose `f(i)` is `Some`, with its value.
    pub fn find_map_first<T, F>(self, n: usize, f: F) -> Option<(usize, T)>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n)
                .into_par_iter()
                .find_map_first(|i| f(i).map(|v| (i, v)));
        }
        (0..n).find_map(|i| f(i).map(|v| (i, v)))
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}
