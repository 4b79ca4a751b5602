//! Sequential or data-parallel execution of independent work items.
//!
//! Results are always produced in index order, so a computation gives the same
//! bits whichever mode it runs in.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool, or a dedicated pool of the given size.
    #[default]
    Parallel,
}

impl Execution {
    /// `f(0), ..., f(count - 1)` in order.
    pub fn map<T, F>(self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..count).map(f).collect(),
            Execution::Parallel => parallel_map(count, f),
        }
    }

    /// Fallible [`Execution::map`]; the first error by index wins.
    pub fn try_map<T, F>(self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        self.map(count, f).into_iter().collect()
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, f: F) -> Vec<T> {
    (0..count).map(f).collect()
}

/// Runs `f` with a pool of `threads` workers (`None` keeps the global pool).
///
/// `Some(1)` and builds without the `parallel` feature run `f` on the calling thread.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        Some(0) => Err(Error::Config("thread count must be at least 1".into())),
        None => Ok(f()),
        Some(n) => install(n, f),
    }
}

#[cfg(feature = "parallel")]
fn install<R: Send>(n: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn install<R: Send>(_n: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    Ok(f())
}
