//! Thread-pool executor for mutant evaluation.

use mutest_core::exec::Executor;
use rayon::prelude::*;

/// The interpreter recurses per call frame; give workers room for the
/// deepest allowed call chains.
const WORKER_STACK: usize = 64 * 1024 * 1024;

pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn new(jobs: usize) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .stack_size(WORKER_STACK)
            .thread_name(|i| format!("mutest-worker-{i}"))
            .build()?;
        Ok(Pool { pool })
    }

    /// Runs `f` inside the pool, so its recursion gets the large stack too.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}

impl Executor for Pool {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        // collect() on an indexed parallel iterator keeps input order
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}

/// Default parallelism: the number of available processors.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
