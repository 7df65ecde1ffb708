use malthus_core::estimator::Executor;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::CliResult;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "MALTHUS_THREADS";

/// Runs Monte Carlo replicates on a dedicated rayon pool.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `threads = None` falls back to `MALTHUS_THREADS`, then to rayon's default.
    pub fn new(threads: Option<usize>) -> CliResult<Self> {
        let threads = threads.or_else(|| std::env::var(THREADS_ENV).ok()?.trim().parse().ok());
        let mut builder = ThreadPoolBuilder::new();
        if let Some(n) = threads.filter(|&n| n > 0) {
            builder = builder.num_threads(n);
        }
        Ok(Self { pool: builder.build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
