//! Sequential or data-parallel execution of independent trials.

/// How independent trials are scheduled. Results never depend on the choice:
/// every trial derives its own generator from the master seed and its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    /// Runs `f(0), …, f(trials - 1)` and returns the results in trial order.
    pub fn map_trials<T, F>(self, trials: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..trials).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..trials).into_par_iter().map(f).collect()
            }
        }
    }
}
