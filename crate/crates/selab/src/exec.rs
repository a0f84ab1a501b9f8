use rayon::prelude::*;
use selab_core::quadrature::Executor;

/// Maps over the current rayon pool. Results come back in index order, so
/// the core's pairwise reductions see the same sequence at any thread count.
#[derive(Clone, Copy, Debug, Default)]
pub struct RayonExecutor;

impl Executor for RayonExecutor {
    fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n).into_par_iter().map(f).collect()
    }
}
