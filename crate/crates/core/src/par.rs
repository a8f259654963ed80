//! Execution helpers. With the `parallel` feature the indexed maps run on the
//! rayon pool; without it (or in [`ExecMode::Sequential`]) they run in order
//! on the calling thread. Results are always collected in index order, so
//! any reduction done afterwards is independent of scheduling.

/// Runtime choice between the rayon pool and a plain loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    #[default]
    Parallel,
    Sequential,
}

impl ExecMode {
    /// Whether this build can actually run in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Configures the global worker pool. Only the first call has any effect.
pub fn set_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let a = map_indexed(ExecMode::Parallel, 100, |i| (i * i) as f64);
        let b = map_indexed(ExecMode::Sequential, 100, |i| (i * i) as f64);
        assert_eq!(a, b);
    }
}
