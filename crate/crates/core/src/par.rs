//! Serial or thread-pool execution of independent indexed tasks.
//!
//! Results always come back in index order, so any reduction over them is
//! independent of the thread count.

/// How independent tasks are executed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Serial,
    /// Dedicated pool with `threads` workers; 0 uses every available core.
    Parallel { threads: usize },
}

impl Execution {
    /// `1` maps to [`Execution::Serial`], anything else to a pool.
    pub fn from_threads(threads: usize) -> Self {
        if threads == 1 {
            Execution::Serial
        } else {
            Execution::Parallel { threads }
        }
    }
}

/// Evaluates `f(0), .., f(len - 1)` and returns the results in index order.
pub fn map_indexed<T, F>(len: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Serial => (0..len).map(f).collect(),
        Execution::Parallel { threads } => parallel(len, threads, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel<T, F>(len: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| (0..len).into_par_iter().map(&f).collect()),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running serially");
            (0..len).map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel<T, F>(len: usize, _threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    log::debug!("built without the `parallel` feature; running serially");
    (0..len).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let serial = map_indexed(1000, Execution::Serial, |i| i * i);
        for threads in [0, 2, 4] {
            assert_eq!(
                map_indexed(1000, Execution::Parallel { threads }, |i| i * i),
                serial
            );
        }
        assert_eq!(Execution::from_threads(1), Execution::Serial);
    }
}
