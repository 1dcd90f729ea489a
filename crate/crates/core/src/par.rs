//! Run-level parallelism with a sequential fallback.
//!
//! Every helper preserves input order in its output, so results are identical
//! under both execution modes. Without the `parallel` feature,
//! [`Exec::Parallel`] silently runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(exec: Exec, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.into_par_iter().map(f).collect();
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}

/// Order-preserving map with per-worker scratch state (simulator buffers).
pub fn map_init<T, S, R, I, F>(exec: Exec, items: Vec<T>, init: I, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.into_par_iter().map_init(&init, &f).collect();
    }
    let _ = exec;
    let mut state = init();
    items.into_iter().map(|t| f(&mut state, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map(Exec::Sequential, items.clone(), |x| x * x);
        let par = map(Exec::Parallel, items.clone(), |x| x * x);
        assert_eq!(seq, par);
        let seq = map_init(
            Exec::Sequential,
            items.clone(),
            Vec::new,
            |buf: &mut Vec<u64>, x| {
                buf.push(x);
                x + 1
            },
        );
        let par = map_init(Exec::Parallel, items, Vec::new, |buf: &mut Vec<u64>, x| {
            buf.push(x);
            x + 1
        });
        assert_eq!(seq, par);
    }
}
