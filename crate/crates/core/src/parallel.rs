//! Order-preserving map over independent work items. Uses rayon when the
//! `parallel` feature is on; [`map_sequential`] is always available so the
//! two can be compared.

/// Maps `f` over `items`, in parallel when the feature is enabled. Output
/// order matches input order either way.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

pub fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(usize, &T) -> U,
{
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

/// How a run fans out its work items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Parallel when the `parallel` feature is enabled.
    #[default]
    Auto,
    Sequential,
}

pub fn map_with<T, U, F>(execution: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync + Send,
{
    match execution {
        Execution::Auto => map(items, f),
        Execution::Sequential => map_sequential(items, f),
    }
}

/// Maps over `0..count`.
pub fn map_range<U, F>(execution: Execution, count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    let idx: Vec<usize> = (0..count).collect();
    map_with(execution, &idx, |_, &i| f(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(&xs, |i, x| (i as u64) * 1000 + x * x);
        let b = map_sequential(&xs, |i, x| (i as u64) * 1000 + x * x);
        assert_eq!(a, b);
        assert_eq!(
            map_range(Execution::Sequential, 5, |i| i * 2),
            vec![0, 2, 4, 6, 8]
        );
    }
}
