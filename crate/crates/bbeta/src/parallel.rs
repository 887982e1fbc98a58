//! Index-ordered parallel map over replicate indices.
//!
//! Work items are independent by construction (each derives its own random
//! stream), and results are written back by index, so the output is identical
//! for any thread count. `BBETA_THREADS` caps the worker count.

use std::sync::atomic::{AtomicUsize, Ordering};

pub fn thread_count(n_items: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, usize::from);
    let cap = std::env::var("BBETA_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(available);
    cap.min(available.max(1)).min(n_items.max(1))
}

/// Apply `f` to every index in `0..n`, in parallel, returning results in
/// index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_count(n);
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }

    let mut results: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let next = AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<&mut Option<T>>> = results
        .iter_mut()
        .map(std::sync::Mutex::new)
        .collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let value = f(i);
                **slots[i].lock().expect("slot lock") = Some(value);
            });
        }
    });

    results
        .into_iter()
        .map(|r| r.expect("worker filled every slot"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_index_order() {
        let out = map_indexed(100, |i| i * i);
        assert_eq!(out.len(), 100);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, i * i);
        }
    }

    #[test]
    fn thread_count_is_bounded() {
        assert!(thread_count(1000) >= 1);
        assert_eq!(thread_count(1), 1);
    }
}
