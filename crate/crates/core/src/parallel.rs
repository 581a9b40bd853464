//! Order-preserving parallel map over scoped threads.

/// Apply `f` to every item on at most `threads` workers. Results come back
/// in input order, so output never depends on the thread count.
pub fn par_map<T, R, F>(threads: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|part| s.spawn(|| part.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_kept() {
        let xs: Vec<u64> = (0..37).collect();
        let one = par_map(1, &xs, |x| x * x);
        let four = par_map(4, &xs, |x| x * x);
        assert_eq!(one, four);
        assert_eq!(four[36], 1296);
        assert!(par_map(3, &Vec::<u64>::new(), |x| *x).is_empty());
    }
}
