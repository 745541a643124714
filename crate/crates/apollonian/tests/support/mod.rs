//! Shared helpers for integration tests.

use apollonian::quadruple::PackingDescriptor;

/// Independent recursive depth-first enumerator with the same child rule as
/// the stack traversal: all four generators at the root, three elsewhere.
/// Returns multiplicities over `[1, bound)` including the positive root
/// circles.
pub fn recursive_histogram(packing: &PackingDescriptor, bound: u64) -> Vec<u32> {
    fn expand(q: [i64; 4], skip: usize, bound: i64, counts: &mut [u32]) {
        let total: i64 = q.iter().sum();
        for i in 0..4 {
            if i == skip {
                continue;
            }
            let nc = 2 * total - 3 * q[i];
            if nc < bound {
                counts[nc as usize] += 1;
                let mut child = q;
                child[i] = nc;
                expand(child, i, bound, counts);
            }
        }
    }

    let mut counts = vec![0u32; bound as usize];
    let root = packing.root().entries();
    for &v in &root[1..] {
        if v > 0 && (v as u64) < bound {
            counts[v as usize] += 1;
        }
    }
    let total: i64 = root.iter().sum();
    for i in 0..4 {
        let nc = 2 * total - 3 * root[i];
        if nc < bound as i64 {
            counts[nc as usize] += 1;
            let mut child = root;
            child[i] = nc;
            expand(child, i, bound as i64, &mut counts);
        }
    }
    counts
}

pub fn worker_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}
